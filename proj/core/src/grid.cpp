#include "chemolimit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chemolimit/error.hpp"

namespace chemolimit {

Grid::Grid(int nx, int ny, double lx, double ly) : nx_(nx), ny_(ny), lx_(lx), ly_(ly) {
  if (nx < 8 || ny < 8) throw DomainError("grid needs at least 8 nodes per axis");
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
    throw DomainError("grid lengths must be positive and finite");
  hx_ = lx / (nx - 1);
  hy_ = ly / (ny - 1);
}

double Grid::weight(int i, int j) const {
  double wx = (i == 0 || i == nx_ - 1) ? 0.5 : 1.0;
  double wy = (j == 0 || j == ny_ - 1) ? 0.5 : 1.0;
  return wx * wy * hx_ * hy_;
}

bool Grid::operator==(const Grid& other) const {
  return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (a != b) throw ContractError(std::string(where) + ": fields live on different grids");
}

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ContractError("ScalarField: value count does not match grid");
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(grid_, other.grid_, "operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(ScalarField fx, ScalarField fy) : x(std::move(fx)), y(std::move(fy)) {
  require_same_grid(x.grid(), y.grid(), "VectorField");
}

}  // namespace chemolimit
