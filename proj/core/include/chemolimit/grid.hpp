#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chemolimit {

/// Uniform node-centred tensor grid on [0, lx] x [0, ly]; boundary nodes included.
class Grid {
 public:
  Grid(int nx, int ny, double lx, double ly);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double lx() const { return lx_; }
  double ly() const { return ly_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double h_min() const { return hx_ < hy_ ? hx_ : hy_; }
  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

  /// Row-major index, x fastest.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }
  double x(int i) const { return i * hx_; }
  double y(int j) const { return j * hy_; }

  /// Trapezoid quadrature weight of node (i, j), including hx*hy.
  double weight(int i, int j) const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  int nx_;
  int ny_;
  double lx_;
  double ly_;
  double hx_;
  double hy_;
};

/// Node values on a grid. Arithmetic between fields requires equal grids.
class ScalarField {
 public:
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  template <class F>
  static ScalarField from_function(const Grid& grid, F&& fn) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny(); ++j)
      for (int i = 0; i < grid.nx(); ++i) out(i, j) = fn(grid.x(i), grid.y(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double* data() { return values_.data(); }
  const double* data() const { return values_.data(); }

  double min() const;
  double max() const;
  double max_abs() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

struct VectorField {
  ScalarField x;
  ScalarField y;

  VectorField(ScalarField fx, ScalarField fy);
  explicit VectorField(const Grid& grid) : x(grid), y(grid) {}
  const Grid& grid() const { return x.grid(); }
};

/// Throws ContractError unless the two grids coincide.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

}  // namespace chemolimit
