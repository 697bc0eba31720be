#include "chemolimit/operators.hpp"

#include <algorithm>
#include <cmath>

namespace chemolimit {

namespace {

inline int mirror_lo(int i) { return i == 0 ? 1 : i - 1; }
inline int mirror_hi(int i, int n) { return i == n - 1 ? n - 2 : i + 1; }

}  // namespace

ScalarField laplacian_neumann(const ScalarField& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  const double ix2 = 1.0 / (g.hx() * g.hx()), iy2 = 1.0 / (g.hy() * g.hy());
  ScalarField out(g);
  const double* a = f.data();
  double* o = out.data();
  for (int j = 0; j < ny; ++j) {
    const double* row = a + g.index(0, j);
    const double* rs = a + g.index(0, mirror_lo(j));
    const double* rn = a + g.index(0, mirror_hi(j, ny));
    double* orow = o + g.index(0, j);
    orow[0] = (2.0 * row[1] - 2.0 * row[0]) * ix2 + (rs[0] + rn[0] - 2.0 * row[0]) * iy2;
    for (int i = 1; i < nx - 1; ++i)
      orow[i] = (row[i - 1] + row[i + 1] - 2.0 * row[i]) * ix2 + (rs[i] + rn[i] - 2.0 * row[i]) * iy2;
    const int e = nx - 1;
    orow[e] = (2.0 * row[e - 1] - 2.0 * row[e]) * ix2 + (rs[e] + rn[e] - 2.0 * row[e]) * iy2;
  }
  return out;
}

VectorField gradient_neumann(const ScalarField& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  VectorField out(g);
  const double ihx = 0.5 / g.hx(), ihy = 0.5 / g.hy();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      out.x(i, j) = (i == 0 || i == nx - 1) ? 0.0 : (f(i + 1, j) - f(i - 1, j)) * ihx;
      out.y(i, j) = (j == 0 || j == ny - 1) ? 0.0 : (f(i, j + 1) - f(i, j - 1)) * ihy;
    }
  }
  return out;
}

ScalarField divergence_flux(const VectorField& flux) {
  const Grid& g = flux.grid();
  const int nx = g.nx(), ny = g.ny();
  ScalarField out(g);
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double east = i < nx - 1 ? 0.5 * (flux.x(i, j) + flux.x(i + 1, j)) : 0.0;
      double west = i > 0 ? 0.5 * (flux.x(i - 1, j) + flux.x(i, j)) : 0.0;
      double north = j < ny - 1 ? 0.5 * (flux.y(i, j) + flux.y(i, j + 1)) : 0.0;
      double south = j > 0 ? 0.5 * (flux.y(i, j - 1) + flux.y(i, j)) : 0.0;
      double sx = (i == 0 || i == nx - 1) ? 2.0 : 1.0;
      double sy = (j == 0 || j == ny - 1) ? 2.0 : 1.0;
      out(i, j) = sx * (east - west) * ihx + sy * (north - south) * ihy;
    }
  }
  return out;
}

ScalarField drift_divergence(const ScalarField& u, const ScalarField& phi, FaceAverage average) {
  require_same_grid(u.grid(), phi.grid(), "drift_divergence");
  const Grid& g = u.grid();
  const int nx = g.nx(), ny = g.ny();
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  auto face = [average](double ua, double ub, double slope) {
    if (average == FaceAverage::centered) return 0.5 * (ua + ub) * slope;
    return (slope >= 0.0 ? ub : ua) * slope;
  };
  // Face fluxes, stored once per face so neighbouring nodes see identical values.
  std::vector<double> fx(static_cast<std::size_t>(nx - 1) * ny), fy(static_cast<std::size_t>(nx) * (ny - 1));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx - 1; ++i)
      fx[static_cast<std::size_t>(j) * (nx - 1) + i] =
          face(u(i, j), u(i + 1, j), (phi(i + 1, j) - phi(i, j)) * ihx);
  for (int j = 0; j < ny - 1; ++j)
    for (int i = 0; i < nx; ++i)
      fy[static_cast<std::size_t>(j) * nx + i] = face(u(i, j), u(i, j + 1), (phi(i, j + 1) - phi(i, j)) * ihy);
  ScalarField out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      double east = i < nx - 1 ? fx[static_cast<std::size_t>(j) * (nx - 1) + i] : 0.0;
      double west = i > 0 ? fx[static_cast<std::size_t>(j) * (nx - 1) + i - 1] : 0.0;
      double north = j < ny - 1 ? fy[static_cast<std::size_t>(j) * nx + i] : 0.0;
      double south = j > 0 ? fy[static_cast<std::size_t>(j - 1) * nx + i] : 0.0;
      double sx = (i == 0 || i == nx - 1) ? 2.0 : 1.0;
      double sy = (j == 0 || j == ny - 1) ? 2.0 : 1.0;
      out(i, j) = sx * (east - west) * ihx + sy * (north - south) * ihy;
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  const Grid& g = f.grid();
  double total = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
      double w = (i == 0 || i == g.nx() - 1) ? 0.5 : 1.0;
      row += w * f(i, j);
    }
    double wy = (j == 0 || j == g.ny() - 1) ? 0.5 : 1.0;
    total += wy * row;
  }
  return total * g.hx() * g.hy();
}

double max_boundary_normal_slope(const ScalarField& f) {
  const Grid& g = f.grid();
  const int nx = g.nx(), ny = g.ny();
  double m = 0.0;
  for (int j = 0; j < ny; ++j) {
    m = std::max(m, std::abs(f(1, j) - f(0, j)) / g.hx());
    m = std::max(m, std::abs(f(nx - 1, j) - f(nx - 2, j)) / g.hx());
  }
  for (int i = 0; i < nx; ++i) {
    m = std::max(m, std::abs(f(i, 1) - f(i, 0)) / g.hy());
    m = std::max(m, std::abs(f(i, ny - 1) - f(i, ny - 2)) / g.hy());
  }
  return m;
}

}  // namespace chemolimit
