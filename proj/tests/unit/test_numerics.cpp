#include <doctest.h>

#include <chemolimit/error.hpp>
#include <chemolimit/grid.hpp>
#include <chemolimit/helmholtz.hpp>
#include <chemolimit/operators.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace chemolimit;
using std::numbers::pi;

namespace {

ScalarField random_field(const Grid& g, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = dist(rng);
  return f;
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("grid rejects degenerate shapes") {
  CHECK_THROWS_AS(Grid(4, 32, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(Grid(32, 32, 0.0, 1.0), DomainError);
  Grid g(33, 17, 2.0, 1.0);
  CHECK(g.hx() == doctest::Approx(1.0 / 16));
  CHECK(g.hy() == doctest::Approx(1.0 / 16));
  CHECK(g.index(3, 2) == 2u * 33u + 3u);
}

TEST_CASE("trapezoid weights integrate bilinear functions exactly") {
  Grid g(21, 13, 2.0, 1.5);
  ScalarField f = ScalarField::from_function(g, [](double x, double y) { return 1.0 + 2.0 * x - y + 3.0 * x * y; });
  // Exact integral over [0,2]x[0,1.5].
  const double exact = 3.0 + 2.0 * 2.0 * 1.5 - 2.0 * 1.125 + 3.0 * 2.0 * 1.125;
  CHECK(integrate(f) == doctest::Approx(exact).epsilon(1e-13));
}

TEST_CASE("fields on different grids are rejected") {
  ScalarField a(Grid(16, 16, 1.0, 1.0)), b(Grid(17, 16, 1.0, 1.0));
  CHECK_THROWS_AS(a += b, ContractError);
  CHECK_THROWS_AS(laplacian_neumann(a) - b, ContractError);
}

TEST_CASE("cosine modes are eigenvectors of the discrete Neumann Laplacian") {
  Grid g(41, 33, 1.0, 2.0);
  for (int kx : {0, 1, 3}) {
    for (int ky : {0, 2, 5}) {
      ScalarField f = ScalarField::from_function(
          g, [&](double x, double y) { return std::cos(kx * pi * x / g.lx()) * std::cos(ky * pi * y / g.ly()); });
      const double lam = (2.0 - 2.0 * std::cos(kx * pi * g.hx() / g.lx())) / (g.hx() * g.hx()) +
                         (2.0 - 2.0 * std::cos(ky * pi * g.hy() / g.ly())) / (g.hy() * g.hy());
      ScalarField lap = laplacian_neumann(f);
      ScalarField expected = -lam * f;
      CHECK(max_diff(lap, expected) < 1e-9 * std::max(1.0, lam));
    }
  }
}

TEST_CASE("Laplacian has zero trapezoid mean and is second order on smooth data") {
  Grid g(65, 65, 1.0, 1.0);
  ScalarField r = random_field(g, 7);
  CHECK(std::abs(integrate(laplacian_neumann(r))) < 1e-9);

  auto err = [](int n) {
    Grid gg(n, n, 1.0, 1.0);
    auto fn = [](double x, double y) { return std::cos(pi * x) * std::cos(pi * y); };
    ScalarField f = ScalarField::from_function(gg, fn);
    ScalarField lap = laplacian_neumann(f);
    double m = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) m = std::max(m, std::abs(lap(i, j) + 2.0 * pi * pi * fn(gg.x(i), gg.y(j))));
    return m;
  };
  CHECK(std::log2(err(33) / err(65)) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("gradient has zero normal component on the boundary") {
  Grid g(25, 19, 1.0, 1.0);
  ScalarField f = random_field(g, 3);
  VectorField grad = gradient_neumann(f);
  for (int j = 0; j < g.ny(); ++j) {
    CHECK(grad.x(0, j) == 0.0);
    CHECK(grad.x(g.nx() - 1, j) == 0.0);
  }
  for (int i = 0; i < g.nx(); ++i) {
    CHECK(grad.y(i, 0) == 0.0);
    CHECK(grad.y(i, g.ny() - 1) == 0.0);
  }
  // Central differences are exact on quadratics in the interior.
  ScalarField q = ScalarField::from_function(g, [](double x, double y) { return x * x + 3.0 * x * y; });
  VectorField gq = gradient_neumann(q);
  CHECK(gq.x(5, 7) == doctest::Approx(2.0 * g.x(5) + 3.0 * g.y(7)).epsilon(1e-12));
  CHECK(gq.y(5, 7) == doctest::Approx(3.0 * g.x(5)).epsilon(1e-12));
}

TEST_CASE("flux divergence conserves the trapezoid integral") {
  Grid g(31, 23, 1.5, 1.0);
  VectorField flux(random_field(g, 11), random_field(g, 12));
  CHECK(std::abs(integrate(divergence_flux(flux))) < 1e-10);
  ScalarField u = random_field(g, 13, 0.0, 1.0), phi = random_field(g, 14);
  CHECK(std::abs(integrate(drift_divergence(u, phi))) < 1e-10);
  CHECK(std::abs(integrate(drift_divergence(u, phi, FaceAverage::upwind))) < 1e-10);
}

TEST_CASE("drift divergence with unit density is the Laplacian of the potential") {
  Grid g(29, 29, 1.0, 1.0);
  ScalarField phi = random_field(g, 21);
  CHECK(max_diff(drift_divergence(ScalarField(g, 1.0), phi), laplacian_neumann(phi)) < 1e-9);
  CHECK(max_diff(drift_divergence(ScalarField(g, 1.0), phi, FaceAverage::upwind), laplacian_neumann(phi)) < 1e-9);
}

TEST_CASE("boundary normal slope of a field flat near the boundary is zero") {
  Grid g(33, 33, 1.0, 1.0);
  ScalarField f = ScalarField::from_function(g, [](double x, double y) {
    double r = std::hypot(x - 0.5, y - 0.5);
    return r < 0.3 ? std::cos(pi * r / 0.3) : -1.0;
  });
  CHECK(max_boundary_normal_slope(f) < 1e-10);
  ScalarField s = ScalarField::from_function(g, [](double x, double) { return x; });
  CHECK(max_boundary_normal_slope(s) > 0.5);
}

TEST_CASE("spectral and CG Helmholtz solves agree") {
  Grid g(49, 37, 1.0, 0.75);
  ScalarField rhs = random_field(g, 5, 0.0, 1.0);
  for (double gamma : {0.1, 1.0, 25.0}) {
    HelmholtzStats s1, s2;
    ScalarField a = solve_helmholtz_neumann(rhs, gamma, 1e-12, HelmholtzMethod::spectral, &s1);
    ScalarField b = solve_helmholtz_neumann(rhs, gamma, 1e-12, HelmholtzMethod::conjugate_gradient, &s2);
    CHECK(s1.iterations == 0);
    CHECK(s2.iterations > 0);
    CHECK(max_diff(a, b) < 1e-9 * std::max(1.0, a.max_abs()));
    CHECK(helmholtz_residual(a, rhs, gamma) <= 1e-12 * rhs.max_abs() + helmholtz_rounding_floor(a, gamma));
  }
}

TEST_CASE("CG reaches a tight tolerance on a fine grid") {
  Grid g(256, 256, 1.0, 1.0);
  ScalarField rhs = random_field(g, 4, 0.0, 1.0);
  HelmholtzStats stats;
  ScalarField v = solve_helmholtz_cg(rhs, 1.0, 1e-10, 0, nullptr, &stats);
  CHECK(stats.residual <= std::max(1e-10 * rhs.max_abs(), helmholtz_rounding_floor(v, 1.0)));
  CHECK(max_diff(v, solve_helmholtz_neumann(rhs, 1.0)) < 1e-8);
}

TEST_CASE("Helmholtz mass identity gamma * int v = int rhs") {
  Grid g(65, 65, 1.0, 1.0);
  HelmholtzSolver solver(g, 0.7);
  for (unsigned seed : {1u, 2u, 3u}) {
    ScalarField rhs = random_field(g, seed, 0.0, 1.0);
    ScalarField v = solver.solve(rhs);
    CHECK(std::abs(0.7 * integrate(v) - integrate(rhs)) < 1e-9);
  }
}

TEST_CASE("constant right-hand side gives the constant solution exactly") {
  Grid g(17, 17, 1.0, 1.0);
  HelmholtzSolver solver(g, 4.0);
  ScalarField v = solver.solve(ScalarField(g, 2.0));
  for (std::size_t k = 0; k < v.size(); ++k) CHECK(v[k] == 0.5);
}

TEST_CASE("manufactured Helmholtz solution converges at second order") {
  auto err = [](int n) {
    Grid g(n, n, 1.0, 1.0);
    const double gamma = 1.0;
    auto exact = [](double x, double y) { return std::cos(pi * x) * std::cos(2.0 * pi * y); };
    ScalarField rhs = ScalarField::from_function(g, [&](double x, double y) { return (5.0 * pi * pi + gamma) * exact(x, y); });
    ScalarField v = solve_helmholtz_neumann(rhs, gamma);
    return max_diff(v, ScalarField::from_function(g, exact));
  };
  const double e1 = err(33), e2 = err(65);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Helmholtz input errors") {
  Grid g(17, 17, 1.0, 1.0);
  ScalarField rhs(g, 1.0);
  CHECK_THROWS_AS(solve_helmholtz_neumann(rhs, 0.0), DomainError);
  CHECK_THROWS_AS(solve_helmholtz_neumann(rhs, -1.0), DomainError);
  rhs(3, 3) = std::nan("");
  CHECK_THROWS_AS(solve_helmholtz_neumann(rhs, 1.0), DomainError);
  ScalarField r2 = random_field(g, 9);
  CHECK_THROWS_AS(solve_helmholtz_cg(r2, 1e-3, 1e-14, 2), NumericalError);
}
