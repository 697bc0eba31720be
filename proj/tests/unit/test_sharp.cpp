#include <doctest.h>

#include <chemolimit/analysis.hpp>
#include <chemolimit/error.hpp>
#include <chemolimit/operators.hpp>
#include <chemolimit/sharp.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace chemolimit;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

// v0 for the indicator of a disk of radius R inside a disk of radius r_out with v' = 0 there:
// 1/gamma + A I0(k r) inside, C (K0(k r) + c2 I0(k r)) outside, k = sqrt(gamma).
struct BesselDisk {
  double k, R, A, C, c2, gamma;

  BesselDisk(double radius, double gm, double r_out) : k(std::sqrt(gm)), R(radius), gamma(gm) {
    c2 = std::cyl_bessel_k(1.0, k * r_out) / std::cyl_bessel_i(1.0, k * r_out);
    const double i0 = std::cyl_bessel_i(0.0, k * R), i1 = std::cyl_bessel_i(1.0, k * R);
    const double k0 = std::cyl_bessel_k(0.0, k * R), k1 = std::cyl_bessel_k(1.0, k * R);
    // A i0 - C (k0 + c2 i0) = -1/gamma ; A i1 - C (-k1 + c2 i1) = 0
    const double a11 = i0, a12 = -(k0 + c2 * i0), a21 = i1, a22 = k1 - c2 * i1;
    const double det = a11 * a22 - a12 * a21;
    A = (-1.0 / gamma) * a22 / det;
    C = -a21 * (-1.0 / gamma) / det;
  }
  double value(double r) const {
    if (r < R) return 1.0 / gamma + A * std::cyl_bessel_i(0.0, k * r);
    return C * (std::cyl_bessel_k(0.0, k * r) + c2 * std::cyl_bessel_i(0.0, k * r));
  }
  double slope_at_R() const { return A * k * std::cyl_bessel_i(1.0, k * R); }
};

// Closed-form time for dR/dt = -1/R + c to move from r0 to r.
double mcf_source_time(double r0, double r, double c) {
  return (r - r0) / c + std::log((c * r - 1.0) / (c * r0 - 1.0)) / (c * c);
}

}  // namespace

TEST_CASE("zeta: identity core, plateau, odd and monotone") {
  const double d0 = 0.1;
  for (double s : {-0.2, -0.05, 0.0, 0.13, 0.2}) CHECK(zeta(s, d0) == s);
  for (double s : {0.3, 0.5, 7.0}) {
    CHECK(zeta(s, d0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(zeta(-s, d0) == doctest::Approx(-0.3).epsilon(1e-15));
  }
  double prev = zeta(-0.4, d0);
  for (int k = 1; k <= 8000; ++k) {
    double s = -0.4 + 0.8 * k / 8000.0;
    double z = zeta(s, d0);
    CHECK(z >= prev);
    if (std::abs(s) < 0.3 - 1e-9 && std::abs(s - 0.8 / 8000.0) < 0.3) CHECK(z > prev);
    CHECK(zeta(-s, d0) == doctest::Approx(-z).epsilon(1e-14));
    prev = z;
  }
}

TEST_CASE("zeta derivative matches finite differences and is continuous at the joints") {
  const double d0 = 0.1, h = 1e-6;
  for (int k = 0; k <= 400; ++k) {
    double s = -0.35 + 0.7 * k / 400.0;
    double fd = (zeta(s + h, d0) - zeta(s - h, d0)) / (2.0 * h);
    CHECK(zeta_prime(s, d0) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
  }
  for (double joint : {0.2, 0.3}) {
    CHECK(zeta_prime(joint - 1e-9, d0) == doctest::Approx(zeta_prime(joint + 1e-9, d0)).epsilon(1e-6));
    // Second derivative vanishes on both sides of each joint.
    double left = (zeta_prime(joint - 1e-7, d0) - zeta_prime(joint - 2e-7, d0)) / 1e-7;
    double right = (zeta_prime(joint + 2e-7, d0) - zeta_prime(joint + 1e-7, d0)) / 1e-7;
    CHECK(std::abs(left) < 1e-3);
    CHECK(std::abs(right) < 1e-3);
  }
}

TEST_CASE("cutoff of a far field saturates") {
  Grid g(21, 21, 1.0, 1.0);
  ScalarField c = cutoff(ScalarField(g, 5.0), 0.1);
  CHECK(c.min() == doctest::Approx(0.3).epsilon(1e-15));
  CHECK_THROWS_AS(cutoff(c, 0.0), DomainError);
}

TEST_CASE("step_field marks the negative side") {
  Grid g(9, 9, 1.0, 1.0);
  ScalarField d = circle_distance(g, 0.5, 0.5, 0.3);
  ScalarField s = step_field(d);
  for (std::size_t k = 0; k < d.size(); ++k) CHECK(s[k] == (d[k] < 0.0 ? 1.0 : 0.0));
}

TEST_CASE("redistance recovers a circle's signed distance") {
  Grid g(81, 81, 1.0, 1.0);
  // The band stays clear of the centre, where the closest point is not unique.
  const double R = 0.27, band = 0.16;
  // Same zero set, distorted magnitude.
  auto squashed = ScalarField::from_function(g, [&](double x, double y) {
    double r2 = (x - 0.5) * (x - 0.5) + (y - 0.48) * (y - 0.48);
    return 3.0 * (r2 - R * R);
  });
  ScalarField d = redistance(squashed, band);
  const double d0 = band / 2.0;
  double worst = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      double exact = std::hypot(g.x(i) - 0.5, g.y(j) - 0.48) - R;
      CHECK((d(i, j) < 0.0) == (squashed(i, j) < 0.0));
      worst = std::max(worst, std::abs(d(i, j) - zeta(exact, d0)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("redistance of a straight interface") {
  Grid g(41, 41, 1.0, 1.0);
  auto f = ScalarField::from_function(g, [](double x, double y) { return 0.4 * (x - 0.37) + 0.3 * (y - 0.5); });
  ScalarField d = redistance(f, 0.4);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      // The interpolant mirrors at the walls, so its zero set bends inside the boundary cells.
      // Check nodes nearer to the line than to those cells.
      const double x = g.x(i), y = g.y(j), h = g.hx();
      const double wall = std::min({x, 1.0 - x, y, 1.0 - y}) - h;
      const double s = f(i, j) / 0.25;
      const double fx = x - 0.4 * s, fy = y - 0.3 * s;
      if (fx < h || fx > 1.0 - h || fy < h || fy > 1.0 - h || std::abs(f(i, j) / 0.5) >= wall) continue;
      CHECK(d(i, j) == doctest::Approx(zeta(f(i, j) / 0.5, 0.2)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("redistance without an interface throws") {
  Grid g(11, 11, 1.0, 1.0);
  CHECK_THROWS_AS(redistance(ScalarField(g, 1.0), 0.2), NumericalError);
}

TEST_CASE("radial v0 matches the Bessel solution") {
  for (double gamma : {0.5, 1.0, 4.0}) {
    const double R = 0.4, r_out = 1.2;
    BesselDisk exact(R, gamma, r_out);
    RadialProfile p = radial_v0(R, gamma, r_out);
    CHECK(p.v_at_r == doctest::Approx(exact.value(R)).epsilon(1e-7));
    CHECK(p.dv_dr == doctest::Approx(exact.slope_at_R()).epsilon(1e-6));
    CHECK(p.v_center == doctest::Approx(exact.value(0.0)).epsilon(1e-7));
    CHECK(p.dv_dr < 0.0);
    for (double r : {0.1, 0.7, 1.1})
      CHECK(radial_v0_at(R, gamma, r_out, r) == doctest::Approx(exact.value(r)).epsilon(1e-7));
  }
}

TEST_CASE("radial v0 conserves mass") {
  // gamma * integral of v over the disk equals the area of the indicator.
  const double R = 0.5, gamma = 2.0, r_out = 1.5;
  const int n = 4000;
  double mass = 0.0;
  for (int k = 0; k < n; ++k) {
    double r = (k + 0.5) * r_out / n;
    mass += radial_v0_at(R, gamma, r_out, r) * 2.0 * pi * r * r_out / n;
  }
  CHECK(gamma * mass == doctest::Approx(pi * R * R).epsilon(1e-5));
}

TEST_CASE("radial oracle: pure curvature flow") {
  RadialParams p;
  p.alpha = 0.0;
  RadialTrajectory tr = radial_oracle(0.5, p, 0.1);
  for (double t : {0.0, 0.03, 0.07, 0.1}) CHECK(tr.radius_at(t) == doctest::Approx(std::sqrt(0.25 - 2.0 * t)).epsilon(1e-7));
  RadialTrajectory gone = radial_oracle(0.3, p, 0.1);
  CHECK(gone.collapsed);
  CHECK(gone.collapse_time == doctest::Approx(0.045).epsilon(1e-4));
}

TEST_CASE("radial oracle: curvature plus source") {
  RadialParams p;
  p.alpha = 1.0;
  const double c = sqrt2;
  RadialTrajectory still = radial_oracle(1.0 / c, p, 0.2);
  CHECK(still.radius_at(0.2) == doctest::Approx(1.0 / c).epsilon(1e-9));
  RadialTrajectory grow = radial_oracle(0.9, p, 0.2);
  for (std::size_t k = 0; k < grow.t.size(); ++k)
    CHECK(grow.t[k] == doctest::Approx(mcf_source_time(0.9, grow.radius[k], c)).epsilon(1e-6).scale(1.0));
}

TEST_CASE("radial oracle: chemotactic drift shrinks the disk") {
  RadialParams plain, drift;
  plain.alpha = drift.alpha = 1.0;
  drift.chi.k = 1.0;
  drift.r_out = plain.r_out = 1.2;
  double r_plain = radial_oracle(0.5, plain, 0.05).radius_at(0.05);
  double r_drift = radial_oracle(0.5, drift, 0.05).radius_at(0.05);
  CHECK(r_drift < r_plain);
  // Initial rate from the Bessel slope.
  BesselDisk exact(0.5, 1.0, 1.2);
  RadialTrajectory tr = radial_oracle(0.5, drift, 0.05);
  CHECK(tr.rate.front() == doctest::Approx(-2.0 + exact.slope_at_R() + sqrt2).epsilon(1e-6));
}

TEST_CASE("sharp solver: curvature flow of a circle") {
  Grid g(101, 101, 1.0, 1.0);
  SharpParams p;
  p.alpha = 0.0;
  p.d0 = 0.05;
  auto snaps = run_sharp(p, circle_distance(g, 0.5, 0.5, 0.3), 0.02, {0.01, 0.02});
  REQUIRE(snaps.size() == 2);
  CHECK(snaps[0].t == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(snaps[1].t == doctest::Approx(0.02).epsilon(1e-14));
  for (const auto& s : snaps) {
    CircleFit fit = fit_circle(extract_interface(s.d, 0.0));
    CHECK(fit.mean_radius == doctest::Approx(std::sqrt(0.09 - 2.0 * s.t)).epsilon(0.01));
  }
}

TEST_CASE("sharp solver: drift circle against the radial oracle") {
  Grid g(101, 101, 2.0, 2.0);
  SharpParams p;
  p.alpha = 1.0;
  p.chi.k = 1.0;
  p.d0 = 0.1;
  auto snaps = run_sharp(p, circle_distance(g, 1.0, 1.0, 0.5), 0.05, {0.05});
  RadialParams rp;
  rp.alpha = 1.0;
  rp.chi.k = 1.0;
  rp.r_out = 2.0 / std::sqrt(pi);
  double expected = radial_oracle(0.5, rp, 0.05).radius_at(0.05);
  CircleFit fit = fit_circle(extract_interface(snaps.back().d, 0.0));
  CHECK(fit.mean_radius == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("sharp solver contracts") {
  Grid g(41, 41, 1.0, 1.0);
  SharpParams p;
  p.d0 = 0.05;
  SharpSolver solver(p, circle_distance(g, 0.5, 0.5, 0.3));
  CHECK_THROWS_AS(solver.step(10.0 * solver.dt()), NumericalError);
  solver.step(solver.dt());
  CHECK(solver.steps() == 1);
  // v0 is only recomputed when the indicator changes.
  CHECK(solver.v0_refreshes() <= 2);
  SharpParams bad = p;
  bad.redistance_every = 0;
  CHECK_THROWS_AS(SharpSolver(bad, circle_distance(g, 0.5, 0.5, 0.3)), DomainError);
  CHECK_THROWS_AS(run_sharp(p, circle_distance(g, 0.5, 0.5, 0.3), 0.01, {0.02}), DomainError);
}

TEST_CASE("solve_v0 satisfies the mass identity") {
  Grid g(65, 65, 1.0, 1.0);
  LevelSetState s{0.0, circle_distance(g, 0.5, 0.5, 0.25), 0.1, ScalarField(g)};
  ScalarField v = solve_v0(s, 2.0);
  CHECK(2.0 * integrate(v) == doctest::Approx(integrate(step_field(s.d))).epsilon(1e-9));
}
