#include <doctest.h>

#include <chemolimit/analysis.hpp>
#include <chemolimit/error.hpp>
#include <chemolimit/kinetics.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace chemolimit;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

Polyline circle(double cx, double cy, double r, int n = 2000) {
  Polyline p;
  p.closed = true;
  for (int k = 0; k < n; ++k) {
    double a = 2.0 * pi * k / n;
    p.points.push_back({cx + r * std::cos(a), cy + r * std::sin(a)});
  }
  return p;
}

Polyline segment(Point a, Point b) { return Polyline{{a, b}, false}; }

// Width in z between the 1 - eta and eta levels of the tanh profile.
double profile_width(double eta) { return 4.0 * sqrt2 * std::atanh(1.0 - 2.0 * eta); }

ScalarField prepared_circle(const Grid& g, double r, double eps) {
  return ScalarField::from_function(g, [&](double x, double y) {
    return u0((std::hypot(x - 0.5 * g.lx(), y - 0.5 * g.ly()) - r) / eps);
  });
}

}  // namespace

TEST_CASE("hausdorff of parallel and offset segments") {
  auto a = segment({0, 0}, {1, 0});
  CHECK(hausdorff(a, segment({0, 1}, {1, 1})) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(hausdorff(a, segment({0.5, 1}, {1.5, 1})) == doctest::Approx(std::hypot(0.5, 1.0)).epsilon(1e-12));
}

TEST_CASE("hausdorff of concentric circles is the radius gap") {
  auto a = circle(0.5, 0.5, 0.3), b = circle(0.5, 0.5, 0.32);
  CHECK(hausdorff(a, b) == doctest::Approx(0.02).epsilon(1e-3));
}

TEST_CASE("directed hausdorff is one-sided") {
  auto whole = segment({0, 0}, {1, 0});
  auto part = segment({0.25, 0}, {0.5, 0});
  CHECK(directed_hausdorff({part}, {whole}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(directed_hausdorff({whole}, {part}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(hausdorff(whole, part) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("hausdorff properties on random circles") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> c(0.3, 0.7), r(0.05, 0.25);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = circle(c(rng), c(rng), r(rng), 400);
    auto b = circle(c(rng), c(rng), r(rng), 400);
    auto e = circle(c(rng), c(rng), r(rng), 400);
    const double spacing = 1e-3;
    double ab = hausdorff(a, b, spacing), ba = hausdorff(b, a, spacing);
    CHECK(ab >= 0.0);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(hausdorff(a, a, spacing) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hausdorff(a, e, spacing) <= ab + hausdorff(b, e, spacing) + 2.0 * spacing);
  }
}

TEST_CASE("hausdorff rejects empty input") {
  CHECK_THROWS_AS(hausdorff(std::vector<Polyline>{}, {segment({0, 0}, {1, 0})}), DomainError);
}

TEST_CASE("extracted straight level set is exact") {
  Grid g(41, 21, 1.0, 0.5);
  auto f = ScalarField::from_function(g, [](double x, double) { return x - 0.3137; });
  auto lines = extract_interface(f, 0.0);
  REQUIRE(lines.size() == 1);
  CHECK_FALSE(lines[0].closed);
  for (const Point& p : lines[0].points) CHECK(p.x == doctest::Approx(0.3137).epsilon(1e-12));
  CHECK(total_length(lines) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("extract_interface of a field without crossing is empty") {
  Grid g(11, 11, 1.0, 1.0);
  CHECK(extract_interface(ScalarField(g, 1.0), 0.5).empty());
}

TEST_CASE("circle round trip through signed distance stays within h") {
  Grid g(129, 129, 1.0, 1.0);
  const double h = g.hx(), r = 0.31;
  auto d = ScalarField::from_function(g, [&](double x, double y) { return std::hypot(x - 0.52, y - 0.47) - r; });
  auto lines = extract_interface(d, 0.0);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].closed);
  CHECK(hausdorff(lines[0], circle(0.52, 0.47, r)) <= h);
  CHECK(total_length(lines) == doctest::Approx(2.0 * pi * r).epsilon(1e-3));
  CircleFit fit = fit_circle(lines);
  CHECK(fit.cx == doctest::Approx(0.52).epsilon(1e-3));
  CHECK(fit.cy == doctest::Approx(0.47).epsilon(1e-3));
  CHECK(fit.mean_radius == doctest::Approx(r).epsilon(1e-3));
  CHECK(fit.spread < h);
}

TEST_CASE("refine bounds the segment length") {
  Polyline p = refine(segment({0, 0}, {1, 0}), 0.1);
  REQUIRE(p.points.size() >= 11);
  for (std::size_t k = 1; k < p.points.size(); ++k)
    CHECK(std::hypot(p.points[k].x - p.points[k - 1].x, p.points[k].y - p.points[k - 1].y) <= 0.1 + 1e-12);
}

TEST_CASE("thickness of a prepared profile matches the tanh inversion") {
  const double eps = 0.02, eta = 0.1;
  Grid g(201, 201, 1.0, 1.0);
  double t = layer_thickness(prepared_circle(g, 0.3, eps), eta);
  CHECK(t / eps == doctest::Approx(profile_width(eta)).epsilon(0.05));
  CHECK(profile_width(eta) == doctest::Approx(6.2146).epsilon(1e-4));
}

TEST_CASE("thickness scales linearly in eps") {
  Grid g(201, 201, 1.0, 1.0);
  double coarse = layer_thickness(prepared_circle(g, 0.3, 0.04), 0.1);
  double fine = layer_thickness(prepared_circle(g, 0.3, 0.02), 0.1);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("thickness of a step is at most a cell") {
  Grid g(101, 101, 1.0, 1.0);
  auto step = ScalarField::from_function(g, [](double x, double y) {
    return std::hypot(x - 0.5, y - 0.5) < 0.3 ? 1.0 : 0.0;
  });
  CHECK(layer_thickness(step, 0.1) <= std::sqrt(2.0) * g.hx());
}

TEST_CASE("thickness without a layer is an error") {
  Grid g(11, 11, 1.0, 1.0);
  CHECK_THROWS_AS(layer_thickness(ScalarField(g, 0.0), 0.1), NumericalError);
}

TEST_CASE("fit_rate recovers exact power laws") {
  std::vector<std::pair<double, double>> lin, quad;
  for (double e : {0.04, 0.02, 0.01}) {
    lin.emplace_back(e, 3.0 * e);
    quad.emplace_back(e, e * e);
  }
  ConvergenceFit a = fit_rate(lin);
  CHECK(a.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(a.residual < 1e-12);
  CHECK(fit_rate(quad).slope == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fit_rate is invariant under metric scaling") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> noise(0.5, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::pair<double, double>> s, scaled;
    const double c = noise(rng) * 10.0;
    for (double e : {0.08, 0.04, 0.02, 0.01}) {
      s.emplace_back(e, noise(rng) * e);
      scaled.emplace_back(e, c * s.back().second);
    }
    ConvergenceFit a = fit_rate(s), b = fit_rate(scaled);
    CHECK(std::abs(b.slope - a.slope) <= 1e-12);
    CHECK(std::abs(b.intercept - a.intercept - std::log(c)) <= 1e-12);
  }
}

TEST_CASE("fit_rate rejects bad samples") {
  CHECK_THROWS_AS(fit_rate({{0.04, 1.0}, {0.02, 0.5}}), DomainError);
  CHECK_THROWS_AS(fit_rate({{0.04, 1.0}, {0.02, 0.0}, {0.01, 0.2}}), DomainError);
  CHECK_THROWS_AS(fit_rate({{0.04, 1.0}, {0.02, -1.0}, {0.01, 0.2}}), DomainError);
}

TEST_CASE("generation check on an exact step passes with margin eta") {
  Grid g(101, 8, 1.0, 0.07);
  auto u0f = ScalarField::from_function(g, [](double x, double) { return 1.0 - x; });
  auto step = ScalarField::from_function(g, [](double x, double) { return x < 0.5 ? 1.0 : 0.0; });
  GenerationReport r = generation_check(step, u0f, 2.0, 0.02, 0.1);
  CHECK(r.passed);
  CHECK(r.margin == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(r.upper_nodes > 0);
  CHECK(r.lower_nodes > 0);
}

TEST_CASE("generation check threshold follows the profile inversion") {
  // u0 = 1/2 - d and u = U0(d / eps): the offset region u0 >= 1/2 + M0 eps gives u >= 1 - eta
  // exactly when M0 exceeds half the profile width.
  const double eps = 0.02, eta = 0.1;
  Grid g(1001, 8, 1.0, 0.007);
  auto u0f = ScalarField::from_function(g, [](double x, double) { return 1.0 - x; });
  auto u = ScalarField::from_function(g, [&](double x, double) { return u0((x - 0.5) / eps); });
  const double critical = 0.5 * profile_width(eta);
  CHECK(generation_check(u, u0f, critical + 0.1, eps, eta).passed);
  GenerationReport fail = generation_check(u, u0f, critical - 0.1, eps, eta);
  CHECK_FALSE(fail.passed);
  CHECK(fail.margin < 0.0);
}

TEST_CASE("generation check flags global overshoot") {
  Grid g(11, 11, 1.0, 1.0);
  GenerationReport r = generation_check(ScalarField(g, 1.2), ScalarField(g, 0.5), 1.0, 0.02, 0.1);
  CHECK_FALSE(r.passed);
  CHECK(r.margin == doctest::Approx(-0.1).epsilon(1e-12));
}
