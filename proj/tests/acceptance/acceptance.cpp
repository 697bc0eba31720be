#include <chemolimit/analysis.hpp>
#include <chemolimit/bounds.hpp>
#include <chemolimit/config.hpp>
#include <chemolimit/experiment.hpp>
#include <chemolimit/helmholtz.hpp>
#include <chemolimit/io.hpp>
#include <chemolimit/kinetics.hpp>
#include <chemolimit/sharp.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace chemolimit;
using std::numbers::pi;
using std::numbers::sqrt2;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

int failures = 0;

void report(int id, const std::string& name, double budget_seconds, const std::function<Verdict()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool in_time = secs <= budget_seconds;
  bool ok = v.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %d (%s): %s; %.1fs of %.0fs%s\n", ok ? "PASS" : "FAIL", id, name.c_str(), v.detail.c_str(),
              secs, budget_seconds, in_time ? "" : " (over budget)");
  std::fflush(stdout);
}

double simpson(const std::function<double(double)>& fn, double a, double b, int n) {
  double h = (b - a) / n, s = fn(a) + fn(b);
  for (int k = 1; k < n; ++k) s += fn(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

std::string config_path(const std::string& name) { return std::string(CHEMOLIMIT_CONFIG_DIR) + "/" + name; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict profile_identities() {
  double residual = 0.0, source = 0.0;
  for (int k = 0; k <= 60000; ++k) {
    const double z = -30.0 + k * 1e-3;
    residual = std::max(residual, std::abs(u0_second(z) + f(u0(z))));
    for (double alpha : {0.5, 1.0, 2.0})
      source = std::max(source, std::abs(sqrt2 * alpha * u0_prime(z) + g(u0(z), {alpha, 1.05})));
  }
  const double energy = simpson([](double z) { return u0_prime(z) * u0_prime(z); }, -40.0, 40.0, 40000);
  const double energy_err = std::abs(energy - 1.0 / (6.0 * sqrt2));
  return {residual <= 1e-12 && source <= 1e-12 && energy_err <= 1e-8,
          fmt("residual %.2e, energy error %.2e, source identity %.2e", residual, energy_err, source)};
}

Verdict flow_identities() {
  // Five-point difference quotient in xi.
  const double h = 1e-3;
  double worst = 0.0;
  long points = 0;
  const std::vector<double> xis = {-0.45, -0.2, 0.1, 0.25, 0.38, 0.62, 0.75, 0.9, 1.15, 1.4};
  for (int a = 0; a < 10; ++a) {
    const double tau = 0.1 + a * 4.9 / 9.0;
    for (double xi : xis) {
      for (int c = 0; c < 10; ++c) {
        const double delta = -0.02 + c * 0.04 / 9.0;
        auto y = [&](double x) { return flow_Y(tau, x, delta); };
        const double fd = (y(xi - 2 * h) - 8 * y(xi - h) + 8 * y(xi + h) - y(xi + 2 * h)) / (12 * h);
        worst = std::max(worst, std::abs(flow_Y_xi(tau, xi, delta) - fd) / std::abs(fd));
        ++points;
      }
    }
  }
  double integral_err = 0.0;
  for (double delta : {-0.015, 0.0, 0.02})
    for (double xi : {-0.3, 0.6, 1.2}) {
      const double tau = 2.5;
      auto integrand = [&](double s) {
        const double y = flow_Y(s, xi, delta);
        return f_second(y) * f_delta(y, delta) / f_delta(xi, delta);
      };
      integral_err = std::max(integral_err, std::abs(amplification_A(tau, xi, delta) - simpson(integrand, 0.0, tau, 800)));
    }
  return {worst <= 1e-5 && integral_err <= 1e-6,
          fmt("%ld lattice points, worst relative error %.2e; integral form error %.2e", points, worst, integral_err)};
}

Verdict elliptic_solver() {
  const double gamma = 1.0;
  auto exact = [](double x, double y) { return std::cos(pi * x) * std::cos(2.0 * pi * y); };
  std::vector<std::pair<double, double>> samples;
  double mass_err = 0.0;
  long solves = 0;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int n : {64, 128, 256}) {
    Grid grid(n, n, 1.0, 1.0);
    HelmholtzSolver solver(grid, gamma);
    ScalarField rhs =
        ScalarField::from_function(grid, [&](double x, double y) { return (5.0 * pi * pi + gamma) * exact(x, y); });
    ScalarField v = solver.solve(rhs);
    ScalarField ref = ScalarField::from_function(grid, exact);
    double err = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) err = std::max(err, std::abs(v[k] - ref[k]));
    samples.emplace_back(grid.hx(), err);
    mass_err = std::max(mass_err, std::abs(gamma * integrate(v) - integrate(rhs)));
    ++solves;
    for (int r = 0; r < 3; ++r) {
      ScalarField noise(grid);
      for (std::size_t k = 0; k < noise.size(); ++k) noise[k] = unit(rng);
      mass_err = std::max(mass_err, std::abs(gamma * integrate(solver.solve(noise)) - integrate(noise)));
      ++solves;
    }
  }
  const double slope = fit_rate(samples).slope;
  return {std::abs(slope - 2.0) <= 0.2 && mass_err <= 1e-9,
          fmt("slope %.3f (errors %.2e, %.2e, %.2e); mass identity %.2e over %ld solves", slope, samples[0].second,
              samples[1].second, samples[2].second, mass_err, solves)};
}

// Worst relative deviation of the fitted radius from the reference at ten equally spaced times.
double circle_track(int n, double length, double r0, SharpParams p, double t_end,
                    const std::function<double(double)>& reference) {
  Grid grid(n, n, length, length);
  p.d0 = std::min(0.1 * length, 0.999 * (0.5 * length - r0) / 4.0);
  p.redistance_every = 25;
  SharpSolver solver(p, circle_distance(grid, 0.5 * length, 0.5 * length, r0));
  double worst = 0.0;
  for (int q = 1; q <= 10; ++q) {
    const double t = t_end * q / 10.0;
    solver.advance_to(t);
    CircleFit fit = fit_circle(extract_interface(solver.state().d, 0.0));
    worst = std::max(worst, std::abs(fit.mean_radius / reference(t) - 1.0));
  }
  return worst;
}

Verdict sharp_oracles() {
  SharpParams mcf;
  mcf.alpha = 0.0;
  // R = 0.1 is reached at t = 0.04.
  const double e_mcf = circle_track(256, 1.0, 0.3, mcf, 0.04, [](double t) { return std::sqrt(0.09 - 2.0 * t); });

  SharpParams stationary;
  stationary.alpha = 1.0;
  const double r_star = 1.0 / sqrt2;
  const double e_stat = circle_track(256, 2.0, r_star, stationary, 0.1, [&](double) { return r_star; });

  SharpParams drift;
  drift.alpha = 1.0;
  drift.chi.k = 1.0;
  // The radial problem lives on the disk with the same area as the square.
  RadialParams rp;
  rp.alpha = 1.0;
  rp.chi.k = 1.0;
  rp.r_out = 2.0 / std::sqrt(pi);
  RadialTrajectory tr = radial_oracle(0.5, rp, 0.1);
  const double e_drift = circle_track(256, 2.0, 0.5, drift, 0.1, [&](double t) { return tr.radius_at(t); });

  return {e_mcf <= 0.01 && e_stat <= 0.01 && e_drift <= 0.01,
          fmt("curvature flow %.2e, stationary radius %.2e, drift vs radial oracle %.2e", e_mcf, e_stat, e_drift)};
}

Verdict generation() {
  ExperimentConfig config = load_config(config_path("generation.ini"));
  GenerationOutcome o = run_generation(config);
  const GenerationReport& r = o.report;
  return {r.passed, fmt("min u %.4f, max u %.4f, u >= %.4f on %ld nodes, u <= %.4f on %ld nodes, M0 = %.3f, margin %.4f",
                        r.min_u, r.max_u, r.worst_upper, r.upper_nodes, r.worst_lower, r.lower_nodes, o.thresholds.M0,
                        r.margin)};
}

Verdict envelopes() {
  ExperimentConfig config = load_config(config_path("envelopes.ini"));
  GenerationOutcome o = run_generation(config);
  const bool gen_ok = o.generation_envelope.contained();
  const bool motion_ok = o.motion_checked && o.motion_envelope.contained();
  return {gen_ok && motion_ok && o.passed(),
          fmt("generation violation %.2e/%.2e with C6 = %g, slack %.2e; motion %s violation %.2e/%.2e with K = %g, L = %.3f",
              o.generation_envelope.max_lower_violation, o.generation_envelope.max_upper_violation, o.gen.C6, o.slack,
              o.motion_checked ? "checked," : "not checked,", o.motion_envelope.max_lower_violation,
              o.motion_envelope.max_upper_violation, o.motion.K, o.motion.L)};
}

const RateFit* find_fit(const CompareOutcome& o, const std::string& metric, double t) {
  for (const auto& f : o.fits)
    if (f.metric == metric && std::abs(f.t - t) < 1e-9) return &f;
  return nullptr;
}

Verdict thickness(const CompareOutcome& o) {
  const RateFit* fit = find_fit(o, "thickness", 0.1);
  if (!fit) return {false, "no thickness fit at t = 0.1"};
  bool ratios_ok = true;
  std::string ratios;
  for (const auto& [eps, value] : fit->fit.samples) {
    const double ratio = value / eps;
    ratios_ok = ratios_ok && ratio >= 5.3 && ratio <= 7.2;
    ratios += fmt(" %.3f", ratio);
  }
  const double slope = fit->fit.slope;
  return {std::abs(slope - 1.0) <= 0.25 && ratios_ok,
          fmt("slope %.3f; thickness/eps%s (analytic %.3f)", slope, ratios.c_str(), 2.0 * u0_inverse(0.1))};
}

Verdict hausdorff(const CompareOutcome& o) {
  bool ok = true;
  std::string text;
  for (double t : {0.05, 0.1}) {
    const RateFit* fit = find_fit(o, "hausdorff", t);
    if (!fit) return {false, fmt("no Hausdorff fit at t = %g", t)};
    ok = ok && std::abs(fit->fit.slope - 1.0) <= 0.3;
    text += fmt("slope %.3f at t = %g; ", fit->fit.slope, t);
  }
  double c_max = 0.0;
  text += "containment C";
  for (std::size_t k = 0; k < o.containment_C.size(); ++k) {
    ok = ok && std::isfinite(o.containment_C[k]);
    c_max = std::max(c_max, o.containment_C[k]);
    text += fmt(" %.3f (eps %g)", o.containment_C[k], o.members[k].eps);
  }
  text += fmt(", max %.3f", c_max);
  return {ok, text};
}

Verdict determinism() {
  ExperimentConfig config = load_config(config_path("generation.ini"));
  const fs::path base = fs::temp_directory_path() / ("chemolimit_acceptance_" + std::to_string(::getpid()));
  std::string csv[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = base / ("run" + std::to_string(k));
    fs::remove_all(dir);
    ManifestWriter out(dir.string());
    run_mode(config, out);
    out.finalize();
    csv[k] = read_file(dir / "metrics.csv");
  }
  fs::remove_all(base);
  const bool same = !csv[0].empty() && csv[0] == csv[1];
  return {same, fmt("metrics.csv %zu bytes, checksums %016llx and %016llx", csv[0].size(),
                    static_cast<unsigned long long>(fnv1a64(csv[0])), static_cast<unsigned long long>(fnv1a64(csv[1])))};
}

}  // namespace

int main() {
  report(1, "profile identities", 1.0, profile_identities);
  report(2, "flow identities", 30.0, flow_identities);
  report(3, "elliptic solver", 60.0, elliptic_solver);
  report(4, "sharp solver vs oracles", 300.0, sharp_oracles);
  report(5, "generation", 180.0, generation);
  report(6, "envelope containment", 300.0, envelopes);

  // Criteria 7 and 8 share one sweep, timed under criterion 7.
  CompareOutcome sweep;
  report(7, "thickness O(eps)", 1200.0, [&]() -> Verdict {
    sweep = run_compare(load_config(config_path("sweep.ini")));
    return thickness(sweep);
  });
  report(8, "Hausdorff O(eps)", 1200.0, [&]() -> Verdict {
    if (sweep.members.empty()) return {false, "sweep did not run"};
    return hausdorff(sweep);
  });
  report(9, "determinism", 600.0, determinism);
  return failures == 0 ? 0 : 1;
}
