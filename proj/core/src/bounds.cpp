#include "chemolimit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "chemolimit/error.hpp"

namespace chemolimit {

GenerationConstants derive_generation_constants(const BistableSpec& spec, double c6) {
  spec.validate();
  if (!(c6 > 0.0)) throw DomainError("C6 must be positive");
  // |u(1-u)| on [-2c0, 2c0] peaks at the left end: 2c0 (1 + 2c0).
  const double c0 = spec.c0;
  return {spec.alpha * 2.0 * c0 * (1.0 + 2.0 * c0), c6, 0.25, c0};
}

double generation_r(const GenerationConstants& consts, double delta, double tau) {
  return consts.C6 * (std::exp(perturbed_roots(delta).mu_delta * tau) - 1.0);
}

EnvelopePair generation_envelope(const ScalarField& u0_field, double t, double eps, const GenerationConstants& consts) {
  const double t_gen = 4.0 * eps * eps * std::abs(std::log(eps));
  if (!(t >= 0.0) || t > t_gen * (1.0 + 1e-12)) throw DomainError("generation_envelope: t outside [0, t^eps]");
  const double delta = eps * consts.G;
  if (!(delta < delta_max())) throw DomainError("roots coalesce: eps G >= delta_max");
  const double lim = 2.0 * consts.c0;
  const double lo_u = u0_field.min(), hi_u = u0_field.max();
  if (!(lo_u > -lim && hi_u < lim)) throw DomainError("generation_envelope: u0 outside (-2 c0, 2 c0)");
  EnvelopePair out{u0_field, u0_field};
  if (t == 0.0) return out;
  const double tau = t / (eps * eps);
  const double shift_up = eps * eps * generation_r(consts, delta, tau);
  const double shift_down = eps * eps * generation_r(consts, -delta, tau);
  if (!(hi_u + shift_up < lim) || !(lo_u - shift_down > -lim))
    throw DomainError("generation_envelope: shifted argument leaves (-2 c0, 2 c0)");
  const double pad = 1e-9;
  FlowTable upper(tau, delta, lo_u + shift_up - pad, hi_u + shift_up + pad, 1024);
  FlowTable lower(tau, -delta, lo_u - shift_down - pad, hi_u - shift_down + pad, 1024);
  for (std::size_t k = 0; k < u0_field.size(); ++k) {
    out.upper[k] = upper(u0_field[k] + shift_up);
    out.lower[k] = lower(u0_field[k] - shift_down);
  }
  return out;
}

double MotionConstants::p(double t, double eps) const {
  return -std::exp(-beta * t / (eps * eps)) + std::exp(L * t) + K;
}

double MotionConstants::q(double t, double eps) const {
  return sigma * (beta * std::exp(-beta * t / (eps * eps)) + eps * eps * L * std::exp(L * t));
}

double bistable_sup_F() {
  auto F = [](double u) { return std::abs(f(u)) + std::abs(f_prime(u)) + std::abs(f_second(u)); };
  const int n = 30000;
  double best = -1.0, arg = -1.0;
  for (int k = 0; k <= n; ++k) {
    double u = -1.0 + 3.0 * k / n;
    double v = F(u);
    if (v > best) best = v, arg = u;
  }
  // Golden-section refinement around the best sample.
  double a = std::max(-1.0, arg - 3.0 / n), b = std::min(2.0, arg + 3.0 / n);
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 80; ++it) {
    double c = b - r * (b - a), d = a + r * (b - a);
    if (F(c) > F(d)) b = d;
    else a = c;
  }
  return std::max(best, F(0.5 * (a + b)));
}

MotionConstants derive_motion_constants(double eta) {
  if (!(eta > 0.0 && eta < 0.25)) throw DomainError("eta must lie in (0, 1/4)");
  const double F = bistable_sup_F();
  const double b_crit = (3.0 - std::numbers::sqrt3) / 6.0;  // f'(b_crit) = 0
  MotionConstants best{};
  double best_score = -1.0;
  const int n = 4000;
  for (int k = 1; k < n; ++k) {
    MotionConstants c{};
    c.eta = eta;
    c.F = F;
    c.b = b_crit * k / n;
    // f' increases on [0, 1/2] and is symmetric about 1/2.
    c.m = -f_prime(c.b);
    // -U0' = U0 (1 - U0) / sqrt2 is smallest at the ends of {U0 in [b, 1 - b]}.
    c.a1 = c.b * (1.0 - c.b) / std::numbers::sqrt2;
    c.beta = c.m / 4.0;
    c.sigma0 = c.a1 / (c.m + F);
    c.sigma1 = 1.0 / (c.beta + 1.0);
    c.sigma2 = 4.0 * c.beta / (F * (c.beta + 1.0));
    c.sigma = std::min({c.sigma0, c.sigma1, c.sigma2, eta / (3.0 * c.beta)});
    double score = c.sigma * c.beta;
    if (score > best_score) best_score = score, best = c;
  }
  return best;
}

double profile_inequality_margin(const MotionConstants& c) {
  double worst = std::numeric_limits<double>::infinity();
  const int n = 10000;
  for (int k = 0; k <= n; ++k) {
    double z = -40.0 + 80.0 * k / n;
    worst = std::min(worst, -u0_prime(z) - c.sigma * f_prime(u0(z)) - 4.0 * c.sigma * c.beta);
  }
  return worst;
}

double default_L(double T, double d0, double eps0) {
  if (!(T > 0.0) || !(d0 > 0.0) || !(eps0 > 0.0)) throw DomainError("default_L: arguments must be positive");
  return std::log(d0 / (4.0 * eps0)) / T;
}

EnvelopePair motion_envelope(const ScalarField& d, double t, double eps, const MotionConstants& c) {
  if (std::exp(c.L * c.T) + c.K > c.d0 / (2.0 * eps)) throw DomainError("epsilon too large for (K, L, d0)");
  if (!(t >= 0.0) || t > c.T * (1.0 + 1e-12)) throw DomainError("motion_envelope: t outside [0, T]");
  const double shift = eps * c.p(t, eps);
  const double q = c.q(t, eps);
  EnvelopePair out{ScalarField(d.grid()), ScalarField(d.grid())};
  for (std::size_t k = 0; k < d.size(); ++k) {
    out.lower[k] = u0((d[k] + shift) / eps) - q;
    out.upper[k] = u0((d[k] - shift) / eps) + q;
  }
  return out;
}

void EnvelopeReport::absorb(const EnvelopeReport& other) {
  max_lower_violation = std::max(max_lower_violation, other.max_lower_violation);
  max_upper_violation = std::max(max_upper_violation, other.max_upper_violation);
  for (const auto& v : other.violations) {
    if (violations.size() >= max_listed) break;
    violations.push_back(v);
  }
}

EnvelopeReport check_envelope(const ScalarField& u, const ScalarField& lower, const ScalarField& upper, double slack,
                              double t) {
  require_same_grid(u.grid(), lower.grid(), "check_envelope");
  require_same_grid(u.grid(), upper.grid(), "check_envelope");
  const Grid& g = u.grid();
  EnvelopeReport report;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double below = lower(i, j) - slack - u(i, j);
      const double above = u(i, j) - upper(i, j) - slack;
      if (below > 0.0) {
        report.max_lower_violation = std::max(report.max_lower_violation, below);
        if (report.violations.size() < EnvelopeReport::max_listed) report.violations.push_back({i, j, t, below, false});
      }
      if (above > 0.0) {
        report.max_upper_violation = std::max(report.max_upper_violation, above);
        if (report.violations.size() < EnvelopeReport::max_listed) report.violations.push_back({i, j, t, above, true});
      }
    }
  }
  return report;
}

double fit_C7(double eta, double eps, const GenerationConstants& gen) {
  const double tau = std::abs(std::log(eps)) / gen.mu;
  const double delta = eps * gen.G;
  const double c_max = (2.0 * gen.c0 - 0.5) / eps * (1.0 - 1e-9);
  double worst = 0.0;
  for (double sign : {1.0, -1.0}) {
    for (bool upper : {true, false}) {
      auto ok = [&](double c) {
        double xi = upper ? 0.5 + c * eps : 0.5 - c * eps;
        double y = flow_Y(tau, xi, sign * delta);
        return upper ? y >= 1.0 - eta : y <= eta;
      };
      if (!ok(c_max)) throw DomainError("fit_C7: no admissible C7 for this eps");
      double lo = 0.0, hi = c_max;
      if (ok(lo)) continue;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
      }
      worst = std::max(worst, hi);
    }
  }
  return worst;
}

Thresholds fit_thresholds(double eta, double eps, const GenerationConstants& gen, const MotionConstants& motion,
                          const ScalarField& u0_field, const ScalarField& d0_field) {
  require_same_grid(u0_field.grid(), d0_field.grid(), "fit_thresholds");
  Thresholds th{};
  th.C7 = fit_C7(eta, eps, gen);
  // Exact shift at the end of the generation stage; asymptotically within (C6/2, 3 C6/2) eps.
  const double tau = std::abs(std::log(eps)) / gen.mu;
  const double shift = eps * std::max(generation_r(gen, eps * gen.G, tau), generation_r(gen, -eps * gen.G, tau));
  th.M0 = th.C7 + shift;
  double m1 = 0.0;
  for (std::size_t k = 0; k < u0_field.size(); ++k) {
    const double d = d0_field[k], u = u0_field[k];
    if (d > 0.0 && u > 0.5 - th.M0 * eps) m1 = std::max(m1, d / eps);
    if (d < 0.0 && u < 0.5 + th.M0 * eps) m1 = std::max(m1, -d / eps);
  }
  th.M1 = std::nextafter(m1, std::numeric_limits<double>::infinity());
  th.K_profile = th.M1 - u0_inverse(1.0 - motion.sigma * motion.beta / 3.0);
  th.C = std::exp(motion.L * motion.T) + motion.K + 2.0 * std::numbers::sqrt2 * std::atanh(1.0 - eta);
  return th;
}

}  // namespace chemolimit
