#include "chemolimit/kinetics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "chemolimit/error.hpp"

namespace chemolimit {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kEquilibriumCutoff = 1e-13;
constexpr double kStepTolerance = 1e-13;

void require_delta(double delta) {
  if (!(std::abs(delta) < delta_max())) throw DomainError("roots coalesce: |delta| >= delta_max");
}

double rk4(double y, double h, double delta) {
  double k1 = f_delta(y, delta);
  double k2 = f_delta(y + 0.5 * h * k1, delta);
  double k3 = f_delta(y + 0.5 * h * k2, delta);
  double k4 = f_delta(y + h * k3, delta);
  return y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
}

template <class Visit>
double integrate_flow(double tau, double xi, double delta, Visit&& visit) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("flow_Y: tau must be finite and >= 0");
  if (!std::isfinite(xi)) throw DomainError("flow_Y: xi must be finite");
  require_delta(delta);
  visit(0.0, xi);
  if (tau == 0.0 || std::abs(f_delta(xi, delta)) < kEquilibriumCutoff) {
    if (tau > 0.0) visit(tau, xi);
    return xi;
  }
  double s = 0.0, y = xi;
  double h = std::min(tau, 0.05);
  const double h_min = 1e-14 * std::max(1.0, tau);
  while (s < tau) {
    bool last = false;
    if (s + h >= tau) {
      h = tau - s;
      last = true;
    }
    double full = rk4(y, h, delta);
    double half = rk4(rk4(y, 0.5 * h, delta), 0.5 * h, delta);
    double err = std::abs(half - full) / 15.0;
    double scale = std::max(1.0, std::abs(y));
    if (err <= kStepTolerance * scale) {
      y = half + (half - full) / 15.0;
      s = last ? tau : s + h;
      visit(s, y);
      double grow = err > 0.0 ? 0.9 * std::pow(kStepTolerance * scale / err, 0.2) : 4.0;
      h *= std::clamp(grow, 0.2, 4.0);
    } else {
      h *= std::clamp(0.9 * std::pow(kStepTolerance * scale / err, 0.2), 0.1, 0.9);
      if (h < h_min) throw NumericalError("flow_Y: step size underflow", err);
    }
  }
  return y;
}

}  // namespace

void BistableSpec::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
  if (!(c0 > 1.0) || !std::isfinite(c0)) throw DomainError("c0 must exceed 1");
}

double f(double u) { return u * (1.0 - u) * (u - 0.5); }
double f_prime(double u) { return -3.0 * u * u + 3.0 * u - 0.5; }
double f_second(double u) { return -6.0 * u + 3.0; }
double g(double u, const BistableSpec& spec) { return spec.alpha * u * (1.0 - u); }
double f_eps(double u, double eps, const BistableSpec& spec) { return f(u) + eps * g(u, spec); }
double f_delta(double u, double delta) { return f(u) + delta; }

double delta_max() { return std::numbers::sqrt3 / 36.0; }

PerturbedRoots perturbed_roots(double delta) {
  require_delta(delta);
  // u = t + 1/2 turns f + delta = 0 into t^3 - t/4 - delta = 0.
  const double r = 1.0 / std::numbers::sqrt3;
  const double phi = std::acos(std::clamp(12.0 * std::numbers::sqrt3 * delta, -1.0, 1.0)) / 3.0;
  std::array<double, 3> u{};
  for (int k = 0; k < 3; ++k) u[k] = 0.5 + r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0);
  std::sort(u.begin(), u.end());
  for (double& x : u) {
    for (int it = 0; it < 2; ++it) {
      double d = f_prime(x);
      if (d != 0.0) x -= f_delta(x, delta) / d;
    }
  }
  return {u[0], u[1], u[2], f_prime(u[1])};
}

double u0(double z) { return 0.5 * (1.0 - std::tanh(z / (2.0 * kSqrt2))); }

double u0_prime(double z) {
  double s = 1.0 / std::cosh(z / (2.0 * kSqrt2));
  return -s * s / (4.0 * kSqrt2);
}

double u0_second(double z) {
  // U0'' = -f(U0) = U0'(1 - 2U0)/sqrt(2) written without cancellation.
  double t = std::tanh(z / (2.0 * kSqrt2));
  return -u0_prime(z) * t / kSqrt2;
}

double u0_inverse(double level) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("u0_inverse: level must lie in (0, 1)");
  return 2.0 * kSqrt2 * std::atanh(1.0 - 2.0 * level);
}

const ProfileDecay& profile_decay() {
  static const ProfileDecay decay = [] {
    const double lambda = 1.0 / kSqrt2;
    double c = 0.0;
    for (int k = 0; k <= 60000; ++k) {
      double z = k * 1e-3;
      double e = std::exp(lambda * z);
      c = std::max(c, u0(z) * e);
      c = std::max(c, (std::abs(u0_prime(z)) + std::abs(u0_second(z))) * e);
    }
    return ProfileDecay{lambda, c};
  }();
  return decay;
}

double flow_Y(double tau, double xi, double delta) {
  return integrate_flow(tau, xi, delta, [](double, double) {});
}

std::vector<std::pair<double, double>> flow_Y_trajectory(double tau, double xi, double delta) {
  std::vector<std::pair<double, double>> out;
  integrate_flow(tau, xi, delta, [&](double s, double y) { out.emplace_back(s, y); });
  return out;
}

double flow_Y_xi(double tau, double xi, double delta) {
  double fx = f_delta(xi, delta);
  if (std::abs(fx) < kEquilibriumCutoff)
    throw DomainError("derivative identity undefined at equilibrium");
  return f_delta(flow_Y(tau, xi, delta), delta) / fx;
}

double amplification_A(double tau, double xi, double delta) {
  double fx = f_delta(xi, delta);
  if (std::abs(fx) < kEquilibriumCutoff)
    throw DomainError("derivative identity undefined at equilibrium");
  return (f_prime(flow_Y(tau, xi, delta)) - f_prime(xi)) / fx;
}

FlowTable::FlowTable(double tau, double delta, double xi_min, double xi_max, int intervals)
    : tau_(tau), delta_(delta), xi_min_(xi_min), xi_max_(xi_max) {
  if (!(xi_max > xi_min) || intervals < 2) throw DomainError("FlowTable: empty range");
  step_ = (xi_max - xi_min) / intervals;
  y_.resize(intervals + 1);
  dy_.resize(intervals + 1);
  for (int k = 0; k <= intervals; ++k) {
    double xi = xi_min + k * step_;
    double y = flow_Y(tau, xi, delta);
    double fx = f_delta(xi, delta);
    y_[k] = y;
    // At (near) an equilibrium the slope tends to exp(f'(xi) tau).
    dy_[k] = std::abs(fx) > 1e-7 ? f_delta(y, delta) / fx : std::exp(f_prime(xi) * tau);
  }
}

double FlowTable::operator()(double xi) const {
  if (xi < xi_min_ || xi > xi_max_) throw DomainError("FlowTable: argument outside tabulated range");
  const int last = static_cast<int>(y_.size()) - 1;
  int k = std::min(static_cast<int>((xi - xi_min_) / step_), last - 1);
  double t = (xi - (xi_min_ + k * step_)) / step_;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * y_[k] + h10 * step_ * dy_[k] + h01 * y_[k + 1] + h11 * step_ * dy_[k + 1];
}

}  // namespace chemolimit
