#pragma once

#include <utility>
#include <vector>

namespace chemolimit {

/// Growth imbalance alpha and the a-priori bound c0 on the initial datum.
struct BistableSpec {
  double alpha = 1.0;
  double c0 = 1.05;

  /// Throws DomainError unless alpha > 0 and c0 > 1.
  void validate() const;
};

// f(u) = u(1-u)(u-1/2) and its derivatives.
double f(double u);
double f_prime(double u);
double f_second(double u);

/// g(u) = alpha u (1 - u)
double g(double u, const BistableSpec& spec);
/// f(u) + eps g(u)
double f_eps(double u, double eps, const BistableSpec& spec);
/// f(u) + delta
double f_delta(double u, double delta);

/// Largest |delta| for which f + delta keeps three real zeros (sqrt(3)/36).
double delta_max();

struct PerturbedRoots {
  double alpha_minus;
  double a;
  double alpha_plus;
  double mu_delta;  ///< f'(a)
};

/// Zeros of f + delta in increasing order. Throws DomainError("roots coalesce") for
/// |delta| >= delta_max().
PerturbedRoots perturbed_roots(double delta);

// Travelling-front profile U0(z) = (1 - tanh(z / (2 sqrt 2))) / 2.
double u0(double z);
double u0_prime(double z);
double u0_second(double z);
/// The z with U0(z) = level, level in (0, 1).
double u0_inverse(double level);

/// Exponential decay data: U0(z), 1 - U0(-z), |U0'| + |U0''| are all <= c exp(-lambda |z|) for z >= 0.
struct ProfileDecay {
  double lambda;
  double c;
};
const ProfileDecay& profile_decay();

/// Solution of Y' = f_delta(Y), Y(0) = xi, at time tau (adaptive RK4, step doubling).
double flow_Y(double tau, double xi, double delta);

/// Accepted (s, Y(s)) pairs along the same integration, starting with (0, xi).
std::vector<std::pair<double, double>> flow_Y_trajectory(double tau, double xi, double delta);

/// dY/dxi = f_delta(Y) / f_delta(xi). Throws DomainError at an equilibrium.
double flow_Y_xi(double tau, double xi, double delta);

/// A = (f'(Y) - f'(xi)) / f_delta(xi) = Y_xixi / Y_xi.
double amplification_A(double tau, double xi, double delta);

/// Y(tau, . ; delta) tabulated on a uniform xi grid, cubic Hermite in between using
/// the exact slope identity. For evaluating the flow at many field values.
class FlowTable {
 public:
  FlowTable(double tau, double delta, double xi_min, double xi_max, int intervals = 4096);
  double operator()(double xi) const;
  double xi_min() const { return xi_min_; }
  double xi_max() const { return xi_max_; }

 private:
  double tau_, delta_, xi_min_, xi_max_, step_;
  std::vector<double> y_, dy_;
};

}  // namespace chemolimit
