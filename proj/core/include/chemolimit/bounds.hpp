#pragma once

#include <string>
#include <vector>

#include "chemolimit/grid.hpp"
#include "chemolimit/kinetics.hpp"

namespace chemolimit {

struct GenerationConstants {
  double G;          ///< sup |g| on [-2 c0, 2 c0]
  double C6 = 1.0;   ///< growth constant of r
  double mu = 0.25;  ///< f'(1/2)
  double c0;
};

GenerationConstants derive_generation_constants(const BistableSpec& spec, double c6 = 1.0);

/// r(delta, tau) = C6 (exp(mu(delta) tau) - 1)
double generation_r(const GenerationConstants& consts, double delta, double tau);

struct EnvelopePair {
  ScalarField lower;
  ScalarField upper;
};

/// Y(t/eps^2, u0 +- eps^2 r(+-eps G, t/eps^2); +-eps G). Requires t <= 4 eps^2 |ln eps|;
/// throws DomainError if eps G reaches delta_max or a shifted value leaves (-2 c0, 2 c0).
EnvelopePair generation_envelope(const ScalarField& u0, double t, double eps, const GenerationConstants& consts);

struct MotionConstants {
  double eta;
  double b;
  double m;
  double a1;
  double F;
  double beta;
  double sigma0;
  double sigma1;
  double sigma2;
  double sigma;
  double K = 2.0;
  double L = 1.0;
  double d0 = 0.1;
  double T = 0.1;  ///< horizon of the motion stage (time measured from its start)

  double p(double t, double eps) const;
  double q(double t, double eps) const;
};

/// sup over u in [-1, 2] of |f| + |f'| + |f''| (dense sampling plus golden-section refinement).
double bistable_sup_F();

/// m, b, a1, F, beta, sigma for the given eta. b is chosen in (0, (3 - sqrt 3)/6) to maximise
/// sigma * beta, and sigma is additionally capped so that sigma * beta <= eta / 3.
MotionConstants derive_motion_constants(double eta);

/// min over z in [-40, 40] (10^4 samples) of -U0'(z) - sigma f'(U0(z)) - 4 sigma beta.
double profile_inequality_margin(const MotionConstants& consts);

/// (1/T) ln(d0 / (4 eps0))
double default_L(double T, double d0, double eps0);

/// U0((d -+ eps p)/eps) +- q at stage time t (t = 0 is the start of the motion stage).
/// Throws DomainError("epsilon too large for (K, L, d0)") if exp(L T) + K > d0 / (2 eps).
EnvelopePair motion_envelope(const ScalarField& d, double t, double eps, const MotionConstants& consts);

struct EnvelopeViolation {
  int i;
  int j;
  double t;
  double amount;
  bool upper;
};

struct EnvelopeReport {
  double max_lower_violation = 0.0;
  double max_upper_violation = 0.0;
  std::vector<EnvelopeViolation> violations;  ///< at most max_listed entries

  bool contained() const { return max_lower_violation == 0.0 && max_upper_violation == 0.0; }
  /// Merge another report (e.g. from a later time).
  void absorb(const EnvelopeReport& other);

  static constexpr std::size_t max_listed = 32;
};

/// Violations beyond slack: max(0, lower - slack - u) and max(0, u - upper - slack).
EnvelopeReport check_envelope(const ScalarField& u, const ScalarField& lower, const ScalarField& upper,
                              double slack, double t = 0.0);

struct Thresholds {
  double C7;       ///< Y(|ln eps|/mu, 1/2 +- C7 eps; +-eps G) lands in [1 - eta, ...] / [..., eta]
  double M0;       ///< C7 + max eps r(+-eps G, |ln eps|/mu): within (C7 + C6/2, C7 + 3 C6/2) for small eps
  double M1;       ///< smallest M1 with |d0| >= M1 eps => |u0 - 1/2| >= M0 eps on the correct side
  double K_profile;///< smallest K with U0(M1 - K) >= 1 - sigma beta / 3
  double C;        ///< exp(L T) + K + 2 sqrt2 artanh(1 - eta)
};

/// Smallest C7 (bisection) for which the flow after |ln eps|/mu maps 1/2 + C7 eps above 1 - eta and
/// 1/2 - C7 eps below eta, for both delta = +-eps G.
double fit_C7(double eta, double eps, const GenerationConstants& gen);

Thresholds fit_thresholds(double eta, double eps, const GenerationConstants& gen, const MotionConstants& motion,
                          const ScalarField& u0, const ScalarField& d0_field);

}  // namespace chemolimit
