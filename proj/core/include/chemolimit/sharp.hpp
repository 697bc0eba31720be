#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "chemolimit/chi.hpp"
#include "chemolimit/grid.hpp"
#include "chemolimit/helmholtz.hpp"

namespace chemolimit {

/// Cutoff zeta: identity on |s| <= 2 d0, +-3 d0 for |s| >= 3 d0, quintic C^2 blend between.
double zeta(double s, double d0);
double zeta_prime(double s, double d0);
ScalarField cutoff(const ScalarField& d_tilde, double d0);

/// Signed distance (negative where d < 0) to the zero level set of d, then the cutoff with
/// d0 = band / 2. The level set is represented by piecewise tensor-cubic interpolation of d
/// and closest points are found by Newton projection, propagated outward in distance order.
/// Throws NumericalError("interface vanished") if d does not change sign.
ScalarField redistance(const ScalarField& d, double band);

/// 1 where d < 0, else 0.
ScalarField step_field(const ScalarField& d);

struct SharpParams {
  double alpha = 1.0;
  double gamma = 1.0;
  ChiSpec chi{};
  double d0 = 0.1;
  int redistance_every = 5;
  double dt = 0.0;  ///< 0 selects 0.2 h^2 (reduced further if the drift CFL needs it)
  double helmholtz_tol = 1e-10;

  void validate() const;
};

struct LevelSetState {
  double t = 0.0;
  ScalarField d;
  double d0;
  ScalarField v0;
};

/// Helmholtz solve -Lap v + gamma v = step(d).
ScalarField solve_v0(const LevelSetState& state, double gamma, double tol = 1e-10);

/// Owns the solver caches for one level-set run.
class SharpSolver {
 public:
  /// With reinitialize, d_initial is redistanced and cut off first; otherwise it is adopted as is.
  SharpSolver(const SharpParams& params, const ScalarField& d_initial, double t0 = 0.0, bool reinitialize = true);

  const LevelSetState& state() const { return state_; }
  const SharpParams& params() const { return params_; }
  double dt() const { return dt_; }
  long steps() const { return steps_; }
  long v0_refreshes() const { return refreshes_; }

  /// One explicit step of length dt (<= the stable step). Throws NumericalError on CFL
  /// violation or if the interface vanishes.
  void step(double dt);
  /// Advance to t exactly.
  void advance_to(double t);

 private:
  void refresh_v0();

  SharpParams params_;
  LevelSetState state_;
  HelmholtzSolver helmholtz_;
  ScalarField step_;
  ScalarField chi_v0_;
  double dt_;
  long steps_ = 0;
  long refreshes_ = 0;
};

/// Free-function form: a single step with a fresh solver cache.
LevelSetState step_levelset(const LevelSetState& state, double dt, const SharpParams& params);

/// |x - c| - radius
ScalarField circle_distance(const Grid& grid, double cx, double cy, double radius);

struct SharpSnapshot {
  double t;
  ScalarField d;
};

/// Runs to t_end, returning d at each probe time (times landed exactly).
std::vector<SharpSnapshot> run_sharp(const SharpParams& params, const ScalarField& d_initial, double t_end,
                                     const std::vector<double>& probe_times,
                                     const std::function<void(const LevelSetState&)>& on_probe = {});

/// Parameters for the radially symmetric reference problem on a disk of radius r_out.
struct RadialParams {
  double alpha = 1.0;
  double gamma = 1.0;
  ChiSpec chi{};
  double r_out = 1.0;
};

struct RadialProfile {
  double v_at_r;   ///< v0(R)
  double dv_dr;    ///< d v0 / dr at R
  double v_center; ///< v0(0)
};

/// Radial solve of -v'' - v'/r + gamma v = 1_{r<R} on [0, r_out], v'(r_out) = 0.
RadialProfile radial_v0(double radius, double gamma, double r_out);
/// v0 at an arbitrary radius r from the same solve.
double radial_v0_at(double radius, double gamma, double r_out, double r);

struct RadialTrajectory {
  std::vector<double> t;
  std::vector<double> radius;
  std::vector<double> rate;
  bool collapsed = false;
  double collapse_time = 0.0;

  /// Cubic Hermite interpolation between the accepted steps.
  double radius_at(double time) const;
};

/// dR/dt = -1/R + d chi(v0)/dr (R) + sqrt(2) alpha with adaptive step control.
RadialTrajectory radial_oracle(double r0, const RadialParams& params, double t_end, double rel_tol = 1e-9);

}  // namespace chemolimit
