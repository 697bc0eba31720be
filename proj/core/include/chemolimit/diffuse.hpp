#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chemolimit/chi.hpp"
#include "chemolimit/grid.hpp"
#include "chemolimit/helmholtz.hpp"
#include "chemolimit/kinetics.hpp"
#include "chemolimit/operators.hpp"

namespace chemolimit {

struct ModelParams {
  double eps = 0.02;
  double alpha = 1.0;
  double c0 = 1.05;
  double gamma = 1.0;
  ChiSpec chi{};
  int nx = 129;
  int ny = 129;
  double lx = 1.0;
  double ly = 1.0;
  double dt = 0.0;  ///< 0 selects 0.1 eps^2
  double t_end = 0.1;
  FaceAverage drift_average = FaceAverage::centered;
  double helmholtz_tol = 1e-10;

  Grid grid() const { return Grid(nx, ny, lx, ly); }
  BistableSpec bistable() const { return {alpha, c0}; }
  double time_step() const { return dt > 0.0 ? dt : 0.1 * eps * eps; }
  /// Throws DomainError for eps outside (0, 0.2], dt above 0.2 eps^2, and invalid coefficients.
  void validate() const;
};

/// 4 eps^2 |ln eps|, the end of the generation stage (1/mu = 4).
double generation_time(double eps);

struct InitialSpec {
  enum class Kind { prepared, unprepared, custom };
  Kind kind = Kind::unprepared;
  double cx = 0.5;
  double cy = 0.5;
  double radius = 0.25;
  double width = 0.1;      ///< unprepared tanh width w
  double amplitude = 0.4;  ///< unprepared tanh amplitude
  double d0 = 0.0;         ///< cutoff radius; 0 selects the default
  std::string expression;  ///< custom u0(x, y)
};

/// 0.1 min(lx, ly), reduced so that the 4 d0 margin to the boundary holds.
double default_cutoff_radius(const InitialSpec& spec, const Grid& grid);
/// Resolved cutoff radius (spec.d0 or the default). Throws DomainError if the interface is
/// closer than 4 d0 to the boundary.
double cutoff_radius(const InitialSpec& spec, const Grid& grid);

/// Cutoff signed distance to the initial interface.
ScalarField initial_distance(const InitialSpec& spec, const Grid& grid);

/// prepared: U0(d/eps); unprepared: 1/2 - A tanh(d/w) with the cutoff distance d; custom: the
/// expression, which must be flat at the boundary.
ScalarField initial_data(const InitialSpec& spec, const ModelParams& params);

struct DiffuseState {
  double t = 0.0;
  ScalarField u;
  ScalarField v;
};

/// Owns the spectral solver caches of one run.
class DiffuseStepper {
 public:
  explicit DiffuseStepper(const ModelParams& params);
  ~DiffuseStepper();

  const ModelParams& params() const { return params_; }
  /// State with v solved from u.
  DiffuseState initial_state(const ScalarField& u0);
  /// One IMEX step of length dt. Throws NumericalError("blow-up guard tripped").
  void step(DiffuseState& state, double dt);
  void step(DiffuseState& state) { step(state, params_.time_step()); }

 private:
  HelmholtzSolver& implicit_solver(double dt);

  ModelParams params_;
  HelmholtzSolver elliptic_;
  std::vector<std::pair<double, std::unique_ptr<HelmholtzSolver>>> implicit_;
};

/// One step with fresh solver caches.
DiffuseState step(const DiffuseState& state, const ModelParams& params);

struct DiffuseRecord {
  double t;
  double min_u;
  double max_u;
  double mass_u;
  double mass_v;
  double elliptic_residual;
};

struct RunOptions {
  std::vector<double> probe_times;
  bool generation_probe = false;
  bool keep_snapshots = true;
  std::function<void(const DiffuseState&)> on_probe;
};

struct DiffuseTrajectory {
  std::vector<DiffuseRecord> records;  ///< initial state, then one per probe
  std::vector<DiffuseState> snapshots; ///< probe states (if kept)
  long steps = 0;
  std::optional<DiffuseState> final_state;
};

/// Advances to t_end. Lands exactly on t_end and, with the generation probe, on
/// generation_time(eps); other probe times are rounded to the nearest step.
DiffuseTrajectory run_diffuse(const ModelParams& params, const ScalarField& u0, const RunOptions& options = {});

}  // namespace chemolimit
