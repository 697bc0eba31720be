#pragma once

#include <functional>
#include <string>
#include <vector>

#include "chemolimit/analysis.hpp"
#include "chemolimit/bounds.hpp"
#include "chemolimit/config.hpp"
#include "chemolimit/io.hpp"
#include "chemolimit/sharp.hpp"

namespace chemolimit {

using Logger = std::function<void(const std::string&)>;

/// Resolved sharp-interface parameters for a config (cutoff radius defaulted and capped).
SharpParams sharp_params(const ExperimentConfig& config, const Grid& grid);
/// Initial signed distance for the sharp problem, matching the diffuse initial interface.
ScalarField sharp_initial_distance(const ExperimentConfig& config, const Grid& grid);

struct DiffuseMember {
  double eps;
  std::vector<MetricsRow> rows;
  std::vector<std::pair<double, std::vector<Polyline>>> interfaces;
  std::vector<DiffuseState> snapshots;
  long steps = 0;
};

/// One diffuse run per eps (concurrently, config.jobs workers); rows at t = 0 and every probe.
/// Thickness is measured only once t >= t^eps.
std::vector<DiffuseMember> run_diffuse_sweep(const ExperimentConfig& config, const Logger& log = {});

struct SharpRun {
  SharpParams params;
  std::vector<SharpSnapshot> snapshots;  ///< t = 0 first, then the probes
  std::vector<std::pair<double, std::vector<Polyline>>> interfaces;
  long steps = 0;
};

SharpRun run_sharp_reference(const ExperimentConfig& config, const std::vector<double>& probes);

struct RateFit {
  std::string metric;
  double t;
  ConvergenceFit fit;
};

struct CompareOutcome {
  std::vector<DiffuseMember> members;
  SharpRun sharp;
  std::vector<RateFit> fits;
  std::vector<double> containment_C;  ///< per member: max over probes of sup_{Gamma^eps} dist(., Gamma) / eps
  std::vector<std::string> notices;
};

/// Diffuse sweep and sharp reference from matched interfaces; Hausdorff distance and thickness
/// at each probe; rate fits over the sweep at each positive probe time (skipped with a notice
/// for fewer than three eps values).
CompareOutcome run_compare(const ExperimentConfig& config, const Logger& log = {});

struct GenerationOutcome {
  double eps;
  double slack;
  GenerationConstants gen;
  MotionConstants motion;
  Thresholds thresholds;
  GenerationReport report;
  EnvelopeReport generation_envelope;
  bool motion_checked = false;
  EnvelopeReport motion_envelope;
  std::vector<MetricsRow> rows;
  ScalarField u0;
  ScalarField u_generation;  ///< u at t^eps
  ScalarField u_final;       ///< u at t_end (motion stage) or t^eps
  ScalarField d_final;       ///< sharp d at stage time t_end - t^eps (if the motion stage ran)
  std::vector<std::string> notices;
  bool passed() const;
};

/// Runs the model eps to t^eps, calibrates C6 (doubling ladder unless fixed), checks the
/// generation bounds and envelope containment, then optionally the motion stage on
/// [t^eps, t_end] with K calibrated on a doubling ladder (unless fixed).
GenerationOutcome run_generation(const ExperimentConfig& config, const Logger& log = {});

/// Writes the artifacts of a mode into the manifest writer and returns the exit status
/// (0 ok, 3 acceptance check failed). Numerical errors propagate.
int run_mode(const ExperimentConfig& config, ManifestWriter& out, const Logger& log = {});

/// Tables of U0, Y, the perturbed roots and the derived constants.
void write_profile_tools(const ExperimentConfig& config, ManifestWriter& out);

/// Rate plots, interface overlays and layer cross-sections for a compare outcome.
void emit_plots(const CompareOutcome& outcome, ManifestWriter& out);
/// Cross-section of u through the interface centre with the motion envelopes.
void emit_envelope_plot(const GenerationOutcome& outcome, const ExperimentConfig& config, ManifestWriter& out);

std::string eps_tag(double eps);

}  // namespace chemolimit
