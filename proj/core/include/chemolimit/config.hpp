#pragma once

#include <string>
#include <vector>

#include "chemolimit/diffuse.hpp"

namespace chemolimit {

enum class Mode { diffuse, sharp, compare, generation, profile_tools };

const char* mode_name(Mode mode);

/// Level-set settings used by the sharp and compare modes.
struct SharpSettings {
  double d0 = 0.0;          ///< cutoff radius; 0 selects 0.1 min(lx, ly), capped by the boundary margin
  int redistance_every = 5;
  double dt = 0.0;          ///< 0 selects the automatic stable step
  int nx = 0;               ///< 0 reuses the model grid
  int ny = 0;
};

/// Envelope and calibration settings used by the generation mode.
struct BoundsSettings {
  double c6 = 0.0;      ///< 0: calibrate on a doubling ladder
  double K = 0.0;       ///< 0: calibrate on a doubling ladder
  double L = 0.0;       ///< 0: (1/T) ln(d0 / (4 eps))
  double motion_d0 = 0.0;  ///< 0: the sharp cutoff radius
  double slack_h2 = 10.0;  ///< slack = slack_h2 h^2 + slack_dt dt
  double slack_dt = 1.0;
  bool motion = true;      ///< also check the motion stage on [t^eps, t_end]
  int checkpoints = 24;    ///< envelope checks per stage (plus the stage ends)
};

struct ExperimentConfig {
  Mode mode = Mode::compare;
  ModelParams model;
  InitialSpec initial;
  SharpSettings sharp;
  BoundsSettings bounds;
  std::vector<double> probes;  ///< probe times, all <= t_end
  std::vector<double> sweep;   ///< eps values; empty means the single model eps
  double h_over_eps = 0.0;     ///< > 0: each sweep member gets h <= h_over_eps * eps
  double dt_over_eps2 = 0.0;   ///< > 0: each sweep member gets dt = dt_over_eps2 * eps^2
  double dt_over_eps3 = 0.0;   ///< > 0: each sweep member gets dt = dt_over_eps3 * eps^3
  bool generation_probe = true;
  double eta = 0.1;
  std::string output = "out";
  int jobs = 1;

  /// eps values in run order (the sweep, or the model eps alone).
  std::vector<double> eps_values() const;
  /// Model parameters of one sweep member.
  ModelParams member(double eps) const;
  /// Throws ConfigError for inconsistent settings (line 0: not tied to a line).
  void validate() const;
};

/// Parses "key = value" lines grouped under [run], [model], [initial], [sharp] and [bounds].
/// '#' starts a comment. Unknown keys, malformed values and inconsistent settings throw
/// ConfigError carrying the line number.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(to_text(c)) reproduces c.
std::string to_text(const ExperimentConfig& config);

}  // namespace chemolimit
