#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "chemolimit/analysis.hpp"
#include "chemolimit/grid.hpp"

namespace chemolimit {

/// Header line "nx ny lx ly t eps", then ny rows of nx values (row j = fixed y).
std::string format_snapshot(const ScalarField& field, double t, double eps);

struct Snapshot {
  ScalarField field;
  double t;
  double eps;
};
/// Inverse of format_snapshot. Throws ConfigError on malformed input.
Snapshot parse_snapshot(const std::string& text);

struct MetricsRow {
  double t;
  double eps;
  double hausdorff;  ///< NaN when not measured
  double thickness;  ///< NaN when not measured
  double min_u;
  double max_u;
  double interface_length;
};

/// Header "t,eps,hausdorff,thickness,min_u,max_u,interface_length"; NaN is written as "nan".
std::string format_metrics_csv(const std::vector<MetricsRow>& rows);

/// Header "t,vertex_index,x,y"; vertices are numbered consecutively across the lines of a frame.
std::string format_polylines_csv(const std::vector<std::pair<double, std::vector<Polyline>>>& frames);

/// Shortest round-tripping decimal form ("%.17g"), "nan" for NaN.
std::string format_number(double value);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);

struct ManifestFile {
  std::string path;  ///< relative to the output directory
  std::uint64_t bytes;
  std::string checksum;  ///< fnv1a64, 16 hex digits
};

struct RunManifest {
  std::string config_echo;
  std::map<std::string, double> constants;
  std::vector<ManifestFile> files;
  std::vector<std::pair<std::string, double>> timings;  ///< seconds
  std::vector<std::string> notices;
  std::string status = "ok";
};

/// Writes artifacts into one output directory and records them. All methods are thread-safe;
/// this is the only place that touches the output directory.
class ManifestWriter {
 public:
  /// Creates the directory if needed.
  explicit ManifestWriter(std::string directory);

  const std::string& directory() const { return dir_; }
  /// Writes (or overwrites) a file and records its checksum.
  void write(const std::string& relative_path, const std::string& content);
  void set_config(const std::string& echo);
  void constant(const std::string& name, double value);
  void timing(const std::string& name, double seconds);
  void notice(const std::string& text);
  void set_status(const std::string& status);
  RunManifest snapshot() const;
  /// Writes manifest.json (files sorted by path) and returns its content.
  std::string finalize();

 private:
  std::string dir_;
  mutable std::mutex mutex_;
  RunManifest manifest_;
};

std::string manifest_json(const RunManifest& manifest);

}  // namespace chemolimit
