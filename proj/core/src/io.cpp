#include "chemolimit/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "chemolimit/error.hpp"

namespace chemolimit {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format_snapshot(const ScalarField& field, double t, double eps) {
  const Grid& g = field.grid();
  std::string out;
  out.reserve(g.size() * 24 + 128);
  out += std::to_string(g.nx()) + " " + std::to_string(g.ny()) + " " + format_number(g.lx()) + " " +
         format_number(g.ly()) + " " + format_number(t) + " " + format_number(eps) + "\n";
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i) out += ' ';
      out += format_number(field(i, j));
    }
    out += '\n';
  }
  return out;
}

Snapshot parse_snapshot(const std::string& text) {
  std::istringstream in(text);
  int nx = 0, ny = 0;
  double lx = 0, ly = 0, t = 0, eps = 0;
  if (!(in >> nx >> ny >> lx >> ly >> t >> eps)) throw ConfigError("snapshot: malformed header", 1);
  Grid g(nx, ny, lx, ly);
  std::vector<double> values(g.size());
  for (auto& v : values)
    if (!(in >> v)) throw ConfigError("snapshot: too few values", 0);
  std::string extra;
  if (in >> extra) throw ConfigError("snapshot: trailing data", 0);
  return {ScalarField(g, std::move(values)), t, eps};
}

std::string format_metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "t,eps,hausdorff,thickness,min_u,max_u,interface_length\n";
  for (const auto& r : rows) {
    out += format_number(r.t) + "," + format_number(r.eps) + "," + format_number(r.hausdorff) + "," +
           format_number(r.thickness) + "," + format_number(r.min_u) + "," + format_number(r.max_u) + "," +
           format_number(r.interface_length) + "\n";
  }
  return out;
}

std::string format_polylines_csv(const std::vector<std::pair<double, std::vector<Polyline>>>& frames) {
  std::string out = "t,vertex_index,x,y\n";
  for (const auto& [t, lines] : frames) {
    long index = 0;
    for (const auto& line : lines)
      for (const auto& p : line.points)
        out += format_number(t) + "," + std::to_string(index++) + "," + format_number(p.x) + "," +
               format_number(p.y) + "\n";
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ManifestWriter::ManifestWriter(std::string directory) : dir_(std::move(directory)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir_ + "': " + ec.message(), 0);
}

void ManifestWriter::write(const std::string& relative_path, const std::string& content) {
  std::lock_guard<std::mutex> lock(mutex_);
  std::filesystem::path path = std::filesystem::path(dir_) / relative_path;
  std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream out(path, std::ios::binary);
    out << content;
    if (!out) throw NumericalError("cannot write '" + path.string() + "'");
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
  auto& files = manifest_.files;
  auto it = std::find_if(files.begin(), files.end(), [&](const ManifestFile& f) { return f.path == relative_path; });
  ManifestFile entry{relative_path, content.size(), hex};
  if (it == files.end()) files.push_back(entry);
  else *it = entry;
}

void ManifestWriter::set_config(const std::string& echo) {
  std::lock_guard<std::mutex> lock(mutex_);
  manifest_.config_echo = echo;
}

void ManifestWriter::constant(const std::string& name, double value) {
  std::lock_guard<std::mutex> lock(mutex_);
  manifest_.constants[name] = value;
}

void ManifestWriter::timing(const std::string& name, double seconds) {
  std::lock_guard<std::mutex> lock(mutex_);
  manifest_.timings.emplace_back(name, seconds);
}

void ManifestWriter::notice(const std::string& text) {
  std::lock_guard<std::mutex> lock(mutex_);
  manifest_.notices.push_back(text);
}

void ManifestWriter::set_status(const std::string& status) {
  std::lock_guard<std::mutex> lock(mutex_);
  manifest_.status = status;
}

RunManifest ManifestWriter::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return manifest_;
}

std::string ManifestWriter::finalize() {
  RunManifest m = snapshot();
  std::sort(m.files.begin(), m.files.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  std::sort(m.timings.begin(), m.timings.end());
  std::string text = manifest_json(m);
  std::ofstream out(std::filesystem::path(dir_) / "manifest.json", std::ios::binary);
  out << text;
  if (!out) throw NumericalError("cannot write manifest.json");
  return text;
}

std::string manifest_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["status"] = m.status;
  j["config"] = m.config_echo;
  nlohmann::ordered_json constants = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.constants) constants[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr;
  j["constants"] = constants;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& f : m.files) files.push_back({{"path", f.path}, {"bytes", f.bytes}, {"fnv1a64", f.checksum}});
  j["files"] = files;
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& [k, v] : m.timings) timings[k] = v;
  j["timings_seconds"] = timings;
  j["notices"] = m.notices;
  return j.dump(2) + "\n";
}

}  // namespace chemolimit
