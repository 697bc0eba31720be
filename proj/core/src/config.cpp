#include "chemolimit/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "chemolimit/error.hpp"
#include "chemolimit/expression.hpp"

namespace chemolimit {

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::diffuse: return "diffuse";
    case Mode::sharp: return "sharp";
    case Mode::compare: return "compare";
    case Mode::generation: return "generation";
    case Mode::profile_tools: return "profile-tools";
  }
  return "?";
}

std::vector<double> ExperimentConfig::eps_values() const {
  return sweep.empty() ? std::vector<double>{model.eps} : sweep;
}

ModelParams ExperimentConfig::member(double eps) const {
  ModelParams p = model;
  p.eps = eps;
  if (h_over_eps > 0.0) {
    double h = h_over_eps * eps;
    p.nx = std::max(p.nx, static_cast<int>(std::ceil(p.lx / h - 1e-9)) + 1);
    p.ny = std::max(p.ny, static_cast<int>(std::ceil(p.ly / h - 1e-9)) + 1);
  }
  if (dt_over_eps2 > 0.0) p.dt = dt_over_eps2 * eps * eps;
  if (dt_over_eps3 > 0.0) p.dt = dt_over_eps3 * eps * eps * eps;
  return p;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& v, int line) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size() || !std::isfinite(out)) throw ConfigError("not a number: '" + v + "'", line);
  return out;
}

int to_int(const std::string& v, int line) {
  double d = to_double(v, line);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError("not an integer: '" + v + "'", line);
  return static_cast<int>(d);
}

bool to_bool(const std::string& v, int line) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("not a boolean: '" + v + "'", line);
}

std::vector<double> to_list(const std::string& v, int line) {
  std::string s = v;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream in(s);
  std::vector<double> out;
  for (std::string tok; in >> tok;) out.push_back(to_double(tok, line));
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.mode",
       [](ExperimentConfig& c, const std::string& v, int line) {
         if (v == "diffuse") c.mode = Mode::diffuse;
         else if (v == "sharp") c.mode = Mode::sharp;
         else if (v == "compare") c.mode = Mode::compare;
         else if (v == "generation") c.mode = Mode::generation;
         else if (v == "profile-tools") c.mode = Mode::profile_tools;
         else throw ConfigError("unknown mode '" + v + "'", line);
       }},
      {"run.output", [](ExperimentConfig& c, const std::string& v, int) { c.output = v; }},
      {"run.jobs", [](ExperimentConfig& c, const std::string& v, int l) { c.jobs = to_int(v, l); }},
      {"run.probes", [](ExperimentConfig& c, const std::string& v, int l) { c.probes = to_list(v, l); }},
      {"run.sweep", [](ExperimentConfig& c, const std::string& v, int l) { c.sweep = to_list(v, l); }},
      {"run.h_over_eps", [](ExperimentConfig& c, const std::string& v, int l) { c.h_over_eps = to_double(v, l); }},
      {"run.dt_over_eps2", [](ExperimentConfig& c, const std::string& v, int l) { c.dt_over_eps2 = to_double(v, l); }},
      {"run.dt_over_eps3", [](ExperimentConfig& c, const std::string& v, int l) { c.dt_over_eps3 = to_double(v, l); }},
      {"run.generation_probe",
       [](ExperimentConfig& c, const std::string& v, int l) { c.generation_probe = to_bool(v, l); }},
      {"run.eta", [](ExperimentConfig& c, const std::string& v, int l) { c.eta = to_double(v, l); }},
      {"model.eps", [](ExperimentConfig& c, const std::string& v, int l) { c.model.eps = to_double(v, l); }},
      {"model.alpha", [](ExperimentConfig& c, const std::string& v, int l) { c.model.alpha = to_double(v, l); }},
      {"model.c0", [](ExperimentConfig& c, const std::string& v, int l) { c.model.c0 = to_double(v, l); }},
      {"model.gamma", [](ExperimentConfig& c, const std::string& v, int l) { c.model.gamma = to_double(v, l); }},
      {"model.chi",
       [](ExperimentConfig& c, const std::string& v, int line) {
         if (v == "linear") c.model.chi.kind = ChiSpec::Kind::linear;
         else if (v == "saturating") c.model.chi.kind = ChiSpec::Kind::saturating;
         else throw ConfigError("unknown chi '" + v + "' (linear | saturating)", line);
       }},
      {"model.chi_k", [](ExperimentConfig& c, const std::string& v, int l) { c.model.chi.k = to_double(v, l); }},
      {"model.nx", [](ExperimentConfig& c, const std::string& v, int l) { c.model.nx = to_int(v, l); }},
      {"model.ny", [](ExperimentConfig& c, const std::string& v, int l) { c.model.ny = to_int(v, l); }},
      {"model.lx", [](ExperimentConfig& c, const std::string& v, int l) { c.model.lx = to_double(v, l); }},
      {"model.ly", [](ExperimentConfig& c, const std::string& v, int l) { c.model.ly = to_double(v, l); }},
      {"model.dt", [](ExperimentConfig& c, const std::string& v, int l) { c.model.dt = to_double(v, l); }},
      {"model.t_end", [](ExperimentConfig& c, const std::string& v, int l) { c.model.t_end = to_double(v, l); }},
      {"model.drift",
       [](ExperimentConfig& c, const std::string& v, int line) {
         if (v == "centered") c.model.drift_average = FaceAverage::centered;
         else if (v == "upwind") c.model.drift_average = FaceAverage::upwind;
         else throw ConfigError("unknown drift average '" + v + "' (centered | upwind)", line);
       }},
      {"model.helmholtz_tol",
       [](ExperimentConfig& c, const std::string& v, int l) { c.model.helmholtz_tol = to_double(v, l); }},
      {"initial.kind",
       [](ExperimentConfig& c, const std::string& v, int line) {
         if (v == "prepared") c.initial.kind = InitialSpec::Kind::prepared;
         else if (v == "unprepared") c.initial.kind = InitialSpec::Kind::unprepared;
         else if (v == "custom") c.initial.kind = InitialSpec::Kind::custom;
         else throw ConfigError("unknown initial kind '" + v + "'", line);
       }},
      {"initial.cx", [](ExperimentConfig& c, const std::string& v, int l) { c.initial.cx = to_double(v, l); }},
      {"initial.cy", [](ExperimentConfig& c, const std::string& v, int l) { c.initial.cy = to_double(v, l); }},
      {"initial.radius", [](ExperimentConfig& c, const std::string& v, int l) { c.initial.radius = to_double(v, l); }},
      {"initial.width", [](ExperimentConfig& c, const std::string& v, int l) { c.initial.width = to_double(v, l); }},
      {"initial.amplitude",
       [](ExperimentConfig& c, const std::string& v, int l) { c.initial.amplitude = to_double(v, l); }},
      {"initial.d0", [](ExperimentConfig& c, const std::string& v, int l) { c.initial.d0 = to_double(v, l); }},
      {"initial.expression",
       [](ExperimentConfig& c, const std::string& v, int line) {
         try {
           Expression check(v);
         } catch (const ConfigError& e) {
           throw ConfigError(std::string("bad expression: ") + e.what(), line);
         }
         c.initial.expression = v;
       }},
      {"sharp.d0", [](ExperimentConfig& c, const std::string& v, int l) { c.sharp.d0 = to_double(v, l); }},
      {"sharp.redistance_every",
       [](ExperimentConfig& c, const std::string& v, int l) { c.sharp.redistance_every = to_int(v, l); }},
      {"sharp.dt", [](ExperimentConfig& c, const std::string& v, int l) { c.sharp.dt = to_double(v, l); }},
      {"sharp.nx", [](ExperimentConfig& c, const std::string& v, int l) { c.sharp.nx = to_int(v, l); }},
      {"sharp.ny", [](ExperimentConfig& c, const std::string& v, int l) { c.sharp.ny = to_int(v, l); }},
      {"bounds.c6", [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.c6 = to_double(v, l); }},
      {"bounds.K", [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.K = to_double(v, l); }},
      {"bounds.L", [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.L = to_double(v, l); }},
      {"bounds.motion_d0",
       [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.motion_d0 = to_double(v, l); }},
      {"bounds.slack_h2", [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.slack_h2 = to_double(v, l); }},
      {"bounds.slack_dt", [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.slack_dt = to_double(v, l); }},
      {"bounds.motion", [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.motion = to_bool(v, l); }},
      {"bounds.checkpoints",
       [](ExperimentConfig& c, const std::string& v, int l) { c.bounds.checkpoints = to_int(v, l); }},
  };
  return table;
}

// Runs the semantic checks, attributing a failure to the line of the most relevant key.
void validate_with_lines(const ExperimentConfig& c, const std::map<std::string, int>& lines) {
  auto line_of = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      auto it = lines.find(k);
      if (it != lines.end()) return it->second;
    }
    return 0;
  };
  auto fail = [&](const std::string& what, std::initializer_list<const char*> keys) {
    throw ConfigError(what, line_of(keys));
  };

  if (c.jobs < 1) fail("jobs must be >= 1", {"run.jobs"});
  if (!(c.eta > 0.0 && c.eta < 0.25)) fail("eta must lie in (0, 1/4)", {"run.eta"});
  if (c.h_over_eps < 0.0 || c.h_over_eps > 0.5) fail("h_over_eps must lie in [0, 1/2]", {"run.h_over_eps"});
  if (c.dt_over_eps2 < 0.0 || c.dt_over_eps2 > 0.2) fail("dt_over_eps2 must lie in [0, 0.2]", {"run.dt_over_eps2"});
  if (c.dt_over_eps3 < 0.0) fail("dt_over_eps3 must be nonnegative", {"run.dt_over_eps3"});
  if (c.dt_over_eps2 > 0.0 && c.dt_over_eps3 > 0.0)
    fail("dt_over_eps2 and dt_over_eps3 are mutually exclusive", {"run.dt_over_eps3"});

  std::vector<double> eps = c.eps_values();
  for (double e : eps)
    if (!(e > 0.0 && e <= 0.2)) fail("eps must lie in (0, 0.2] (asymptotic regime)", {"run.sweep", "model.eps"});
  std::vector<double> sorted = eps;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) fail("sweep eps values must be distinct", {"run.sweep"});

  for (double e : eps) {
    ModelParams p = c.member(e);
    try {
      p.validate();
    } catch (const DomainError& err) {
      fail(err.what(), {"model.dt", "model.eps", "run.sweep"});
    } catch (const ContractError& err) {
      fail(err.what(), {"model.nx", "model.lx"});
    }
    Grid g = p.grid();
    if (std::max(g.hx(), g.hy()) > 0.5 * e * (1.0 + 1e-12)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "resolution rule h <= eps/2 violated: h = %.6g, eps = %.6g", std::max(g.hx(), g.hy()), e);
      fail(buf, {"model.nx", "model.ny", "run.sweep", "model.eps"});
    }
  }
  for (double p : c.probes)
    if (!(p >= 0.0 && p <= c.model.t_end)) fail("probe times must lie in [0, t_end]", {"run.probes"});

  if (c.initial.kind == InitialSpec::Kind::custom && c.initial.expression.empty())
    fail("custom initial data needs an expression", {"initial.kind"});
  if (c.initial.kind != InitialSpec::Kind::custom && !(c.initial.radius > 0.0))
    fail("initial radius must be positive", {"initial.radius"});
  if (!(c.initial.width > 0.0)) fail("initial width must be positive", {"initial.width"});
  if (!(c.initial.amplitude > 0.0 && c.initial.amplitude <= 0.5 + 1e-12))
    fail("initial amplitude must lie in (0, 1/2]", {"initial.amplitude"});
  if (c.initial.d0 < 0.0) fail("initial d0 must be nonnegative", {"initial.d0"});

  if (c.sharp.d0 < 0.0) fail("sharp d0 must be nonnegative", {"sharp.d0"});
  if (c.sharp.redistance_every < 1) fail("redistance_every must be >= 1", {"sharp.redistance_every"});
  if (c.sharp.dt < 0.0) fail("sharp dt must be nonnegative", {"sharp.dt"});
  if ((c.sharp.nx != 0 && c.sharp.nx < 8) || (c.sharp.ny != 0 && c.sharp.ny < 8))
    fail("sharp grid needs at least 8 nodes per axis", {"sharp.nx", "sharp.ny"});

  if (c.bounds.c6 < 0.0 || c.bounds.K < 0.0 || c.bounds.L < 0.0 || c.bounds.motion_d0 < 0.0)
    fail("bounds constants must be nonnegative", {"bounds.c6", "bounds.K", "bounds.L", "bounds.motion_d0"});
  if (c.bounds.slack_h2 < 0.0 || c.bounds.slack_dt < 0.0) fail("slack factors must be nonnegative", {"bounds.slack_h2"});
  if (c.bounds.checkpoints < 1) fail("checkpoints must be >= 1", {"bounds.checkpoints"});
}

}  // namespace

void ExperimentConfig::validate() const { validate_with_lines(*this, {}); }

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = trim(s.substr(1, s.size() - 2));
      if (section != "run" && section != "model" && section != "initial" && section != "sharp" && section != "bounds")
        throw ConfigError("unknown section [" + section + "]", line);
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    if (section.empty()) throw ConfigError("key outside a [section]", line);
    std::string key = section + "." + trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + key + "'", line);
    if (lines.count(key)) throw ConfigError("duplicate key '" + key + "'", line);
    if (value.empty()) throw ConfigError("missing value for '" + key + "'", line);
    it->second(config, value, line);
    lines[key] = line;
  }
  validate_with_lines(config, lines);
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string to_text(const ExperimentConfig& c) {
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
    return s;
  };
  std::ostringstream o;
  o << "[run]\n";
  o << "mode = " << mode_name(c.mode) << "\n";
  o << "output = " << c.output << "\n";
  o << "jobs = " << c.jobs << "\n";
  if (!c.probes.empty()) o << "probes = " << list(c.probes) << "\n";
  if (!c.sweep.empty()) o << "sweep = " << list(c.sweep) << "\n";
  o << "h_over_eps = " << fmt(c.h_over_eps) << "\n";
  o << "dt_over_eps2 = " << fmt(c.dt_over_eps2) << "\n";
  o << "dt_over_eps3 = " << fmt(c.dt_over_eps3) << "\n";
  o << "generation_probe = " << (c.generation_probe ? "true" : "false") << "\n";
  o << "eta = " << fmt(c.eta) << "\n";
  const ModelParams& m = c.model;
  o << "\n[model]\n";
  o << "eps = " << fmt(m.eps) << "\n";
  o << "alpha = " << fmt(m.alpha) << "\n";
  o << "c0 = " << fmt(m.c0) << "\n";
  o << "gamma = " << fmt(m.gamma) << "\n";
  o << "chi = " << (m.chi.kind == ChiSpec::Kind::linear ? "linear" : "saturating") << "\n";
  o << "chi_k = " << fmt(m.chi.k) << "\n";
  o << "nx = " << m.nx << "\n";
  o << "ny = " << m.ny << "\n";
  o << "lx = " << fmt(m.lx) << "\n";
  o << "ly = " << fmt(m.ly) << "\n";
  o << "dt = " << fmt(m.dt) << "\n";
  o << "t_end = " << fmt(m.t_end) << "\n";
  o << "drift = " << (m.drift_average == FaceAverage::centered ? "centered" : "upwind") << "\n";
  o << "helmholtz_tol = " << fmt(m.helmholtz_tol) << "\n";
  const InitialSpec& i = c.initial;
  o << "\n[initial]\n";
  o << "kind = "
    << (i.kind == InitialSpec::Kind::prepared ? "prepared"
        : i.kind == InitialSpec::Kind::unprepared ? "unprepared"
                                                  : "custom")
    << "\n";
  o << "cx = " << fmt(i.cx) << "\n";
  o << "cy = " << fmt(i.cy) << "\n";
  o << "radius = " << fmt(i.radius) << "\n";
  o << "width = " << fmt(i.width) << "\n";
  o << "amplitude = " << fmt(i.amplitude) << "\n";
  o << "d0 = " << fmt(i.d0) << "\n";
  if (!i.expression.empty()) o << "expression = " << i.expression << "\n";
  o << "\n[sharp]\n";
  o << "d0 = " << fmt(c.sharp.d0) << "\n";
  o << "redistance_every = " << c.sharp.redistance_every << "\n";
  o << "dt = " << fmt(c.sharp.dt) << "\n";
  o << "nx = " << c.sharp.nx << "\n";
  o << "ny = " << c.sharp.ny << "\n";
  const BoundsSettings& b = c.bounds;
  o << "\n[bounds]\n";
  o << "c6 = " << fmt(b.c6) << "\n";
  o << "K = " << fmt(b.K) << "\n";
  o << "L = " << fmt(b.L) << "\n";
  o << "motion_d0 = " << fmt(b.motion_d0) << "\n";
  o << "slack_h2 = " << fmt(b.slack_h2) << "\n";
  o << "slack_dt = " << fmt(b.slack_dt) << "\n";
  o << "motion = " << (b.motion ? "true" : "false") << "\n";
  o << "checkpoints = " << b.checkpoints << "\n";
  return o.str();
}

}  // namespace chemolimit
