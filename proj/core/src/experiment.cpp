#include "chemolimit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <thread>

#include "chemolimit/error.hpp"
#include "chemolimit/expression.hpp"
#include "chemolimit/svg.hpp"

namespace chemolimit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", t);
  return buf;
}

void say(const Logger& log, const std::string& text) {
  if (log) log(text);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Runs job(k) for k in [0, n) on up to `workers` threads; rethrows the first failure (lowest k).
template <class Job>
void parallel_for(std::size_t n, int workers, Job job) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t k; (k = next.fetch_add(1)) < n;) {
      try {
        job(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int count = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < count; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<double> probe_list(const ExperimentConfig& config) {
  std::vector<double> probes = config.probes.empty() ? std::vector<double>{config.model.t_end} : config.probes;
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
  return probes;
}

double thickness_or_nan(const ScalarField& u, double eta) {
  try {
    return layer_thickness(u, eta);
  } catch (const NumericalError&) {
    return kNaN;
  }
}

Grid sharp_grid(const ExperimentConfig& config) {
  const ModelParams& m = config.model;
  return Grid(config.sharp.nx > 0 ? config.sharp.nx : m.nx, config.sharp.ny > 0 ? config.sharp.ny : m.ny, m.lx, m.ly);
}

// Steps to stage times landed exactly, dt <= the model step, calling visit at selected steps.
std::vector<long> checkpoint_steps(long steps, int checkpoints) {
  std::vector<long> out{0};
  for (int c = 1; c <= checkpoints; ++c) out.push_back(static_cast<long>(std::llround(double(steps) * c / checkpoints)));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", eps);
  return buf;
}

SharpParams sharp_params(const ExperimentConfig& config, const Grid& grid) {
  SharpParams p;
  p.alpha = config.model.alpha;
  p.gamma = config.model.gamma;
  p.chi = config.model.chi;
  p.d0 = config.sharp.d0 > 0.0 ? config.sharp.d0 : default_cutoff_radius(config.initial, grid);
  p.redistance_every = config.sharp.redistance_every;
  p.dt = config.sharp.dt;
  p.helmholtz_tol = config.model.helmholtz_tol;
  p.validate();
  return p;
}

ScalarField sharp_initial_distance(const ExperimentConfig& config, const Grid& grid) {
  const InitialSpec& s = config.initial;
  if (s.kind != InitialSpec::Kind::custom) return circle_distance(grid, s.cx, s.cy, s.radius);
  Expression expr(s.expression);
  return ScalarField::from_function(grid, [&](double x, double y) { return 0.5 - expr(x, y); });
}

std::vector<DiffuseMember> run_diffuse_sweep(const ExperimentConfig& config, const Logger& log) {
  const std::vector<double> eps = config.eps_values();
  const std::vector<double> probes = probe_list(config);
  std::vector<DiffuseMember> members(eps.size());
  parallel_for(eps.size(), config.jobs, [&](std::size_t k) {
    const ModelParams params = config.member(eps[k]);
    ScalarField u0 = initial_data(config.initial, params);
    RunOptions options;
    options.probe_times = probes;
    options.generation_probe = config.generation_probe && config.mode == Mode::diffuse;
    DiffuseTrajectory traj = run_diffuse(params, u0, options);
    DiffuseMember& m = members[k];
    m.eps = eps[k];
    m.steps = traj.steps;
    const double tg = generation_time(eps[k]);
    for (const DiffuseState& s : traj.snapshots) {
      auto lines = extract_interface(s.u, 0.5);
      double thickness = s.t >= tg * (1.0 - 1e-9) ? thickness_or_nan(s.u, config.eta) : kNaN;
      m.rows.push_back({s.t, eps[k], kNaN, thickness, s.u.min(), s.u.max(), total_length(lines)});
      m.interfaces.emplace_back(s.t, std::move(lines));
    }
    m.snapshots = std::move(traj.snapshots);
    say(log, "diffuse eps=" + eps_tag(eps[k]) + ": " + std::to_string(m.steps) + " steps");
  });
  return members;
}

SharpRun run_sharp_reference(const ExperimentConfig& config, const std::vector<double>& probes) {
  const Grid grid = sharp_grid(config);
  SharpRun run;
  run.params = sharp_params(config, grid);
  SharpSolver solver(run.params, sharp_initial_distance(config, grid));
  auto record = [&]() {
    run.snapshots.push_back({solver.state().t, solver.state().d});
    run.interfaces.emplace_back(solver.state().t, extract_interface(solver.state().d, 0.0));
  };
  record();
  for (double p : probes) {
    if (p <= 0.0) continue;
    solver.advance_to(p);
    record();
  }
  run.steps = solver.steps();
  return run;
}

CompareOutcome run_compare(const ExperimentConfig& config, const Logger& log) {
  CompareOutcome out;
  const std::vector<double> probes = probe_list(config);
  out.sharp = run_sharp_reference(config, probes);
  say(log, "sharp reference: " + std::to_string(out.sharp.steps) + " steps");
  out.members = run_diffuse_sweep(config, log);

  auto sharp_lines_at = [&](std::size_t probe) -> const std::vector<Polyline>& {
    double p = probes[probe];
    for (const auto& [t, lines] : out.sharp.interfaces)
      if (std::abs(t - p) <= 1e-12 * std::max(1.0, p)) return lines;
    throw ContractError("sharp reference missing probe " + time_tag(p));
  };

  for (auto& m : out.members) {
    double c = 0.0;
    for (std::size_t k = 0; k < m.rows.size(); ++k) {
      const auto& gamma = sharp_lines_at(k);
      const auto& lines = m.interfaces[k].second;
      if (gamma.empty() || lines.empty()) {
        out.notices.push_back("eps=" + eps_tag(m.eps) + " t=" + time_tag(probes[k]) + ": empty interface, no distance");
        continue;
      }
      m.rows[k].hausdorff = hausdorff(lines, gamma);
      c = std::max(c, directed_hausdorff(lines, gamma) / m.eps);
    }
    out.containment_C.push_back(c);
  }

  if (out.members.size() < 3) {
    out.notices.push_back("fewer than three eps values: rate fit skipped");
    return out;
  }
  for (std::size_t k = 0; k < probes.size(); ++k) {
    if (probes[k] <= 0.0) continue;
    for (const char* metric : {"hausdorff", "thickness"}) {
      std::vector<std::pair<double, double>> samples;
      for (const auto& m : out.members) {
        double v = std::string(metric) == "hausdorff" ? m.rows[k].hausdorff : m.rows[k].thickness;
        if (std::isfinite(v) && v > 0.0) samples.emplace_back(m.eps, v);
      }
      if (samples.size() < 3) {
        out.notices.push_back(std::string(metric) + " t=" + time_tag(probes[k]) + ": too few samples, fit skipped");
        continue;
      }
      out.fits.push_back({metric, probes[k], fit_rate(samples)});
    }
  }
  return out;
}

bool GenerationOutcome::passed() const {
  return report.passed && generation_envelope.contained() && (!motion_checked || motion_envelope.contained());
}

GenerationOutcome run_generation(const ExperimentConfig& config, const Logger& log) {
  const ModelParams params = config.member(config.model.eps);
  const Grid grid = params.grid();
  const double eps = params.eps;
  const double eta = config.eta;
  const double tg = generation_time(eps);

  GenerationOutcome out{eps, 0.0, {}, {}, {}, {}, {}, false, {}, {}, initial_data(config.initial, params),
                        ScalarField(grid), ScalarField(grid), ScalarField(grid), {}};
  const ScalarField d0_field = initial_distance(config.initial, grid);
  const double h = grid.h_min() > 0 ? std::max(grid.hx(), grid.hy()) : 0.0;

  DiffuseStepper stepper(params);
  DiffuseState state = stepper.initial_state(out.u0);
  const long n_gen = static_cast<long>(std::ceil(tg / params.time_step() - 1e-9));
  const double dt_gen = tg / n_gen;
  out.slack = config.bounds.slack_h2 * h * h + config.bounds.slack_dt * dt_gen;

  auto row = [&](const ScalarField& u, double t, double thickness, double hd) {
    out.rows.push_back({t, eps, hd, thickness, u.min(), u.max(), total_length(extract_interface(u, 0.5))});
  };
  row(out.u0, 0.0, kNaN, kNaN);

  std::vector<std::pair<double, ScalarField>> checks;
  const auto gen_steps = checkpoint_steps(n_gen, config.bounds.checkpoints);
  std::size_t next = 0;
  for (long s = 0; s <= n_gen; ++s) {
    if (s > 0) stepper.step(state, dt_gen);
    if (next < gen_steps.size() && gen_steps[next] == s) {
      checks.emplace_back(s == n_gen ? tg : s * dt_gen, state.u);
      ++next;
    }
  }
  state.t = tg;
  out.u_generation = state.u;
  say(log, "generation stage: " + std::to_string(n_gen) + " steps to t = " + time_tag(tg));

  // C6: first rung of a doubling ladder whose envelope contains every checkpoint.
  std::vector<double> ladder;
  if (config.bounds.c6 > 0.0) ladder = {config.bounds.c6};
  else
    for (double c = 1.0; c <= 1024.0; c *= 2.0) ladder.push_back(c);
  bool found = false;
  for (double c6 : ladder) {
    GenerationConstants gen = derive_generation_constants(params.bistable(), c6);
    EnvelopeReport report;
    try {
      for (const auto& [t, u] : checks) {
        EnvelopePair env = generation_envelope(out.u0, t, eps, gen);
        report.absorb(check_envelope(u, env.lower, env.upper, out.slack, t));
      }
    } catch (const DomainError& e) {
      out.notices.push_back("C6 = " + format_number(c6) + ": " + e.what());
      break;
    }
    out.gen = gen;
    out.generation_envelope = report;
    if (report.contained()) {
      found = true;
      break;
    }
  }
  if (!found) out.notices.push_back("no C6 on the ladder contains the generation stage");

  out.motion = derive_motion_constants(eta);
  out.thresholds = fit_thresholds(eta, eps, out.gen.G > 0 ? out.gen : derive_generation_constants(params.bistable()),
                                  out.motion, out.u0, d0_field);
  out.report = generation_check(out.u_generation, out.u0, out.thresholds.M0, eps, eta);
  row(out.u_generation, tg, thickness_or_nan(out.u_generation, eta), kNaN);
  out.u_final = out.u_generation;

  const double T = params.t_end - tg;
  if (!config.bounds.motion || !(T > 1e-12)) return out;

  SharpParams sp = sharp_params(config, grid);
  MotionConstants& mc = out.motion;
  mc.T = T;
  mc.d0 = config.bounds.motion_d0 > 0.0 ? config.bounds.motion_d0 : sp.d0;
  mc.L = config.bounds.L > 0.0 ? config.bounds.L : default_L(T, mc.d0, eps);

  SharpSolver sharp(sp, sharp_initial_distance(config, grid));
  const long n_mot = static_cast<long>(std::ceil(T / params.time_step() - 1e-9));
  const double dt_mot = T / n_mot;
  const double slack = config.bounds.slack_h2 * h * h + config.bounds.slack_dt * std::max(dt_gen, dt_mot);
  std::vector<std::tuple<double, ScalarField, ScalarField>> stage;  // (stage time, u, d)
  const auto mot_steps = checkpoint_steps(n_mot, config.bounds.checkpoints);
  next = 0;
  for (long s = 0; s <= n_mot; ++s) {
    if (s > 0) stepper.step(state, dt_mot);
    if (next < mot_steps.size() && mot_steps[next] == s) {
      const double t = s == n_mot ? T : s * dt_mot;
      sharp.advance_to(t);
      stage.emplace_back(t, state.u, sharp.state().d);
      ++next;
    }
  }
  out.u_final = state.u;
  out.d_final = sharp.state().d;
  say(log, "motion stage: " + std::to_string(n_mot) + " steps, sharp " + std::to_string(sharp.steps()) + " steps");

  std::vector<double> k_ladder;
  if (config.bounds.K > 0.0) k_ladder = {config.bounds.K};
  else
    for (double k = 2.0; k <= 4096.0; k *= 2.0) k_ladder.push_back(k);
  found = false;
  const double L_start = mc.L;
  for (double K : k_ladder) {
    mc.K = K;
    // Lower L to the window bound when the default leaves no room for K.
    const double room = mc.d0 / (2.0 * eps) - K;
    if (config.bounds.L <= 0.0 && room > 1.0) mc.L = std::min(L_start, std::log(room) / T);
    EnvelopeReport report;
    try {
      for (const auto& [t, u, d] : stage) {
        EnvelopePair env = motion_envelope(d, t, eps, mc);
        report.absorb(check_envelope(u, env.lower, env.upper, slack, tg + t));
      }
    } catch (const DomainError& e) {
      out.notices.push_back("K = " + format_number(K) + ": " + e.what());
      break;
    }
    out.motion_checked = true;
    out.motion_envelope = report;
    if (report.contained()) {
      found = true;
      break;
    }
  }
  if (!found) out.notices.push_back("no K on the ladder contains the motion stage");
  if (!out.motion_checked) {
    // The window condition failed for every K; report it as an uncontained motion stage.
    out.motion_checked = true;
    out.motion_envelope.max_lower_violation = kNaN;
    out.motion_envelope.max_upper_violation = kNaN;
  }
  double hd = kNaN;
  auto a = extract_interface(out.u_final, 0.5), b = extract_interface(out.d_final, 0.0);
  if (!a.empty() && !b.empty()) hd = hausdorff(a, b);
  row(out.u_final, params.t_end, thickness_or_nan(out.u_final, eta), hd);
  return out;
}

void write_profile_tools(const ExperimentConfig& config, ManifestWriter& out) {
  std::string table = "z,U0,U0_prime,U0_second\n";
  for (int k = -200; k <= 200; ++k) {
    double z = 0.1 * k;
    table += format_number(z) + "," + format_number(u0(z)) + "," + format_number(u0_prime(z)) + "," +
             format_number(u0_second(z)) + "\n";
  }
  out.write("profile_u0.csv", table);

  table = "tau,xi,delta,Y\n";
  for (double tau : {0.5, 1.0, 2.0, 4.0, 8.0})
    for (double delta : {-0.02, 0.0, 0.02})
      for (int k = 0; k <= 40; ++k) {
        double xi = -0.5 + 0.05 * k;
        table += format_number(tau) + "," + format_number(xi) + "," + format_number(delta) + "," +
                 format_number(flow_Y(tau, xi, delta)) + "\n";
      }
  out.write("profile_flow.csv", table);

  table = "delta,alpha_minus,a,alpha_plus,mu\n";
  for (int k = -9; k <= 9; ++k) {
    double delta = 0.005 * k;
    PerturbedRoots r = perturbed_roots(delta);
    table += format_number(delta) + "," + format_number(r.alpha_minus) + "," + format_number(r.a) + "," +
             format_number(r.alpha_plus) + "," + format_number(r.mu_delta) + "\n";
  }
  out.write("profile_roots.csv", table);

  const double eps = config.model.eps;
  GenerationConstants gen = derive_generation_constants(config.model.bistable());
  MotionConstants mc = derive_motion_constants(config.eta);
  const ProfileDecay& decay = profile_decay();
  std::vector<std::pair<std::string, double>> constants = {
      {"eps", eps},
      {"eta", config.eta},
      {"delta_max", delta_max()},
      {"t_generation", generation_time(eps)},
      {"G", gen.G},
      {"eps_G", eps * gen.G},
      {"decay_lambda", decay.lambda},
      {"decay_C", decay.c},
      {"F", mc.F},
      {"b", mc.b},
      {"m", mc.m},
      {"a1", mc.a1},
      {"beta", mc.beta},
      {"sigma0", mc.sigma0},
      {"sigma1", mc.sigma1},
      {"sigma2", mc.sigma2},
      {"sigma", mc.sigma},
      {"profile_margin", profile_inequality_margin(mc)},
  };
  if (eps * gen.G < delta_max()) {
    try {
      constants.emplace_back("C7", fit_C7(config.eta, eps, gen));
    } catch (const DomainError& e) {
      out.notice(std::string("C7: ") + e.what());
    }
  } else {
    out.notice("eps G >= delta_max: generation constants undefined at this eps");
  }
  std::string text;
  for (const auto& [k, v] : constants) {
    text += k + " = " + format_number(v) + "\n";
    out.constant(k, v);
  }
  out.write("profile_constants.txt", text);
}

void emit_plots(const CompareOutcome& outcome, ManifestWriter& out) {
  static const char* colors[] = {"#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};
  if (outcome.fits.empty()) out.notice("no rate fits: rate plots skipped");
  for (const auto& f : outcome.fits)
    out.write("plots/rate_" + f.metric + "_t" + time_tag(f.t) + ".svg",
              rate_plot(f.metric + " vs eps at t = " + time_tag(f.t), f.fit));

  if (outcome.members.empty()) {
    out.notice("no diffuse members: overlays skipped");
    return;
  }
  const Grid& g = outcome.sharp.snapshots.front().d.grid();
  for (std::size_t k = 0; k < outcome.members.front().interfaces.size(); ++k) {
    const double t = outcome.members.front().rows[k].t;
    PlotSpec spec;
    spec.title = "interfaces at t = " + time_tag(t);
    spec.x_label = "x";
    spec.y_label = "y";
    spec.equal_aspect = true;
    spec.x_min = 0.0, spec.x_max = g.lx(), spec.y_min = 0.0, spec.y_max = g.ly();
    bool any = false;
    for (std::size_t m = 0; m < outcome.members.size(); ++m) {
      const auto& lines = outcome.members[m].interfaces[k].second;
      if (lines.empty()) continue;
      PlotSeries s{"eps = " + eps_tag(outcome.members[m].eps), {}, colors[m % 6], false, false};
      for (const auto& l : lines) {
        auto pts = l.points;
        if (l.closed && !pts.empty()) pts.push_back(pts.front());
        s.paths.push_back(pts);
      }
      spec.series.push_back(std::move(s));
      any = true;
    }
    // Sharp frames are at the exact probe times; diffuse probes may be rounded to a step.
    const std::vector<Polyline>* nearest = nullptr;
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& [ts, lines] : outcome.sharp.interfaces)
      if (std::abs(ts - t) < gap) gap = std::abs(ts - t), nearest = &lines;
    if (nearest && !nearest->empty()) {
      PlotSeries s{"sharp", {}, "#000000", false, true};
      for (const auto& l : *nearest) {
        auto pts = l.points;
        if (l.closed && !pts.empty()) pts.push_back(pts.front());
        s.paths.push_back(pts);
      }
      spec.series.push_back(std::move(s));
    }
    if (!any) {
      out.notice("t = " + time_tag(t) + ": empty interface, overlay frame omitted");
      continue;
    }
    out.write("plots/overlay_t" + time_tag(t) + ".svg", render_svg(spec));
  }

  // Cross-section of the finest member at the last probe against U0(d/eps) of the sharp solution.
  const DiffuseMember* finest = &outcome.members.front();
  for (const auto& m : outcome.members)
    if (m.eps < finest->eps) finest = &m;
  if (finest->snapshots.empty() || outcome.sharp.snapshots.size() < 2) return;
  const ScalarField& u = finest->snapshots.back().u;
  const ScalarField& d = outcome.sharp.snapshots.back().d;
  const auto& sharp_lines = outcome.sharp.interfaces.back().second;
  if (sharp_lines.empty()) {
    out.notice("sharp interface empty at the last probe: cross-section skipped");
    return;
  }
  const double yc = fit_circle(sharp_lines).cy;
  PlotSpec spec;
  spec.title = "layer cross-section, eps = " + eps_tag(finest->eps) + ", t = " + time_tag(finest->rows.back().t);
  spec.x_label = "x";
  spec.y_label = "u";
  PlotSeries su{"diffuse u", {{}}, "#1f77b4", false, false}, sr{"U0(d/eps)", {{}}, "#d62728", false, true};
  const Grid& gu = u.grid();
  for (int k = 0; k <= 800; ++k) {
    double x = gu.lx() * k / 800.0;
    su.paths[0].push_back({x, interpolate_cubic(u, x, yc)});
    sr.paths[0].push_back({x, u0(interpolate_cubic(d, x, yc) / finest->eps)});
  }
  spec.series = {su, sr};
  out.write("plots/profile_eps" + eps_tag(finest->eps) + ".svg", render_svg(spec));
}

void emit_envelope_plot(const GenerationOutcome& o, const ExperimentConfig& config, ManifestWriter& out) {
  if (!o.motion_checked || !std::isfinite(o.motion_envelope.max_lower_violation)) {
    out.notice("motion stage not available: envelope cross-section skipped");
    return;
  }
  EnvelopePair env = motion_envelope(o.d_final, o.motion.T, o.eps, o.motion);
  const Grid& g = o.u_final.grid();
  const double yc = config.initial.cy;
  PlotSpec spec;
  spec.title = "motion envelopes at t = " + time_tag(config.model.t_end);
  spec.x_label = "x";
  spec.y_label = "u";
  char note[120];
  std::snprintf(note, sizeof note, "K = %.4g, L = %.4g, sigma = %.4g, beta = %.4g", o.motion.K, o.motion.L,
                o.motion.sigma, o.motion.beta);
  spec.notes.push_back(note);
  PlotSeries su{"u", {{}}, "#1f77b4", false, false}, lo{"lower", {{}}, "#2ca02c", false, true},
      hi{"upper", {{}}, "#d62728", false, true};
  for (int k = 0; k <= 800; ++k) {
    double x = g.lx() * k / 800.0;
    su.paths[0].push_back({x, interpolate_cubic(o.u_final, x, yc)});
    lo.paths[0].push_back({x, interpolate_cubic(env.lower, x, yc)});
    hi.paths[0].push_back({x, interpolate_cubic(env.upper, x, yc)});
  }
  spec.series = {su, lo, hi};
  out.write("plots/envelope_cross_section.svg", render_svg(spec));
}

int run_mode(const ExperimentConfig& config, ManifestWriter& out, const Logger& log) {
  const auto start = std::chrono::steady_clock::now();
  out.set_config(to_text(config));
  int status = 0;
  switch (config.mode) {
    case Mode::profile_tools:
      write_profile_tools(config, out);
      break;
    case Mode::diffuse: {
      auto members = run_diffuse_sweep(config, log);
      std::vector<MetricsRow> rows;
      for (const auto& m : members) {
        rows.insert(rows.end(), m.rows.begin(), m.rows.end());
        out.write("interfaces_eps" + eps_tag(m.eps) + ".csv", format_polylines_csv(m.interfaces));
        for (const auto& s : m.snapshots)
          out.write("snapshots/eps" + eps_tag(m.eps) + "/u_t" + time_tag(s.t) + ".txt", format_snapshot(s.u, s.t, m.eps));
      }
      out.write("metrics.csv", format_metrics_csv(rows));
      break;
    }
    case Mode::sharp: {
      SharpRun run = run_sharp_reference(config, probe_list(config));
      out.constant("sharp_d0", run.params.d0);
      out.constant("sharp_steps", static_cast<double>(run.steps));
      std::string table = "t,interface_length,mean_radius,radius_spread\n";
      for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        const auto& lines = run.interfaces[k].second;
        CircleFit fit = lines.empty() ? CircleFit{kNaN, kNaN, kNaN, kNaN} : fit_circle(lines);
        table += format_number(run.snapshots[k].t) + "," + format_number(total_length(lines)) + "," +
                 format_number(fit.mean_radius) + "," + format_number(fit.spread) + "\n";
        out.write("snapshots/sharp/d_t" + time_tag(run.snapshots[k].t) + ".txt",
                  format_snapshot(run.snapshots[k].d, run.snapshots[k].t, kNaN));
      }
      out.write("sharp_metrics.csv", table);
      out.write("interfaces_sharp.csv", format_polylines_csv(run.interfaces));
      break;
    }
    case Mode::compare: {
      CompareOutcome o = run_compare(config, log);
      std::vector<MetricsRow> rows;
      for (std::size_t k = 0; k < o.members.size(); ++k) {
        const auto& m = o.members[k];
        rows.insert(rows.end(), m.rows.begin(), m.rows.end());
        out.write("interfaces_eps" + eps_tag(m.eps) + ".csv", format_polylines_csv(m.interfaces));
        out.constant("containment_C_eps" + eps_tag(m.eps), o.containment_C[k]);
      }
      out.write("metrics.csv", format_metrics_csv(rows));
      out.write("interfaces_sharp.csv", format_polylines_csv(o.sharp.interfaces));
      std::string fits = "metric,t,slope,intercept,residual,samples\n";
      for (const auto& f : o.fits) {
        fits += f.metric + "," + format_number(f.t) + "," + format_number(f.fit.slope) + "," +
                format_number(f.fit.intercept) + "," + format_number(f.fit.residual) + "," +
                std::to_string(f.fit.samples.size()) + "\n";
        out.constant("slope_" + f.metric + "_t" + time_tag(f.t), f.fit.slope);
      }
      if (!o.fits.empty()) out.write("fits.csv", fits);
      for (const auto& n : o.notices) out.notice(n);
      emit_plots(o, out);
      break;
    }
    case Mode::generation: {
      GenerationOutcome o = run_generation(config, log);
      out.write("metrics.csv", format_metrics_csv(o.rows));
      out.constant("C6", o.gen.C6);
      out.constant("G", o.gen.G);
      out.constant("C7", o.thresholds.C7);
      out.constant("M0", o.thresholds.M0);
      out.constant("M1", o.thresholds.M1);
      out.constant("K_profile", o.thresholds.K_profile);
      out.constant("sigma", o.motion.sigma);
      out.constant("beta", o.motion.beta);
      out.constant("slack", o.slack);
      if (o.motion_checked) {
        out.constant("K", o.motion.K);
        out.constant("L", o.motion.L);
        out.constant("motion_d0", o.motion.d0);
        out.constant("C", std::exp(o.motion.L * o.motion.T) + o.motion.K +
                              2.0 * std::sqrt(2.0) * std::atanh(1.0 - config.eta));
      }
      std::string text;
      auto line = [&](const std::string& k, double v) { text += k + " = " + format_number(v) + "\n"; };
      text += std::string("passed = ") + (o.passed() ? "true" : "false") + "\n";
      line("min_u", o.report.min_u);
      line("max_u", o.report.max_u);
      line("worst_upper", o.report.worst_upper);
      line("worst_lower", o.report.worst_lower);
      line("upper_nodes", static_cast<double>(o.report.upper_nodes));
      line("lower_nodes", static_cast<double>(o.report.lower_nodes));
      line("margin", o.report.margin);
      line("generation_lower_violation", o.generation_envelope.max_lower_violation);
      line("generation_upper_violation", o.generation_envelope.max_upper_violation);
      if (o.motion_checked) {
        line("motion_lower_violation", o.motion_envelope.max_lower_violation);
        line("motion_upper_violation", o.motion_envelope.max_upper_violation);
      }
      out.write("generation_report.txt", text);
      out.write("snapshots/u_generation.txt", format_snapshot(o.u_generation, generation_time(o.eps), o.eps));
      for (const auto& n : o.notices) out.notice(n);
      emit_envelope_plot(o, config, out);
      status = o.passed() ? 0 : 3;
      break;
    }
  }
  out.timing(mode_name(config.mode), seconds_since(start));
  out.set_status(status == 0 ? "ok" : "acceptance check failed");
  return status;
}

}  // namespace chemolimit
