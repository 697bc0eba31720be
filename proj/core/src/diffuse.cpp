#include "chemolimit/diffuse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chemolimit/error.hpp"
#include "chemolimit/expression.hpp"
#include "chemolimit/sharp.hpp"

namespace chemolimit {

void ChiSpec::validate() const {
  if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("chi: k must be nonnegative");
}

ScalarField apply_chi(const ChiSpec& chi, const ScalarField& v) {
  ScalarField out(v.grid());
  for (std::size_t n = 0; n < v.size(); ++n) out[n] = chi(v[n]);
  return out;
}

void ModelParams::validate() const {
  if (!(eps > 0.0 && eps <= 0.2)) throw DomainError("eps must lie in (0, 0.2] (asymptotic regime)");
  bistable().validate();
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  chi.validate();
  if (dt < 0.0) throw DomainError("dt must be nonnegative");
  if (time_step() > 0.2 * eps * eps * (1.0 + 1e-12)) throw DomainError("dt exceeds the stability bound 0.2 eps^2");
  if (!(t_end >= 0.0)) throw DomainError("t_end must be nonnegative");
  grid();
}

double generation_time(double eps) { return 4.0 * eps * eps * std::abs(std::log(eps)); }

namespace {

double boundary_margin_circle(const InitialSpec& spec, const Grid& grid) {
  return std::min({spec.cx - spec.radius, grid.lx() - spec.cx - spec.radius, spec.cy - spec.radius,
                   grid.ly() - spec.cy - spec.radius});
}

double boundary_margin_custom(const InitialSpec& spec, const Grid& grid) {
  Expression expr(spec.expression);
  double margin = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int j = 0; j < grid.ny() - 1; ++j) {
    for (int i = 0; i < grid.nx() - 1; ++i) {
      bool a = expr(grid.x(i), grid.y(j)) > 0.5, b = expr(grid.x(i + 1), grid.y(j)) > 0.5;
      bool c = expr(grid.x(i), grid.y(j + 1)) > 0.5, e = expr(grid.x(i + 1), grid.y(j + 1)) > 0.5;
      if (a == b && b == c && c == e) continue;
      found = true;
      double x = grid.x(i) + 0.5 * grid.hx(), y = grid.y(j) + 0.5 * grid.hy();
      double m = std::min({x, grid.lx() - x, y, grid.ly() - y}) - std::max(grid.hx(), grid.hy());
      margin = std::min(margin, m);
    }
  }
  if (!found) throw DomainError("initial datum never crosses 1/2");
  return margin;
}

double boundary_margin(const InitialSpec& spec, const Grid& grid) {
  if (spec.kind == InitialSpec::Kind::custom) return boundary_margin_custom(spec, grid);
  if (!(spec.radius > 0.0)) throw DomainError("initial circle radius must be positive");
  return boundary_margin_circle(spec, grid);
}

}  // namespace

double default_cutoff_radius(const InitialSpec& spec, const Grid& grid) {
  double margin = boundary_margin(spec, grid);
  if (!(margin > 0.0)) throw DomainError("interface too close to boundary");
  return std::min(0.1 * std::min(grid.lx(), grid.ly()), 0.999 * margin / 4.0);
}

double cutoff_radius(const InitialSpec& spec, const Grid& grid) {
  double d0 = spec.d0 > 0.0 ? spec.d0 : default_cutoff_radius(spec, grid);
  if (!(boundary_margin(spec, grid) > 4.0 * d0)) throw DomainError("interface too close to boundary (margin <= 4 d0)");
  return d0;
}

ScalarField initial_distance(const InitialSpec& spec, const Grid& grid) {
  const double d0 = cutoff_radius(spec, grid);
  if (spec.kind == InitialSpec::Kind::custom) {
    Expression expr(spec.expression);
    ScalarField phi = ScalarField::from_function(grid, [&](double x, double y) { return 0.5 - expr(x, y); });
    return redistance(phi, 2.0 * d0);
  }
  return cutoff(circle_distance(grid, spec.cx, spec.cy, spec.radius), d0);
}

ScalarField initial_data(const InitialSpec& spec, const ModelParams& params) {
  const Grid grid = params.grid();
  if (spec.kind == InitialSpec::Kind::custom) {
    cutoff_radius(spec, grid);
    Expression expr(spec.expression);
    ScalarField u = ScalarField::from_function(grid, [&](double x, double y) { return expr(x, y); });
    if (!u.all_finite()) throw DomainError("custom initial datum is not finite");
    if (max_boundary_normal_slope(u) > 1e-10) throw DomainError("custom initial datum is not flat at the boundary");
    return u;
  }
  ScalarField d = initial_distance(spec, grid);
  ScalarField u(grid);
  if (spec.kind == InitialSpec::Kind::prepared) {
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = u0(d[k] / params.eps);
  } else {
    if (!(spec.width > 0.0)) throw DomainError("unprepared width must be positive");
    for (std::size_t k = 0; k < u.size(); ++k) u[k] = 0.5 - spec.amplitude * std::tanh(d[k] / spec.width);
  }
  return u;
}

DiffuseStepper::DiffuseStepper(const ModelParams& params)
    : params_(params), elliptic_((params.validate(), params.grid()), params.gamma, params.helmholtz_tol) {}

DiffuseStepper::~DiffuseStepper() = default;

HelmholtzSolver& DiffuseStepper::implicit_solver(double dt) {
  for (auto& [key, solver] : implicit_)
    if (key == dt) return *solver;
  if (implicit_.size() >= 4) implicit_.erase(implicit_.begin() + 1);
  implicit_.emplace_back(dt, std::make_unique<HelmholtzSolver>(params_.grid(), 1.0 / dt, params_.helmholtz_tol));
  return *implicit_.back().second;
}

DiffuseState DiffuseStepper::initial_state(const ScalarField& u0_field) {
  require_same_grid(params_.grid(), u0_field.grid(), "DiffuseStepper::initial_state");
  if (!u0_field.all_finite()) throw DomainError("initial datum is not finite");
  return {0.0, u0_field, elliptic_.solve(u0_field)};
}

void DiffuseStepper::step(DiffuseState& state, double dt) {
  const double eps = params_.eps;
  if (!(dt > 0.0) || dt > 0.2 * eps * eps * (1.0 + 1e-12))
    throw DomainError("diffuse step: dt outside (0, 0.2 eps^2]");
  const BistableSpec spec = params_.bistable();
  ScalarField drift = drift_divergence(state.u, apply_chi(params_.chi, state.v), params_.drift_average);
  ScalarField rhs(state.u.grid());
  const double inv_dt = 1.0 / dt, inv_eps2 = 1.0 / (eps * eps);
  for (std::size_t k = 0; k < rhs.size(); ++k)
    rhs[k] = state.u[k] * inv_dt - drift[k] + inv_eps2 * f_eps(state.u[k], eps, spec);
  implicit_solver(dt).solve_chain(rhs, state.u, elliptic_, state.v);
  const double lo = state.u.min(), hi = state.u.max();
  if (!(lo >= -0.5) || !(hi <= params_.c0 + 0.5))
    throw NumericalError("blow-up guard tripped", std::max(-0.5 - lo, hi - params_.c0 - 0.5));
  state.t += dt;
}

DiffuseState step(const DiffuseState& state, const ModelParams& params) {
  DiffuseStepper stepper(params);
  DiffuseState next = state;
  stepper.step(next);
  return next;
}

namespace {

DiffuseRecord make_record(const DiffuseState& s, double gamma) {
  return {s.t, s.u.min(), s.u.max(), integrate(s.u), integrate(s.v), helmholtz_residual(s.v, s.u, gamma)};
}

}  // namespace

DiffuseTrajectory run_diffuse(const ModelParams& params, const ScalarField& u0_field, const RunOptions& options) {
  params.validate();
  const double t_end = params.t_end;
  const double dt = params.time_step();
  const double tiny = 1e-12 * std::max(1.0, t_end);

  std::vector<double> probes = options.probe_times;
  for (double p : probes)
    if (p < 0.0 || p > t_end + tiny) throw DomainError("probe time outside [0, t_end]");
  std::vector<double> landings{t_end};
  const double tg = generation_time(params.eps);
  if (options.generation_probe && tg <= t_end) {
    landings.push_back(tg);
    probes.push_back(tg);
  }
  std::sort(landings.begin(), landings.end());
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end(), [&](double a, double b) { return std::abs(a - b) <= tiny; }),
               probes.end());

  DiffuseStepper stepper(params);
  DiffuseState state = stepper.initial_state(u0_field);
  DiffuseTrajectory out;
  out.records.push_back(make_record(state, params.gamma));

  std::size_t next_probe = 0;
  auto emit = [&]() {
    out.records.push_back(make_record(state, params.gamma));
    if (options.keep_snapshots) out.snapshots.push_back(state);
    if (options.on_probe) options.on_probe(state);
  };
  auto is_landing = [&](double p) {
    return std::any_of(landings.begin(), landings.end(), [&](double l) { return std::abs(l - p) <= tiny; });
  };
  auto flush_probes = [&]() {
    while (next_probe < probes.size()) {
      double p = probes[next_probe];
      bool due = is_landing(p) ? std::abs(state.t - p) <= tiny : state.t >= p - 0.5 * dt;
      if (!due) break;
      emit();
      ++next_probe;
    }
  };

  flush_probes();
  std::size_t next_landing = 0;
  while (state.t < t_end - tiny) {
    while (next_landing < landings.size() && landings[next_landing] <= state.t + tiny) ++next_landing;
    const double target = landings[next_landing];
    const double remaining = target - state.t;
    const bool lands = remaining <= dt * (1.0 + 1e-9);
    stepper.step(state, lands ? remaining : dt);
    if (lands) state.t = target;
    ++out.steps;
    flush_probes();
  }
  out.final_state = state;
  return out;
}

}  // namespace chemolimit
