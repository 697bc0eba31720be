#include "chemolimit/sharp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "chemolimit/error.hpp"
#include "chemolimit/operators.hpp"

namespace chemolimit {

double zeta(double s, double d0) {
  const double a = std::abs(s);
  if (a <= 2.0 * d0) return s;
  const double sign = s < 0.0 ? -1.0 : 1.0;
  if (a >= 3.0 * d0) return sign * 3.0 * d0;
  const double t = (a - 2.0 * d0) / d0;
  const double phi = t + t * t * t * (4.0 + t * (-7.0 + 3.0 * t));
  return sign * (2.0 * d0 + d0 * phi);
}

double zeta_prime(double s, double d0) {
  const double a = std::abs(s);
  if (a <= 2.0 * d0) return 1.0;
  if (a >= 3.0 * d0) return 0.0;
  const double t = (a - 2.0 * d0) / d0;
  return (1.0 - t) * (1.0 - t) * (15.0 * t * t + 2.0 * t + 1.0);
}

ScalarField cutoff(const ScalarField& d_tilde, double d0) {
  if (!(d0 > 0.0)) throw DomainError("cutoff: d0 must be positive");
  ScalarField out(d_tilde.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = zeta(d_tilde[k], d0);
  return out;
}

ScalarField step_field(const ScalarField& d) {
  ScalarField out(d.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = d[k] < 0.0 ? 1.0 : 0.0;
  return out;
}

ScalarField circle_distance(const Grid& grid, double cx, double cy, double radius) {
  return ScalarField::from_function(grid, [&](double x, double y) { return std::hypot(x - cx, y - cy) - radius; });
}

namespace {

/// Piecewise tensor-cubic Lagrange interpolant of node data with mirror extension.
class CubicInterpolant {
 public:
  explicit CubicInterpolant(const ScalarField& f) : f_(f), g_(f.grid()) {}

  void eval(double px, double py, double& value, double& gx, double& gy) const {
    px = std::clamp(px, 0.0, g_.lx());
    py = std::clamp(py, 0.0, g_.ly());
    int i = std::min(static_cast<int>(px / g_.hx()), g_.nx() - 2);
    int j = std::min(static_cast<int>(py / g_.hy()), g_.ny() - 2);
    double tx = px / g_.hx() - i, ty = py / g_.hy() - j;
    double wx[4], dwx[4], wy[4], dwy[4];
    weights(tx, wx, dwx);
    weights(ty, wy, dwy);
    value = gx = gy = 0.0;
    for (int b = 0; b < 4; ++b) {
      int jj = mirror(j - 1 + b, g_.ny());
      double row = 0.0, drow = 0.0;
      for (int a = 0; a < 4; ++a) {
        double v = f_(mirror(i - 1 + a, g_.nx()), jj);
        row += wx[a] * v;
        drow += dwx[a] * v;
      }
      value += wy[b] * row;
      gx += wy[b] * drow;
      gy += dwy[b] * row;
    }
    gx /= g_.hx();
    gy /= g_.hy();
  }

 private:
  static int mirror(int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * (n - 1) - i;
    return i;
  }
  static void weights(double t, double* w, double* dw) {
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -(t + 1.0) * t * (t - 2.0) / 2.0;
    w[3] = (t + 1.0) * t * (t - 1.0) / 6.0;
    dw[0] = -(3.0 * t * t - 6.0 * t + 2.0) / 6.0;
    dw[1] = (3.0 * t * t - 4.0 * t - 1.0) / 2.0;
    dw[2] = -(3.0 * t * t - 2.0 * t - 2.0) / 2.0;
    dw[3] = (3.0 * t * t - 1.0) / 6.0;
  }

  const ScalarField& f_;
  const Grid& g_;
};

struct Projection {
  double px, py;
  bool ok;
};

/// Closest point on {phi = 0} to (x, y) starting from (px, py): alternate a normal step onto
/// the level set and a damped tangential step towards the foot point.
Projection project(const CubicInterpolant& phi, double x, double y, double px, double py, double tol) {
  double omega = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    double v, gx, gy;
    phi.eval(px, py, v, gx, gy);
    double g2 = gx * gx + gy * gy;
    if (!(g2 > 1e-20)) return {px, py, false};
    double s1 = -v / g2;
    double d1x = s1 * gx, d1y = s1 * gy;
    double rx = x - px, ry = y - py;
    double rn = (rx * gx + ry * gy) / g2;
    double d2x = omega * (rx - rn * gx), d2y = omega * (ry - rn * gy);
    double step = std::hypot(d1x, d1y) + std::hypot(d2x, d2y);
    px += d1x + d2x;
    py += d1y + d2y;
    if (step < tol) return {px, py, true};
    if (step > 0.9 * prev) omega *= 0.5;
    prev = step;
  }
  double v, gx, gy;
  phi.eval(px, py, v, gx, gy);
  return {px, py, std::abs(v) < tol * std::sqrt(gx * gx + gy * gy) * 10.0};
}

}  // namespace

ScalarField redistance(const ScalarField& d, double band) {
  if (!(band > 0.0)) throw DomainError("redistance: band must be positive");
  const Grid& g = d.grid();
  const int nx = g.nx(), ny = g.ny();
  const double d0 = 0.5 * band;
  const double reach = 3.0 * d0 + 2.0 * std::max(g.hx(), g.hy());
  const double tol = 1e-9 * g.h_min();
  const std::size_t n = g.size();
  const double inf = std::numeric_limits<double>::infinity();

  std::vector<double> dist(n, inf), cpx(n, 0.0), cpy(n, 0.0);
  std::vector<char> done(n, 0);
  std::vector<char> seed(n, 0);
  CubicInterpolant phi(d);

  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue;

  bool any_interface = false;
  for (int j = 0; j < ny - 1; ++j) {
    for (int i = 0; i < nx - 1; ++i) {
      bool a = d(i, j) < 0.0, b = d(i + 1, j) < 0.0, c = d(i, j + 1) < 0.0, e = d(i + 1, j + 1) < 0.0;
      if (a == b && b == c && c == e) continue;
      any_interface = true;
      seed[g.index(i, j)] = seed[g.index(i + 1, j)] = seed[g.index(i, j + 1)] = seed[g.index(i + 1, j + 1)] = 1;
    }
  }
  if (!any_interface) throw NumericalError("interface vanished");

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t k = g.index(i, j);
      if (!seed[k]) continue;
      const double x = g.x(i), y = g.y(j);
      double v, gx, gy;
      phi.eval(x, y, v, gx, gy);
      double g2 = gx * gx + gy * gy;
      double px = x, py = y;
      if (g2 > 1e-20) {
        px = x - v * gx / g2;
        py = y - v * gy / g2;
      }
      Projection p = project(phi, x, y, px, py, tol);
      if (!p.ok) continue;
      double r = std::hypot(x - p.px, y - p.py);
      if (r < dist[k]) {
        dist[k] = r;
        cpx[k] = p.px;
        cpy[k] = p.py;
        queue.emplace(r, k);
      }
    }
  }

  while (!queue.empty()) {
    auto [r, k] = queue.top();
    queue.pop();
    if (done[k] || r > dist[k]) continue;
    const int i = static_cast<int>(k % static_cast<std::size_t>(nx));
    const int j = static_cast<int>(k / static_cast<std::size_t>(nx));
    const double x = g.x(i), y = g.y(j);
    if (!seed[k]) {
      Projection p = project(phi, x, y, cpx[k], cpy[k], tol);
      if (p.ok) {
        double refined = std::hypot(x - p.px, y - p.py);
        if (refined <= dist[k] + tol) {
          dist[k] = refined;
          cpx[k] = p.px;
          cpy[k] = p.py;
        }
      }
    }
    done[k] = 1;
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const int ii = i + di, jj = j + dj;
        if ((di == 0 && dj == 0) || ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
        const std::size_t kk = g.index(ii, jj);
        if (done[kk]) continue;
        double cand = std::hypot(g.x(ii) - cpx[k], g.y(jj) - cpy[k]);
        if (cand < dist[kk] && cand <= reach) {
          dist[kk] = cand;
          cpx[kk] = cpx[k];
          cpy[kk] = cpy[k];
          queue.emplace(cand, kk);
        }
      }
    }
  }

  ScalarField out(g);
  for (std::size_t k = 0; k < n; ++k) {
    double sign = d[k] < 0.0 ? -1.0 : 1.0;
    double r = done[k] ? dist[k] : 3.0 * d0;
    out[k] = zeta(sign * r, d0);
  }
  return out;
}

void SharpParams::validate() const {
  if (!(alpha >= 0.0)) throw DomainError("sharp: alpha must be nonnegative");
  if (!(gamma > 0.0)) throw DomainError("sharp: gamma must be positive");
  if (!(d0 > 0.0)) throw DomainError("sharp: d0 must be positive");
  if (redistance_every < 1) throw DomainError("sharp: redistance_every must be >= 1");
  if (dt < 0.0) throw DomainError("sharp: dt must be nonnegative");
  chi.validate();
}

ScalarField solve_v0(const LevelSetState& state, double gamma, double tol) {
  return solve_helmholtz_neumann(step_field(state.d), gamma, tol);
}

SharpSolver::SharpSolver(const SharpParams& params, const ScalarField& d_initial, double t0, bool reinitialize)
    : params_(params),
      state_{t0, reinitialize ? redistance(d_initial, 2.0 * params.d0) : d_initial, params.d0, ScalarField(d_initial.grid())},
      helmholtz_(d_initial.grid(), params.gamma, params.helmholtz_tol),
      step_(d_initial.grid(), -1.0),
      chi_v0_(d_initial.grid()) {
  params_.validate();
  refresh_v0();
  const Grid& g = d_initial.grid();
  dt_ = params_.dt > 0.0 ? params_.dt : 0.2 * g.h_min() * g.h_min();
  if (params_.dt == 0.0) {
    VectorField grad = gradient_neumann(chi_v0_);
    double vmax = 0.0;
    for (std::size_t k = 0; k < grad.x.size(); ++k) vmax = std::max(vmax, std::hypot(grad.x[k], grad.y[k]));
    // Leave headroom for the drift to grow as the interface moves.
    if (vmax > 0.0) dt_ = std::min(dt_, 0.25 * g.h_min() / vmax);
  }
}

void SharpSolver::refresh_v0() {
  ScalarField s = step_field(state_.d);
  if (std::equal(s.data(), s.data() + s.size(), step_.data())) return;
  step_ = std::move(s);
  helmholtz_.solve_into(step_, state_.v0);
  chi_v0_ = apply_chi(params_.chi, state_.v0);
  ++refreshes_;
}

void SharpSolver::step(double dt) {
  const Grid& g = state_.d.grid();
  const int nx = g.nx(), ny = g.ny();
  const double hmin = g.h_min();
  if (!(dt > 0.0) || dt > 0.2 * hmin * hmin * (1.0 + 1e-12))
    throw NumericalError("sharp: CFL violation (dt > 0.2 h^2)", dt);
  const double band = 2.0 * state_.d0;
  const double ix2 = 1.0 / (g.hx() * g.hx()), iy2 = 1.0 / (g.hy() * g.hy());
  const double ihx = 0.5 / g.hx(), ihy = 0.5 / g.hy();
  const double source = std::numbers::sqrt2 * params_.alpha;
  const ScalarField& d = state_.d;
  ScalarField next = d;
  const bool drift = params_.chi.k != 0.0;
  double max_drift = 0.0;
  for (int j = 0; j < ny; ++j) {
    const int js = j == 0 ? 1 : j - 1, jn = j == ny - 1 ? ny - 2 : j + 1;
    for (int i = 0; i < nx; ++i) {
      const double c = d(i, j);
      if (std::abs(c) >= band) continue;
      const int iw = i == 0 ? 1 : i - 1, ie = i == nx - 1 ? nx - 2 : i + 1;
      double lap = (d(iw, j) + d(ie, j) - 2.0 * c) * ix2 + (d(i, js) + d(i, jn) - 2.0 * c) * iy2;
      double adv = 0.0;
      if (drift) {
        double cx = (chi_v0_(ie, j) - chi_v0_(iw, j)) * ihx;
        double cy = (chi_v0_(i, jn) - chi_v0_(i, js)) * ihy;
        if (i == 0 || i == nx - 1) cx = 0.0;
        if (j == 0 || j == ny - 1) cy = 0.0;
        max_drift = std::max(max_drift, std::hypot(cx, cy));
        adv = (d(ie, j) - d(iw, j)) * ihx * cx + (d(i, jn) - d(i, js)) * ihy * cy;
      }
      double value = c + dt * (lap - adv - source);
      next(i, j) = value;
    }
  }
  if (dt * max_drift > 0.5 * hmin) throw NumericalError("sharp: CFL violation (drift)", dt * max_drift / hmin);
  const bool has_inside = std::any_of(next.data(), next.data() + next.size(), [](double v) { return v < 0.0; });
  const bool has_outside = std::any_of(next.data(), next.data() + next.size(), [](double v) { return v >= 0.0; });
  if (!has_inside || !has_outside) throw NumericalError("interface vanished");
  state_.d = std::move(next);
  state_.t += dt;
  ++steps_;
  if (steps_ % params_.redistance_every == 0) state_.d = redistance(state_.d, band);
  refresh_v0();
}

void SharpSolver::advance_to(double t) {
  while (state_.t < t) {
    double remaining = t - state_.t;
    if (remaining <= 1e-12 * std::max(1.0, t)) {
      state_.t = t;
      break;
    }
    double h = dt_;
    if (remaining < 1.5 * dt_) h = remaining <= dt_ ? remaining : 0.5 * remaining;
    step(h);
    if (h == remaining) state_.t = t;
  }
}

LevelSetState step_levelset(const LevelSetState& state, double dt, const SharpParams& params) {
  SharpParams p = params;
  p.d0 = state.d0;
  SharpSolver solver(p, state.d, state.t, false);
  solver.step(dt);
  return solver.state();
}

std::vector<SharpSnapshot> run_sharp(const SharpParams& params, const ScalarField& d_initial, double t_end,
                                     const std::vector<double>& probe_times,
                                     const std::function<void(const LevelSetState&)>& on_probe) {
  std::vector<double> times = probe_times;
  std::sort(times.begin(), times.end());
  for (double t : times)
    if (t < 0.0 || t > t_end) throw DomainError("run_sharp: probe time outside [0, t_end]");
  SharpSolver solver(params, d_initial);
  std::vector<SharpSnapshot> out;
  for (double t : times) {
    solver.advance_to(t);
    out.push_back({solver.state().t, solver.state().d});
    if (on_probe) on_probe(solver.state());
  }
  solver.advance_to(t_end);
  return out;
}

// ---------------------------------------------------------------------------------------------
// Radial reference problem.

namespace {

struct Ode2 {
  double phi, psi;
};

// phi'' + phi'/r - gamma phi = 0 as a first-order system, one RK4 step.
Ode2 radial_rk4(Ode2 y, double r, double h, double gamma) {
  auto rhs = [gamma](double rr, Ode2 s) { return Ode2{s.psi, gamma * s.phi - s.psi / rr}; };
  Ode2 k1 = rhs(r, y);
  Ode2 k2 = rhs(r + 0.5 * h, {y.phi + 0.5 * h * k1.phi, y.psi + 0.5 * h * k1.psi});
  Ode2 k3 = rhs(r + 0.5 * h, {y.phi + 0.5 * h * k2.phi, y.psi + 0.5 * h * k2.psi});
  Ode2 k4 = rhs(r + h, {y.phi + h * k3.phi, y.psi + h * k3.psi});
  return {y.phi + h * (k1.phi + 2 * k2.phi + 2 * k3.phi + k4.phi) / 6.0,
          y.psi + h * (k1.psi + 2 * k2.psi + 2 * k3.psi + k4.psi) / 6.0};
}

constexpr int kRadialSteps = 4000;

// Regular solution with phi(0) = 1, evaluated at r_end.
Ode2 inner_solution(double r_end, double gamma) {
  const double h = r_end / kRadialSteps;
  double r = std::min(1e-4 * r_end, 1e-6);
  Ode2 y{1.0 + gamma * r * r / 4.0 + gamma * gamma * r * r * r * r / 64.0,
         gamma * r / 2.0 + gamma * gamma * r * r * r / 16.0};
  while (r < r_end) {
    double step = std::min({h, 0.05 * r + 1e-12, r_end - r});
    if (r_end - r - step < 1e-14 * r_end) step = r_end - r;
    y = radial_rk4(y, r, step, gamma);
    r += step;
  }
  return y;
}

// Solution with phi(r_out) = 1, phi'(r_out) = 0, integrated inwards to r_end.
Ode2 outer_solution(double r_end, double r_out, double gamma) {
  const int steps = kRadialSteps;
  const double h = (r_end - r_out) / steps;
  Ode2 y{1.0, 0.0};
  for (int k = 0; k < steps; ++k) y = radial_rk4(y, r_out + k * h, h, gamma);
  return y;
}

struct RadialMatch {
  double a, b;
  Ode2 in, out;
};

RadialMatch radial_match(double radius, double gamma, double r_out) {
  if (!(radius > 0.0) || !(radius < r_out)) throw DomainError("radial solve: need 0 < R < r_out");
  if (!(gamma > 0.0)) throw DomainError("radial solve: gamma must be positive");
  Ode2 in = inner_solution(radius, gamma);
  Ode2 out = outer_solution(radius, r_out, gamma);
  double den = in.psi * out.phi - in.phi * out.psi;
  double a = out.psi / (gamma * den);
  double b = a * in.psi / out.psi;
  return {a, b, in, out};
}

}  // namespace

RadialProfile radial_v0(double radius, double gamma, double r_out) {
  RadialMatch m = radial_match(radius, gamma, r_out);
  return {1.0 / gamma + m.a * m.in.phi, m.a * m.in.psi, 1.0 / gamma + m.a};
}

double radial_v0_at(double radius, double gamma, double r_out, double r) {
  RadialMatch m = radial_match(radius, gamma, r_out);
  if (r <= 0.0) return 1.0 / gamma + m.a;
  if (r < radius) return 1.0 / gamma + m.a * inner_solution(r, gamma).phi;
  if (r >= r_out) return m.b;
  return m.b * outer_solution(r, r_out, gamma).phi;
}

double RadialTrajectory::radius_at(double time) const {
  if (t.empty()) throw DomainError("radius_at: empty trajectory");
  if (time <= t.front()) return radius.front();
  if (time >= t.back()) return radius.back();
  auto it = std::upper_bound(t.begin(), t.end(), time);
  std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  double h = t[k + 1] - t[k];
  double s = (time - t[k]) / h;
  double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * radius[k] + h10 * h * rate[k] + h01 * radius[k + 1] + h11 * h * rate[k + 1];
}

RadialTrajectory radial_oracle(double r0, const RadialParams& params, double t_end, double rel_tol) {
  if (!(r0 > 0.0) || !(r0 < params.r_out)) throw DomainError("radial_oracle: need 0 < R0 < r_out");
  if (!(t_end >= 0.0)) throw DomainError("radial_oracle: t_end must be nonnegative");
  params.chi.validate();
  const double source = std::numbers::sqrt2 * params.alpha;
  auto velocity = [&](double radius) {
    double drift = 0.0;
    if (params.chi.k != 0.0) {
      RadialProfile p = radial_v0(radius, params.gamma, params.r_out);
      drift = params.chi.derivative(p.v_at_r) * p.dv_dr;
    }
    return -1.0 / radius + drift + source;
  };
  auto rk4 = [&](double radius, double h, bool& valid) {
    valid = true;
    double k1 = velocity(radius);
    double r2 = radius + 0.5 * h * k1;
    if (r2 <= 0.0 || r2 >= params.r_out) return (valid = false, radius);
    double k2 = velocity(r2);
    double r3 = radius + 0.5 * h * k2;
    if (r3 <= 0.0 || r3 >= params.r_out) return (valid = false, radius);
    double k3 = velocity(r3);
    double r4 = radius + h * k3;
    if (r4 <= 0.0 || r4 >= params.r_out) return (valid = false, radius);
    double k4 = velocity(r4);
    return radius + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
  };

  RadialTrajectory out;
  double t = 0.0, radius = r0;
  out.t.push_back(t);
  out.radius.push_back(radius);
  out.rate.push_back(velocity(radius));
  const double r_min = 1e-3 * r0;
  double h = std::min(1e-4, t_end > 0 ? t_end : 1e-4);
  // Keeps the Hermite dense output as accurate as the steps.
  const double h_max = t_end / 256.0;
  while (t < t_end) {
    bool last = false;
    if (t + h >= t_end) {
      h = t_end - t;
      last = true;
    }
    bool v1, v2, v3;
    double full = rk4(radius, h, v1);
    double mid = rk4(radius, 0.5 * h, v2);
    double half = v2 ? rk4(mid, 0.5 * h, v3) : radius;
    if (!(v1 && v2 && v3) || half <= 0.0 || full <= 0.0) {
      if (radius < 10.0 * r_min || h < 1e-15) {
        out.collapsed = true;
        out.collapse_time = t;
        return out;
      }
      h *= 0.25;
      continue;
    }
    double err = std::abs(half - full) / 15.0;
    if (err <= rel_tol * radius) {
      radius = half + (half - full) / 15.0;
      t = last ? t_end : t + h;
      out.t.push_back(t);
      out.radius.push_back(radius);
      if (radius >= params.r_out) throw DomainError("radial_oracle: interface reached the outer boundary");
      if (radius <= r_min) {
        out.rate.push_back(-1.0 / radius);
        out.collapsed = true;
        out.collapse_time = t;
        return out;
      }
      out.rate.push_back(velocity(radius));
      h *= std::clamp(err > 0 ? 0.9 * std::pow(rel_tol * radius / err, 0.2) : 4.0, 0.2, 4.0);
      h = std::min(h, h_max);
    } else {
      h *= std::clamp(0.9 * std::pow(rel_tol * radius / err, 0.2), 0.1, 0.9);
    }
  }
  return out;
}

}  // namespace chemolimit
