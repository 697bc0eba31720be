#include "chemolimit/helmholtz.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "chemolimit/error.hpp"
#include "chemolimit/operators.hpp"

namespace chemolimit {

namespace {

// FFTW's planner is not re-entrant; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void check_inputs(const ScalarField& rhs, double gamma, double tol) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("helmholtz: gamma must be positive");
  if (!(tol > 0.0)) throw DomainError("helmholtz: tol must be positive");
  if (!rhs.all_finite()) throw DomainError("helmholtz: right-hand side is not finite");
}

void verify(const ScalarField& v, const ScalarField& rhs, double gamma, double tol, HelmholtzStats* stats) {
  double res = helmholtz_residual(v, rhs, gamma);
  if (stats) stats->residual = res;
  double bound = std::max(tol * rhs.max_abs(), helmholtz_rounding_floor(v, gamma));
  if (!(res <= bound))
    throw NumericalError("helmholtz: residual " + std::to_string(res) + " exceeds tolerance", res);
}

}  // namespace

double helmholtz_residual(const ScalarField& v, const ScalarField& rhs, double gamma) {
  require_same_grid(v.grid(), rhs.grid(), "helmholtz_residual");
  ScalarField lap = laplacian_neumann(v);
  double m = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) m = std::max(m, std::abs(-lap[k] + gamma * v[k] - rhs[k]));
  return m;
}

double helmholtz_rounding_floor(const ScalarField& v, double gamma) {
  const Grid& g = v.grid();
  double stencil = 4.0 / (g.hx() * g.hx()) + 4.0 / (g.hy() * g.hy()) + gamma;
  return 16.0 * std::numeric_limits<double>::epsilon() * stencil * v.max_abs();
}

struct HelmholtzSolver::Impl {
  Grid grid;
  double gamma;
  double tol;
  double* buffer = nullptr;
  fftw_plan plan = nullptr;
  std::vector<double> inv_symbol;

  Impl(const Grid& g, double gm, double t) : grid(g), gamma(gm), tol(t) {
    const int nx = g.nx(), ny = g.ny();
    buffer = static_cast<double*>(fftw_malloc(sizeof(double) * g.size()));
    if (!buffer) throw std::bad_alloc();
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      plan = fftw_plan_r2r_2d(ny, nx, buffer, buffer, FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE);
    }
    if (!plan) {
      fftw_free(buffer);
      throw NumericalError("helmholtz: FFTW plan creation failed");
    }
    std::vector<double> lx(nx), ly(ny);
    for (int k = 0; k < nx; ++k)
      lx[k] = (2.0 - 2.0 * std::cos(std::numbers::pi * k / (nx - 1))) / (g.hx() * g.hx());
    for (int k = 0; k < ny; ++k)
      ly[k] = (2.0 - 2.0 * std::cos(std::numbers::pi * k / (ny - 1))) / (g.hy() * g.hy());
    // DCT-I is its own inverse up to 2(n-1) per axis.
    const double norm = 1.0 / (4.0 * (nx - 1) * (ny - 1));
    inv_symbol.resize(g.size());
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) inv_symbol[g.index(i, j)] = norm / (gamma + lx[i] + ly[j]);
  }

  ~Impl() {
    if (plan) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    if (buffer) fftw_free(buffer);
  }
};

HelmholtzSolver::HelmholtzSolver(const Grid& grid, double gamma, double tol) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("helmholtz: gamma must be positive");
  if (!(tol > 0.0)) throw DomainError("helmholtz: tol must be positive");
  impl_ = std::make_unique<Impl>(grid, gamma, tol);
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver&&) noexcept = default;
HelmholtzSolver& HelmholtzSolver::operator=(HelmholtzSolver&&) noexcept = default;

const Grid& HelmholtzSolver::grid() const { return impl_->grid; }
double HelmholtzSolver::gamma() const { return impl_->gamma; }

ScalarField HelmholtzSolver::solve(const ScalarField& rhs, HelmholtzStats* stats) {
  ScalarField out(impl_->grid);
  solve_into(rhs, out, stats);
  return out;
}

void HelmholtzSolver::solve_into(const ScalarField& rhs, ScalarField& out, HelmholtzStats* stats) {
  require_same_grid(impl_->grid, rhs.grid(), "HelmholtzSolver::solve");
  require_same_grid(impl_->grid, out.grid(), "HelmholtzSolver::solve");
  check_inputs(rhs, impl_->gamma, impl_->tol);
  const std::size_t n = rhs.size();
  const double first = rhs[0];
  if (std::all_of(rhs.data(), rhs.data() + n, [first](double r) { return r == first; })) {
    std::fill(out.data(), out.data() + n, first / impl_->gamma);
    if (stats) *stats = HelmholtzStats{helmholtz_residual(out, rhs, impl_->gamma), 0};
    return;
  }
  double* b = impl_->buffer;
  std::copy(rhs.data(), rhs.data() + n, b);
  fftw_execute(impl_->plan);
  for (std::size_t k = 0; k < n; ++k) b[k] *= impl_->inv_symbol[k];
  fftw_execute(impl_->plan);
  std::copy(b, b + n, out.data());
  if (stats) stats->iterations = 0;
  verify(out, rhs, impl_->gamma, impl_->tol, stats);
}

void HelmholtzSolver::solve_chain(const ScalarField& rhs, ScalarField& out, HelmholtzSolver& next,
                                  ScalarField& next_out) {
  require_same_grid(impl_->grid, next.grid(), "HelmholtzSolver::solve_chain");
  require_same_grid(impl_->grid, rhs.grid(), "HelmholtzSolver::solve_chain");
  require_same_grid(impl_->grid, out.grid(), "HelmholtzSolver::solve_chain");
  require_same_grid(impl_->grid, next_out.grid(), "HelmholtzSolver::solve_chain");
  check_inputs(rhs, impl_->gamma, impl_->tol);
  const std::size_t n = rhs.size();
  const double first = rhs[0];
  if (std::all_of(rhs.data(), rhs.data() + n, [first](double r) { return r == first; })) {
    solve_into(rhs, out);
    next.solve_into(out, next_out);
    return;
  }
  double* b = impl_->buffer;
  double* c = next.impl_->buffer;
  std::copy(rhs.data(), rhs.data() + n, b);
  fftw_execute(impl_->plan);
  // The DCT-I round trip carries the normalisation, so B^-1 applies to the unnormalised A^-1 rhs.
  const double scale = 4.0 * (impl_->grid.nx() - 1) * (impl_->grid.ny() - 1);
  for (std::size_t k = 0; k < n; ++k) {
    b[k] *= impl_->inv_symbol[k];
    c[k] = b[k] * scale * next.impl_->inv_symbol[k];
  }
  fftw_execute(impl_->plan);
  fftw_execute(next.impl_->plan);
  std::copy(b, b + n, out.data());
  std::copy(c, c + n, next_out.data());
  verify(out, rhs, impl_->gamma, impl_->tol, nullptr);
  verify(next_out, out, next.impl_->gamma, next.impl_->tol, nullptr);
}

ScalarField solve_helmholtz_cg(const ScalarField& rhs, double gamma, double tol, long max_iterations,
                               const ScalarField* initial_guess, HelmholtzStats* stats) {
  check_inputs(rhs, gamma, tol);
  const Grid& g = rhs.grid();
  const std::size_t n = g.size();
  if (max_iterations <= 0) max_iterations = 10 * static_cast<long>(n);

  // W A is symmetric positive definite for trapezoid weights W.
  std::vector<double> w(n);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) w[g.index(i, j)] = g.weight(i, j) / (g.hx() * g.hy());
  const double diag_a = gamma + 2.0 / (g.hx() * g.hx()) + 2.0 / (g.hy() * g.hy());

  ScalarField x = initial_guess ? *initial_guess : ScalarField(g);
  if (initial_guess) require_same_grid(g, initial_guess->grid(), "solve_helmholtz_cg");

  auto apply_a = [&](const ScalarField& p) {
    ScalarField ap = laplacian_neumann(p);
    for (std::size_t k = 0; k < n; ++k) ap[k] = gamma * p[k] - ap[k];
    return ap;
  };

  const double target = tol * rhs.max_abs();
  std::vector<double> r(n), z(n);
  ScalarField p(g);
  double res_inf = 0.0, rz = 0.0;
  // Recompute the residual from x, so drift in the recursive residual cannot stall convergence.
  auto restart = [&]() {
    ScalarField ax = apply_a(x);
    res_inf = 0.0;
    rz = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double rk = rhs[k] - ax[k];
      res_inf = std::max(res_inf, std::abs(rk));
      r[k] = w[k] * rk;
      z[k] = r[k] / (w[k] * diag_a);
      p[k] = z[k];
      rz += r[k] * z[k];
    }
  };
  restart();

  long it = 0;
  int restarts = 0;
  while (it < max_iterations) {
    if (res_inf <= target) {
      restart();
      if (res_inf <= std::max(target, helmholtz_rounding_floor(x, gamma)) || ++restarts > 8) break;
    }
    ScalarField ap = apply_a(p);
    double pap = 0.0;
    for (std::size_t k = 0; k < n; ++k) pap += p[k] * w[k] * ap[k];
    if (!(pap > 0.0)) break;
    const double step = rz / pap;
    res_inf = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += step * p[k];
      r[k] -= step * w[k] * ap[k];
      res_inf = std::max(res_inf, std::abs(r[k] / w[k]));
      z[k] = r[k] / (w[k] * diag_a);
    }
    double rz_new = 0.0;
    for (std::size_t k = 0; k < n; ++k) rz_new += r[k] * z[k];
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    ++it;
  }
  if (stats) stats->iterations = it;
  double res = helmholtz_residual(x, rhs, gamma);
  if (stats) stats->residual = res;
  double bound = std::max(target, helmholtz_rounding_floor(x, gamma));
  if (!(res <= bound))
    throw NumericalError("helmholtz cg: no convergence after " + std::to_string(it) +
                             " iterations, residual " + std::to_string(res),
                         res);
  return x;
}

ScalarField solve_helmholtz_neumann(const ScalarField& rhs, double gamma, double tol, HelmholtzMethod method,
                                    HelmholtzStats* stats) {
  if (method == HelmholtzMethod::conjugate_gradient)
    return solve_helmholtz_cg(rhs, gamma, tol, 0, nullptr, stats);
  HelmholtzSolver solver(rhs.grid(), gamma, tol);
  return solver.solve(rhs, stats);
}

}  // namespace chemolimit
