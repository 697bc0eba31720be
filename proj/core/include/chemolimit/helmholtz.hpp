#pragma once

#include <memory>

#include "chemolimit/grid.hpp"

namespace chemolimit {

/// Solvers for -Lap_h v + gamma v = rhs with the mirror-Neumann 5-point Laplacian.
enum class HelmholtzMethod {
  spectral,            ///< exact DCT-I diagonalisation (FFTW)
  conjugate_gradient,  ///< Jacobi-preconditioned CG on the trapezoid-weighted symmetric form
};

struct HelmholtzStats {
  double residual = 0.0;  ///< ||-Lap_h v + gamma v - rhs||_inf after the solve
  long iterations = 0;    ///< CG iterations (0 for the spectral path)
};

/// ||-Lap_h v + gamma v - rhs||_inf
double helmholtz_residual(const ScalarField& v, const ScalarField& rhs, double gamma);

/// Residual size below which rounding in evaluating the operator dominates.
double helmholtz_rounding_floor(const ScalarField& v, double gamma);

/// Reusable spectral solver for a fixed grid and coefficient. Not safe for concurrent
/// use of one instance; distinct instances may run on different threads.
class HelmholtzSolver {
 public:
  HelmholtzSolver(const Grid& grid, double gamma, double tol = 1e-10);
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver&&) noexcept;
  HelmholtzSolver& operator=(HelmholtzSolver&&) noexcept;
  HelmholtzSolver(const HelmholtzSolver&) = delete;
  HelmholtzSolver& operator=(const HelmholtzSolver&) = delete;

  const Grid& grid() const;
  double gamma() const;

  /// Throws NumericalError if the verified residual exceeds tol * ||rhs||_inf.
  ScalarField solve(const ScalarField& rhs, HelmholtzStats* stats = nullptr);
  void solve_into(const ScalarField& rhs, ScalarField& out, HelmholtzStats* stats = nullptr);
  /// out = A^-1 rhs and then next_out = B^-1 out for B = next's operator, sharing one forward
  /// transform. Both results are verified like solve_into.
  void solve_chain(const ScalarField& rhs, ScalarField& out, HelmholtzSolver& next, ScalarField& next_out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// CG backend. max_iterations <= 0 selects 10 * node count.
ScalarField solve_helmholtz_cg(const ScalarField& rhs, double gamma, double tol, long max_iterations = 0,
                               const ScalarField* initial_guess = nullptr, HelmholtzStats* stats = nullptr);

ScalarField solve_helmholtz_neumann(const ScalarField& rhs, double gamma, double tol = 1e-10,
                                    HelmholtzMethod method = HelmholtzMethod::spectral,
                                    HelmholtzStats* stats = nullptr);

}  // namespace chemolimit
