#pragma once

#include "chemolimit/grid.hpp"

namespace chemolimit {

/// 5-point Laplacian with mirror ghost nodes (zero normal derivative).
ScalarField laplacian_neumann(const ScalarField& f);

/// Centred differences inside; the normal component vanishes on the boundary.
VectorField gradient_neumann(const ScalarField& f);

/// Divergence of face fluxes built by averaging node values; boundary faces carry no flux,
/// so the trapezoid integral of the result vanishes.
ScalarField divergence_flux(const VectorField& flux);

enum class FaceAverage { centered, upwind };

/// div(u grad phi) in conservative face form: flux on face (i+1/2) is
/// u_face * (phi_{i+1} - phi_i) / h, zero on boundary faces.
ScalarField drift_divergence(const ScalarField& u, const ScalarField& phi,
                             FaceAverage average = FaceAverage::centered);

/// Trapezoid-rule integral over the rectangle, fixed summation order.
double integrate(const ScalarField& f);

/// Max over boundary nodes of |one-sided normal difference quotient|.
double max_boundary_normal_slope(const ScalarField& f);

}  // namespace chemolimit
