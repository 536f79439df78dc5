#pragma once

#include "viscap/assembly.hpp"
#include "viscap/potentials.hpp"
#include "viscap/resonance.hpp"
#include "viscap/types.hpp"

namespace viscap {

struct DeterminantTrace {
  cplx lambda;
  cplx det_value;  // D(lambda) = det(I + K(lambda))
};

// 1-D free resolvent kernel k0(lambda; x, y) = (i/2lambda) e^{i lambda |x-y|},
// entire in lambda off 0.
cplx free_kernel(cplx lam, double x, double y);

// Nystrom matrix K_ij = v(x_i) k0(lambda; x_i, x_j) w(x_j) h_x.
Matrix bs_matrix(cplx lam, const Grid1D& g, const Factorization& f);

// D(lambda) = det(I + K) by pivoted elimination, accumulated in log form so
// large determinants cannot overflow.
DeterminantTrace bs_determinant(cplx lam, const Grid1D& g,
                                const Factorization& f);

// All zeros of D inside Omega: recursive rectangle subdivision on the winding
// number down to diameter 1e-2, then Newton (central-difference derivative,
// step 1e-6). Each zero's multiplicity is the winding of its enclosing box;
// their sum must reproduce the boundary winding.
std::vector<ResonanceEstimate> find_resonances(const RectangleOmega& omega,
                                               const Grid1D& g,
                                               const Factorization& f,
                                               double tol);

// m(lambda0) by the contour trace (1/2pi i) tr oint (I+K)^{-1} dK/dzeta dzeta
// over |zeta-lambda0| = r, trapezoid with `nodes` points, cross-checked
// against the winding number of D on the same circle.
int multiplicity(cplx lam0, double r, const Grid1D& g, const Factorization& f,
                 int nodes = 64);

// K_eps(lambda) = diag(v) (A_eps - lambda^2)^{-1} diag(w), A_eps the
// discretized -Laplacian - i eps x^2. No quadrature weight: the resolvent is
// realized as a dense matrix inverse, not an integral kernel.
Matrix regularized_bs_matrix(cplx lam, double eps, const Grid1D& g,
                             const Factorization& f);

// m_eps(lambda0) from the regularized contour; post-checked against the direct
// count of eigenvalues of the discretized P_eps whose sector square root lies
// in B(lambda0, r). A mismatch throws discrepancy_error.
int multiplicity_eps(cplx lam0, double r, double eps, const Grid1D& g,
                     const Factorization& f, const Potential& p,
                     int nodes = 64);

struct discrepancy_error : numerical_error {
  using numerical_error::numerical_error;
};

// Largest singular value of e^{-c|x_i|} k0(lambda; x_i, x_j) e^{-c|x_j|} h_x.
// Requires Re lambda > 0 and Im lambda > -c.
double weighted_free_resolvent_norm(cplx lam, double c, const Grid1D& g);

}  // namespace viscap
