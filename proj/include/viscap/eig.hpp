#pragma once

#include <optional>

#include "viscap/resonance.hpp"
#include "viscap/types.hpp"

namespace viscap {

struct SpectrumResult {
  std::vector<cplx> eigenvalues;  // unordered; consumers sort explicitly
  double residual_bound = 0;      // backward-error estimate, eps * n * ||A||_F
};

// Dense non-Hermitian eigensolve: balancing, Householder Hessenberg reduction,
// Wilkinson-shift QR with deflation. Iteration cap 30*n sweeps.
SpectrumResult eigenvalues(const Matrix& A);

// sigma_min >= 0; equals 1/||A^{-1}|| for invertible A. Exact zero pivot in the
// pivoted elimination reports 0.
double smallest_singular_value(const Matrix& A);

// Largest singular value via power iteration on A^H A.
double operator_norm(const Matrix& A);

// Branch of sqrt mapping arg z in (-pi/4, 7pi/4) to (arg z)/2, so the image
// sector is -pi/8 < arg lambda < 7pi/8. The Davies ray e^{-i pi/4}[0, inf) is
// the branch cut and is excluded.
cplx sqrt_sector(cplx z);

// sqrt_sector without the throw: nullopt when z is within ray_tol (in angle)
// of the excluded ray, or z == 0.
std::optional<cplx> try_sqrt_sector(cplx z, double ray_tol);

// sqrt_sector images of the eigenvalues that land inside Omega, sorted by real
// part. Eigenvalues within 1e-9 (angle) of the Davies ray are dropped; the
// count of dropped values is reported through `excluded` when non-null.
std::vector<cplx> filter_sector(const SpectrumResult& spec,
                                const RectangleOmega& omega,
                                std::size_t* excluded = nullptr);

// --- elimination kernels shared by determinants and resolvent norms ---

struct LUFactors {
  Matrix lu;              // L (unit lower) and U packed, row-major
  std::vector<int> piv;   // row k swapped with piv[k], applied ascending
  int sign = 1;           // permutation parity
  bool singular = false;  // an exactly zero pivot column was met
};

LUFactors lu_factor(Matrix A);
// Solve A x = b in place.
void lu_solve(const LUFactors& f, std::vector<cplx>& b);
// Solve A^H x = b in place.
void lu_solve_adjoint(const LUFactors& f, std::vector<cplx>& b);
// Solve A X = B in place (B row-major, same order as A).
void lu_solve_matrix(const LUFactors& f, Matrix& B);
// log det A as (log |det|, arg det); requires !singular.
std::pair<double, double> lu_logdet(const LUFactors& f);
// sigma_min of the factored matrix by inverse power iteration on (A^H A)^{-1}.
double smallest_singular_value_from_factors(const LUFactors& f);

}  // namespace viscap
