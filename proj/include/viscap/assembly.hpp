#pragma once

#include <optional>
#include <utility>

#include "viscap/types.hpp"

namespace viscap {

struct Potential;

// Uniform periodic collocation grid on [-L, L): x_j = -L + j*(2L/N).
struct Grid1D {
  double L = 0;
  std::size_t N = 0;
  std::vector<double> points;
  double h_x = 0;  // 2L/N, the quadrature weight
};

// N must be even (Fourier differentiation pairs modes +/-m) and >= 4.
Grid1D build_grid(double L, std::size_t N);

// Periodic Fourier-collocation matrix for -d^2/dx^2. Real symmetric; exact on
// resolved plane waves e^{ikx}, k = pi*m/L, |m| <= N/2.
Matrix laplacian_matrix(const Grid1D& g);

// P_eps = -Laplacian + diag(V(x_j) - i*eps*x_j^2). eps >= 0.
Matrix cap_matrix(const Grid1D& g, const Potential& p, double eps);

// H_c = -Laplacian + diag(c*x_j^2), -pi < arg c <= 0.
Matrix davies_matrix(const Grid1D& g, cplx c);

// Reflection x -> -x permutes grid nodes j -> (N-j) mod N. For matrices
// commuting with that permutation (laplacian + even diagonal), the spectrum
// splits into even/odd blocks of order N/2+1 and N/2-1. Returns nullopt when
// the matrix is not reflection-symmetric; eigenvalues(first) ++
// eigenvalues(second) equals eigenvalues(A).
std::optional<std::pair<Matrix, Matrix>> reflection_blocks(const Matrix& A);

}  // namespace viscap
