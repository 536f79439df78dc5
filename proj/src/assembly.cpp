#include "viscap/assembly.hpp"

#include <cmath>
#include <numbers>

#include "viscap/potentials.hpp"

namespace viscap {

Grid1D build_grid(double L, std::size_t N) {
  if (!(L > 0) || !std::isfinite(L))
    throw config_error("build_grid: half-width L must be positive and finite");
  if (N < 4) throw config_error("build_grid: N must be at least 4");
  if (N % 2 != 0) throw config_error("build_grid: N must be even");
  Grid1D g;
  g.L = L;
  g.N = N;
  g.h_x = 2.0 * L / static_cast<double>(N);
  g.points.resize(N);
  for (std::size_t j = 0; j < N; ++j)
    g.points[j] = -L + static_cast<double>(j) * g.h_x;
  return g;
}

Matrix laplacian_matrix(const Grid1D& g) {
  const std::size_t N = g.N;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(N);
  const double scale = std::pow(std::numbers::pi / g.L, 2);
  // Circulant first column of the periodic spectral -d^2/dx^2 matrix.
  std::vector<double> t(N);
  t[0] = scale * (std::numbers::pi * std::numbers::pi / (3.0 * h * h) + 1.0 / 6.0);
  for (std::size_t m = 1; m < N; ++m) {
    const double s = std::sin(static_cast<double>(m) * h / 2.0);
    t[m] = scale * ((m % 2 == 0) ? 1.0 : -1.0) / (2.0 * s * s);
  }
  Matrix A(N);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      A(i, j) = t[(j + N - i) % N];
  return A;
}

Matrix cap_matrix(const Grid1D& g, const Potential& p, double eps) {
  if (eps < 0) throw config_error("cap_matrix: eps must be nonnegative");
  Matrix A = laplacian_matrix(g);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.points[j];
    A(j, j) += cplx(eval_potential(p, x), -eps * x * x);
  }
  return A;
}

Matrix davies_matrix(const Grid1D& g, cplx c) {
  const double a = std::arg(c);
  if (c != 0.0 && (a > 0 || a <= -std::numbers::pi))
    throw config_error("davies_matrix: arg c must lie in (-pi, 0]");
  Matrix A = laplacian_matrix(g);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double x = g.points[j];
    A(j, j) += c * (x * x);
  }
  return A;
}

std::optional<std::pair<Matrix, Matrix>> reflection_blocks(const Matrix& A) {
  const std::size_t N = A.n;
  if (N < 4 || N % 2 != 0) return std::nullopt;
  auto refl = [N](std::size_t j) { return (N - j) % N; };
  // Commutation with the reflection permutation, entrywise with a small slack.
  double scale = 0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) scale = std::max(scale, std::abs(A(i, j)));
  const double tol = 1e-13 * (scale > 0 ? scale : 1.0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (std::abs(A(i, j) - A(refl(i), refl(j))) > tol) return std::nullopt;

  const std::size_t half = N / 2;
  // Even basis: e_0, (e_j + e_{N-j})/sqrt2 for j=1..half-1, e_half.
  // Odd basis: (e_j - e_{N-j})/sqrt2 for j=1..half-1.
  Matrix even(half + 1), odd(half - 1);
  const double r2 = std::numbers::sqrt2;
  for (std::size_t a_ = 0; a_ <= half; ++a_) {
    for (std::size_t b = 0; b <= half; ++b) {
      const bool a_fixed = (a_ == 0 || a_ == half);
      const bool b_fixed = (b == 0 || b == half);
      cplx val;
      if (a_fixed && b_fixed) val = A(a_, b);
      else if (a_fixed) val = r2 * A(a_, b);
      else if (b_fixed) val = r2 * A(a_, b);
      else val = A(a_, b) + A(a_, refl(b));
      even(a_, b) = val;
    }
  }
  for (std::size_t a_ = 1; a_ < half; ++a_)
    for (std::size_t b = 1; b < half; ++b)
      odd(a_ - 1, b - 1) = A(a_, b) - A(a_, refl(b));
  return std::make_pair(std::move(even), std::move(odd));
}

}  // namespace viscap
