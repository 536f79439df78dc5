#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace viscap {

using cplx = std::complex<double>;

// Error taxonomy maps onto CLI exit codes: config/domain -> 1, numerical -> 2.
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct domain_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Any failure of the numerics themselves: non-convergence, singular resolvent,
// ill-placed contour, branch-cut hit.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct singularity_error : numerical_error {
  using numerical_error::numerical_error;
};

struct conditioning_error : numerical_error {
  using numerical_error::numerical_error;
};

struct contour_error : numerical_error {
  using numerical_error::numerical_error;
};

struct branch_cut_error : numerical_error {
  using numerical_error::numerical_error;
};

// Dense square complex matrix, row-major. The common currency of assembly,
// eigensolving, determinants and resolvents.
struct Matrix {
  std::size_t n = 0;
  std::vector<cplx> a;

  Matrix() = default;
  explicit Matrix(std::size_t order) : n(order), a(order * order) {}

  cplx& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
  cplx* row(std::size_t i) { return a.data() + i * n; }
  const cplx* row(std::size_t i) const { return a.data() + i * n; }
};

}  // namespace viscap
