#include "viscap/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace viscap {

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

// Cheap magnitude (|re| + |im|); only used for thresholds and pivoting.
inline double cabs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// The std::complex operators carry infinity-fixup branches that block
// vectorization, so the dense kernels below spell the arithmetic out.

// y[0..len) -= m * x[0..len)
inline void axpy_sub(cplx* __restrict y, const cplx* __restrict x, cplx m,
                     std::size_t len) {
  const double mr = m.real(), mi = m.imag();
  for (std::size_t j = 0; j < len; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    y[j] = cplx(y[j].real() - (mr * xr - mi * xi),
                y[j].imag() - (mr * xi + mi * xr));
  }
}

// y[0..len) += m * x[0..len)
inline void axpy_add(cplx* __restrict y, const cplx* __restrict x, cplx m,
                     std::size_t len) {
  const double mr = m.real(), mi = m.imag();
  for (std::size_t j = 0; j < len; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    y[j] = cplx(y[j].real() + (mr * xr - mi * xi),
                y[j].imag() + (mr * xi + mi * xr));
  }
}

// sum_j x[j] * y[j] (no conjugation)
inline cplx dotu(const cplx* __restrict x, const cplx* __restrict y,
                 std::size_t len) {
  double re = 0, im = 0;
  for (std::size_t j = 0; j < len; ++j) {
    const double xr = x[j].real(), xi = x[j].imag();
    const double yr = y[j].real(), yi = y[j].imag();
    re += xr * yr - xi * yi;
    im += xr * yi + xi * yr;
  }
  return {re, im};
}

double frobenius(const Matrix& A) {
  double s = 0;
  for (const cplx& z : A.a) s += std::norm(z);
  return std::sqrt(s);
}

// Parlett-Reinsch balancing (scaling only); similarity, so eigenvalues are
// untouched while row/column norms equalize.
void balance(Matrix& A) {
  const std::size_t n = A.n;
  const double radix = 2.0, sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0, c = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += cabs1(A(j, i));
        r += cabs1(A(i, j));
      }
      if (c == 0 || r == 0) continue;
      double g = r / radix, f = 1, s = c + r;
      while (c < g) {
        f *= radix;
        c *= sq;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        const double ginv = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) A(i, j) *= ginv;
        for (std::size_t j = 0; j < n; ++j) A(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form (similarity by Hermitian
// unitary reflectors I - 2 w w^H).
void hessenberg(Matrix& A) {
  const std::size_t n = A.n;
  if (n < 3) return;
  std::vector<cplx> w(n), y(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    // Column k below the subdiagonal.
    double colnorm = 0;
    for (std::size_t i = k + 1; i < n; ++i) colnorm += std::norm(A(i, k));
    colnorm = std::sqrt(colnorm);
    if (colnorm == 0) continue;
    const cplx x0 = A(k + 1, k);
    const cplx phase = (x0 == 0.0) ? cplx(1, 0) : x0 / std::abs(x0);
    const cplx beta = -phase * colnorm;
    // w = (x - beta e_1)/||..||, spanning rows k+1..n-1.
    double wnorm = 0;
    for (std::size_t i = k + 1; i < n; ++i) {
      w[i] = A(i, k);
      if (i == k + 1) w[i] -= beta;
      wnorm += std::norm(w[i]);
    }
    wnorm = std::sqrt(wnorm);
    if (wnorm == 0) continue;
    for (std::size_t i = k + 1; i < n; ++i) w[i] /= wnorm;
    // A <- (I - 2ww^H) A : rows k+1.., all columns.
    std::fill(y.begin(), y.end(), cplx(0, 0));
    for (std::size_t i = k + 1; i < n; ++i)
      axpy_add(y.data(), A.row(i), std::conj(w[i]), n);
    for (std::size_t i = k + 1; i < n; ++i)
      axpy_sub(A.row(i), y.data(), 2.0 * w[i], n);
    // A <- A (I - 2ww^H) : all rows, columns k+1...
    for (std::size_t i = 0; i < n; ++i) {
      cplx* row = A.row(i);
      const cplx z = 2.0 * dotu(row + k + 1, w.data() + k + 1, n - k - 1);
      // row[j] -= z * conj(w[j])
      const double zr = z.real(), zi = z.imag();
      for (std::size_t j = k + 1; j < n; ++j) {
        const double wr = w[j].real(), wi = w[j].imag();
        row[j] = cplx(row[j].real() - (zr * wr + zi * wi),
                      row[j].imag() - (zi * wr - zr * wi));
      }
    }
    // Zero the annihilated entries exactly.
    A(k + 1, k) = beta;
    for (std::size_t i = k + 2; i < n; ++i) A(i, k) = 0;
  }
}

// Complex plane rotation G = [[c, s], [-conj(s), c]], c real, mapping (x,y) to
// (r, 0).
void make_givens(cplx x, cplx y, double& c, cplx& s) {
  const double ax = std::abs(x), ay = std::abs(y);
  if (ay == 0) {
    c = 1;
    s = 0;
    return;
  }
  if (ax == 0) {
    c = 0;
    s = 1;
    return;
  }
  const double t = std::hypot(ax, ay);
  c = ax / t;
  s = (x / ax) * std::conj(y) / t;
}

// Apply [[c, s], [-conj(s), c]] to the row pair (u, v) over [0..len).
inline void rot_rows(cplx* __restrict u, cplx* __restrict v, double c, cplx s,
                     std::size_t len) {
  const double sr = s.real(), si = s.imag();
  for (std::size_t j = 0; j < len; ++j) {
    const double ur = u[j].real(), ui = u[j].imag();
    const double vr = v[j].real(), vi = v[j].imag();
    u[j] = cplx(c * ur + sr * vr - si * vi, c * ui + sr * vi + si * vr);
    v[j] = cplx(-(sr * ur + si * ui) + c * vr, -(sr * ui - si * ur) + c * vi);
  }
}

// Eigenvalues of [[a, b], [c, d]].
std::pair<cplx, cplx> eig2(cplx a, cplx b, cplx c, cplx d) {
  const cplx tr = a + d;
  const cplx disc = std::sqrt((a - d) * (a - d) + 4.0 * b * c);
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

// Explicitly shifted QR on a Hessenberg matrix; fills eigs. Throws after the
// sweep cap (30 n).
void qr_hessenberg(Matrix& H, std::vector<cplx>& eigs) {
  const std::size_t n = H.n;
  eigs.assign(n, 0);
  if (n == 0) return;
  if (n == 1) {
    eigs[0] = H(0, 0);
    return;
  }
  double hnorm = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = (i == 0 ? 0 : i - 1); j < n; ++j) hnorm += cabs1(H(i, j));
  if (hnorm == 0) hnorm = 1;

  std::vector<double> rot_c(n);
  std::vector<cplx> rot_s(n);
  long total = 0;
  const long cap = 30 * static_cast<long>(n);
  std::size_t hi = n - 1;
  int stall = 0;
  while (true) {
    // Deflate converged trailing eigenvalues.
    while (true) {
      if (hi == 0) {
        eigs[0] = H(0, 0);
        return;
      }
      double s = cabs1(H(hi - 1, hi - 1)) + cabs1(H(hi, hi));
      if (s == 0) s = hnorm;
      if (cabs1(H(hi, hi - 1)) > kUlp * s) break;
      H(hi, hi - 1) = 0;
      eigs[hi] = H(hi, hi);
      --hi;
      stall = 0;
    }
    // Find the start of the active block.
    std::size_t lo = hi;
    while (lo > 0) {
      double s = cabs1(H(lo - 1, lo - 1)) + cabs1(H(lo, lo));
      if (s == 0) s = hnorm;
      if (cabs1(H(lo, lo - 1)) <= kUlp * s) {
        H(lo, lo - 1) = 0;
        break;
      }
      --lo;
    }
    if (lo == hi - 1) {
      auto [e1, e2] = eig2(H(lo, lo), H(lo, hi), H(hi, lo), H(hi, hi));
      // Assign the value closer to the trailing entry last for determinism.
      if (cabs1(e1 - H(hi, hi)) < cabs1(e2 - H(hi, hi))) std::swap(e1, e2);
      eigs[lo] = e1;
      eigs[hi] = e2;
      if (lo == 0) return;
      hi = lo - 1;
      stall = 0;
      continue;
    }

    if (++total > cap)
      throw numerical_error("eigenvalues: QR failed to converge within " +
                            std::to_string(cap) + " sweeps for order " +
                            std::to_string(n));
    cplx sigma;
    if (++stall % 11 == 0) {
      // Exceptional shift breaks rare limit cycles.
      sigma = H(hi, hi) + cabs1(H(hi, hi - 1)) * cplx(0.75, 0.4375);
    } else {
      auto [m1, m2] = eig2(H(hi - 1, hi - 1), H(hi - 1, hi), H(hi, hi - 1), H(hi, hi));
      sigma = (cabs1(m1 - H(hi, hi)) < cabs1(m2 - H(hi, hi))) ? m1 : m2;
    }

    for (std::size_t i = lo; i <= hi; ++i) H(i, i) -= sigma;
    // Factor H = QR by rotations on rows (i, i+1)...
    for (std::size_t i = lo; i < hi; ++i) {
      double c;
      cplx s;
      make_givens(H(i, i), H(i + 1, i), c, s);
      rot_c[i] = c;
      rot_s[i] = s;
      rot_rows(H.row(i) + i, H.row(i + 1) + i, c, s, hi - i + 1);
    }
    // ...then form RQ^H, re-adding the shift.
    for (std::size_t i = lo; i < hi; ++i) {
      const double c = rot_c[i];
      const cplx s = rot_s[i];
      const double sr = s.real(), si = s.imag();
      for (std::size_t r = lo; r <= i + 1; ++r) {
        cplx* row = H.row(r);
        const double ur = row[i].real(), ui = row[i].imag();
        const double vr = row[i + 1].real(), vi = row[i + 1].imag();
        // (u, v) <- (c u + conj(s) v, -s u + c v)
        row[i] = cplx(c * ur + sr * vr + si * vi, c * ui + sr * vi - si * vr);
        row[i + 1] =
            cplx(-(sr * ur - si * ui) + c * vr, -(sr * ui + si * ur) + c * vi);
      }
    }
    for (std::size_t i = lo; i <= hi; ++i) H(i, i) += sigma;
  }
}

// Deterministic pseudo-random unit start vector for power iterations.
std::vector<cplx> start_vector(std::size_t n) {
  std::vector<cplx> x(n);
  double nrm = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j);
    x[j] = cplx(std::cos(0.9 * t + 0.3), std::sin(0.4 * t + 0.1));
    nrm += std::norm(x[j]);
  }
  nrm = std::sqrt(nrm);
  for (auto& z : x) z /= nrm;
  return x;
}

double vec_norm(const std::vector<cplx>& v) {
  double s = 0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

}  // namespace

SpectrumResult eigenvalues(const Matrix& A) {
  const std::size_t n = A.n;
  for (const cplx& z : A.a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw domain_error("eigenvalues: matrix has non-finite entries");
  SpectrumResult out;
  out.residual_bound = kUlp * static_cast<double>(n) * frobenius(A);
  if (n == 0) return out;
  Matrix H = A;
  balance(H);
  hessenberg(H);
  qr_hessenberg(H, out.eigenvalues);
  return out;
}

LUFactors lu_factor(Matrix A) {
  const std::size_t n = A.n;
  LUFactors f;
  f.piv.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = cabs1(A(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = cabs1(A(i, k));
      if (m > best) {
        best = m;
        p = i;
      }
    }
    f.piv[k] = static_cast<int>(p);
    if (best == 0) {
      f.singular = true;
      continue;
    }
    if (p != k) {
      f.sign = -f.sign;
      cplx* rk = A.row(k);
      cplx* rp = A.row(p);
      for (std::size_t j = 0; j < n; ++j) std::swap(rk[j], rp[j]);
    }
    const cplx d = A(k, k);
    const cplx* rk = A.row(k) + (k + 1);
    const std::size_t len = n - k - 1;
    for (std::size_t i = k + 1; i < n; ++i) {
      const cplx m = A(i, k) / d;
      A(i, k) = m;
      if (m == 0.0) continue;
      axpy_sub(A.row(i) + (k + 1), rk, m, len);
    }
  }
  f.lu = std::move(A);
  return f;
}

void lu_solve(const LUFactors& f, std::vector<cplx>& b) {
  const std::size_t n = f.lu.n;
  for (std::size_t k = 0; k < n; ++k)
    if (static_cast<std::size_t>(f.piv[k]) != k)
      std::swap(b[k], b[static_cast<std::size_t>(f.piv[k])]);
  for (std::size_t i = 1; i < n; ++i)
    b[i] -= dotu(f.lu.row(i), b.data(), i);
  for (std::size_t ii = n; ii-- > 0;) {
    const cplx* row = f.lu.row(ii);
    b[ii] -= dotu(row + ii + 1, b.data() + ii + 1, n - ii - 1);
    b[ii] /= row[ii];
  }
}

void lu_solve_adjoint(const LUFactors& f, std::vector<cplx>& b) {
  const std::size_t n = f.lu.n;
  // A = P^T L U, so A^H x = b unwinds as U^H w = b, L^H y = w, x = P^T y.
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= std::conj(f.lu(k, i)) * b[k];
    b[i] = s / std::conj(f.lu(i, i));
  }
  for (std::size_t ii = n; ii-- > 0;) {
    cplx s = b[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= std::conj(f.lu(j, ii)) * b[j];
    b[ii] = s;
  }
  for (std::size_t kk = n; kk-- > 0;)
    if (static_cast<std::size_t>(f.piv[kk]) != kk)
      std::swap(b[kk], b[static_cast<std::size_t>(f.piv[kk])]);
}

void lu_solve_matrix(const LUFactors& f, Matrix& B) {
  const std::size_t n = f.lu.n;
  const std::size_t m = B.n;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t p = static_cast<std::size_t>(f.piv[k]);
    if (p != k) {
      cplx* rk = B.row(k);
      cplx* rp = B.row(p);
      for (std::size_t j = 0; j < m; ++j) std::swap(rk[j], rp[j]);
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    const cplx* lrow = f.lu.row(i);
    cplx* bi = B.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      if (lrow[k] == 0.0) continue;
      axpy_sub(bi, B.row(k), lrow[k], m);
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const cplx* urow = f.lu.row(ii);
    cplx* bi = B.row(ii);
    for (std::size_t j = ii + 1; j < n; ++j) {
      if (urow[j] == 0.0) continue;
      axpy_sub(bi, B.row(j), urow[j], m);
    }
    const cplx d = urow[ii];
    for (std::size_t jj = 0; jj < m; ++jj) bi[jj] /= d;
  }
}

std::pair<double, double> lu_logdet(const LUFactors& f) {
  if (f.singular)
    return {-std::numeric_limits<double>::infinity(), 0.0};
  double lg = 0, ar = f.sign < 0 ? std::numbers::pi : 0.0;
  for (std::size_t k = 0; k < f.lu.n; ++k) {
    const cplx d = f.lu(k, k);
    lg += std::log(std::abs(d));
    ar += std::arg(d);
  }
  return {lg, ar};
}

double smallest_singular_value_from_factors(const LUFactors& f) {
  const std::size_t n = f.lu.n;
  if (n == 0) return 0;
  if (f.singular) return 0;
  std::vector<cplx> x = start_vector(n);
  double lam_prev = 0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<cplx> z = x;
    lu_solve_adjoint(f, z);  // z = A^{-H} x
    lu_solve(f, z);          // z = A^{-1} A^{-H} x = (A^H A)^{-1} x
    const double lam = vec_norm(z);
    if (!std::isfinite(lam)) return 0;
    if (lam == 0) return 0;
    if (it > 2 && std::abs(lam - lam_prev) <= 5e-14 * lam) {
      lam_prev = lam;
      break;
    }
    lam_prev = lam;
    for (auto& zz : z) zz /= lam;
    x = std::move(z);
  }
  return 1.0 / std::sqrt(lam_prev);
}

double smallest_singular_value(const Matrix& A) {
  for (const cplx& z : A.a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw domain_error("smallest_singular_value: non-finite entries");
  if (A.n == 0) return 0;
  LUFactors f = lu_factor(A);
  if (f.singular) return 0;
  return smallest_singular_value_from_factors(f);
}

double operator_norm(const Matrix& A) {
  const std::size_t n = A.n;
  if (n == 0) return 0;
  std::vector<cplx> x = start_vector(n), y(n);
  double lam_prev = 0;
  for (int it = 0; it < 2000; ++it) {
    // y = A x
    for (std::size_t i = 0; i < n; ++i) y[i] = dotu(A.row(i), x.data(), n);
    // z = A^H y
    std::vector<cplx> z(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      // z += conj(row_i) * y_i
      const cplx* row = A.row(i);
      const double yr = y[i].real(), yi = y[i].imag();
      cplx* __restrict zp = z.data();
      for (std::size_t j = 0; j < n; ++j) {
        const double ar = row[j].real(), ai = row[j].imag();
        zp[j] = cplx(zp[j].real() + (ar * yr + ai * yi),
                     zp[j].imag() + (ar * yi - ai * yr));
      }
    }
    const double lam = vec_norm(z);
    if (lam == 0) return 0;
    if (it > 2 && std::abs(lam - lam_prev) <= 5e-14 * lam) {
      lam_prev = lam;
      break;
    }
    lam_prev = lam;
    for (auto& zz : z) zz /= lam;
    x = std::move(z);
  }
  return std::sqrt(lam_prev);
}

cplx sqrt_sector(cplx z) {
  auto v = try_sqrt_sector(z, 1e-12);
  if (!v)
    throw branch_cut_error(
        "sqrt_sector: z lies on the excluded ray e^{-i pi/4}[0, inf)");
  return *v;
}

std::optional<cplx> try_sqrt_sector(cplx z, double ray_tol) {
  if (z == 0.0) return std::nullopt;
  double a = std::atan2(z.imag(), z.real());
  if (std::abs(a + std::numbers::pi / 4.0) <= ray_tol) return std::nullopt;
  if (a < -std::numbers::pi / 4.0) a += 2.0 * std::numbers::pi;
  return std::sqrt(std::abs(z)) * std::polar(1.0, a / 2.0);
}

std::vector<cplx> filter_sector(const SpectrumResult& spec,
                                const RectangleOmega& omega,
                                std::size_t* excluded) {
  omega.validate_basic();
  std::vector<cplx> out;
  std::size_t dropped = 0;
  for (const cplx& z : spec.eigenvalues) {
    auto lam = try_sqrt_sector(z, 1e-9);
    if (!lam) {
      ++dropped;
      continue;
    }
    if (omega.contains(*lam)) out.push_back(*lam);
  }
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  if (excluded) *excluded = dropped;
  return out;
}

}  // namespace viscap
