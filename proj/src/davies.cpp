#include "viscap/davies.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "viscap/eig.hpp"

namespace viscap {

namespace {

constexpr double kPi = std::numbers::pi;

double vec_norm(const std::vector<cplx>& v) {
  double s = 0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

// Largest singular value of diag(w) A^{-1} diag(w) through the factored A,
// by power iteration on B^H B, B = W A^{-1} W.
double weighted_inverse_norm(const LUFactors& lu,
                             const std::vector<double>& w) {
  const std::size_t n = lu.lu.n;
  std::vector<cplx> x(n);
  double nrm = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j);
    x[j] = cplx(std::cos(0.9 * t + 0.3), std::sin(0.4 * t + 0.1));
    nrm += std::norm(x[j]);
  }
  nrm = std::sqrt(nrm);
  for (auto& z : x) z /= nrm;

  double lam_prev = 0;
  for (int it = 0; it < 2000; ++it) {
    std::vector<cplx> u = x;
    for (std::size_t j = 0; j < n; ++j) u[j] *= w[j];
    lu_solve(lu, u);
    for (std::size_t j = 0; j < n; ++j) u[j] *= w[j];  // u = B x
    std::vector<cplx> v = u;
    for (std::size_t j = 0; j < n; ++j) v[j] *= w[j];
    lu_solve_adjoint(lu, v);
    for (std::size_t j = 0; j < n; ++j) v[j] *= w[j];  // v = B^H B x
    const double lam = vec_norm(v);
    if (lam == 0) return 0;
    if (it > 2 && std::abs(lam - lam_prev) <= 5e-14 * lam) {
      lam_prev = lam;
      break;
    }
    lam_prev = lam;
    for (auto& z : v) z /= lam;
    x = std::move(v);
  }
  return std::sqrt(lam_prev);
}

}  // namespace

std::vector<cplx> exact_spectrum(cplx c, int count) {
  if (count < 1) throw config_error("exact_spectrum: count must be >= 1");
  if (c == 0.0) throw domain_error("exact_spectrum: c must be nonzero");
  const double a = std::arg(c);
  if (!(a > -kPi && a <= 0.0))
    throw domain_error("exact_spectrum: need -pi < arg c <= 0");
  const cplx root = std::sqrt(c);  // principal branch
  std::vector<cplx> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] = root * (1.0 + 2.0 * k);
  return out;
}

double resolvent_norm(double eps, cplx z, const Grid1D& g) {
  if (!(eps >= 0)) throw config_error("resolvent_norm: eps must be >= 0");
  Matrix H = davies_matrix(g, cplx(0, -eps));
  for (std::size_t j = 0; j < g.N; ++j) H(j, j) -= z;
  LUFactors lu = lu_factor(std::move(H));
  const double sm = lu.singular ? 0.0 : smallest_singular_value_from_factors(lu);
  if (sm < 1e-9)
    throw singularity_error(
        "resolvent_norm: z within working distance of the discrete spectrum "
        "(sigma_min = " + std::to_string(sm) + ")");
  return 1.0 / sm;
}

double weighted_cap_resolvent_norm(double eps, cplx lam, double gw,
                                   const Grid1D& g) {
  if (!(eps > 0))
    throw config_error("weighted_cap_resolvent_norm: eps must be positive");
  if (!(gw >= 0))
    throw config_error("weighted_cap_resolvent_norm: gamma_w must be >= 0");
  if (!(lam.real() > 0) || std::arg(lam) <= -kPi / 8.0)
    throw domain_error(
        "weighted_cap_resolvent_norm: lambda must satisfy Re > 0 and "
        "arg > -pi/8");
  if (gw > 0 && !(-lam.imag() < gw))
    throw domain_error(
        "weighted_cap_resolvent_norm: need -Im lambda < gamma_w for the "
        "weight to control the outgoing tail");

  Matrix H = davies_matrix(g, cplx(0, -eps));
  const cplx lam2 = lam * lam;
  for (std::size_t j = 0; j < g.N; ++j) H(j, j) -= lam2;
  LUFactors lu = lu_factor(std::move(H));
  const double sm = lu.singular ? 0.0 : smallest_singular_value_from_factors(lu);
  if (sm < 1e-9)
    throw conditioning_error(
        "weighted_cap_resolvent_norm: inner resolvent nearly singular "
        "(sigma_min = " + std::to_string(sm) + ")");
  std::vector<double> w(g.N);
  for (std::size_t j = 0; j < g.N; ++j)
    w[j] = std::exp(-gw * std::abs(g.points[j]));
  return weighted_inverse_norm(lu, w);
}

}  // namespace viscap
