#include "viscap/deformation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace viscap {

namespace {

constexpr double kPi = std::numbers::pi;
const double kTanPi8 = std::tan(kPi / 8.0);

double sgn(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

struct RhoJet {
  double r0 = 0, r1 = 0, r2 = 0, r3 = 0;  // rho and derivatives at t >= 0
};

RhoJet rho_jet(const DeformationSpec& spec, double t) {
  RhoJet j;
  if (spec.kind == RhoKind::plateau) {
    if (t <= spec.t0) return j;
    if (t >= spec.t0 + spec.w) {
      j.r0 = 1.0;
      return j;
    }
    const double u = (t - spec.t0) / spec.w;
    j.r0 = u * u * (3.0 - 2.0 * u);
    j.r1 = 6.0 * u * (1.0 - u) / spec.w;
    j.r2 = (6.0 - 12.0 * u) / (spec.w * spec.w);
    j.r3 = -12.0 / (spec.w * spec.w * spec.w);
    return j;
  }
  const double th = std::tanh(t);
  const double s2 = 1.0 - th * th;  // sech^2
  j.r0 = spec.s * th;
  j.r1 = spec.s * s2;
  j.r2 = -2.0 * spec.s * s2 * th;
  j.r3 = spec.s * (4.0 * s2 * th * th - 2.0 * s2 * s2);
  return j;
}

// Distance from p to the closed bad sector {|z| >= 1, pi/2 <= arg z <= pi}.
double dist_bad_sector(cplx p) {
  if (p.real() <= 0 && p.imag() >= 0) return std::max(0.0, 1.0 - std::abs(p));
  // Nearest boundary points lie on the two bounding rays (endpoints i, -1
  // included via the t >= 0 clamp).
  const double x = p.real(), y = p.imag();
  // Ray {i(1+t): t >= 0}:
  const double d1 = std::hypot(x, y - std::max(1.0, y));
  // Ray {-(1+t): t >= 0}:
  const double d2 = std::hypot(x - std::min(-1.0, x), y);
  return std::min(d1, d2);
}

// Squared-rectangle region {lambda^2 : lambda in Omega}: inside test through
// both square roots, boundary distance through a mapped perimeter sample.
struct OmegaSq {
  RectangleOmega om;
  std::vector<cplx> boundary;  // lambda_k^2 along the perimeter

  explicit OmegaSq(const RectangleOmega& o, int pts = 100) : om(o) {
    om.validate_basic();
    const cplx c0(o.a_lo, -o.gamma_lo), c1(o.a_hi, -o.gamma_lo);
    const cplx c2(o.a_hi, o.b_hi), c3(o.a_lo, o.b_hi);
    const cplx corner[4] = {c0, c1, c2, c3};
    const int per_side = pts / 4;
    for (int s = 0; s < 4; ++s)
      for (int k = 0; k < per_side; ++k) {
        const cplx lam = corner[s] + (corner[(s + 1) % 4] - corner[s]) *
                                         (static_cast<double>(k) / per_side);
        boundary.push_back(lam * lam);
      }
  }

  bool inside(cplx q) const {
    const cplx r = std::sqrt(q);  // principal; the other root is -r
    return om.contains(r) || om.contains(-r);
  }

  double dist(cplx q) const {
    if (inside(q)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (const cplx& b : boundary) d = std::min(d, std::abs(q - b));
    return d;
  }
};

}  // namespace

void DeformationSpec::validate() const {
  if (!(gamma > 0)) throw config_error("DeformationSpec: gamma must be positive");
  if (kind == RhoKind::plateau) {
    if (!(t0 >= 0) || !(w > 0))
      throw config_error("DeformationSpec: plateau needs t0 >= 0 and w > 0");
  } else {
    if (!(s > 0)) throw config_error("DeformationSpec: scaled_tanh needs s > 0");
  }
  if (!(sup_slope() < kTanPi8 / gamma))
    throw config_error(
        "DeformationSpec: sup rho' = " + std::to_string(sup_slope()) +
        " must stay below tan(pi/8)/gamma = " +
        std::to_string(kTanPi8 / gamma) +
        "; flatten the profile or shrink gamma");
}

double DeformationSpec::sup_slope() const {
  return kind == RhoKind::plateau ? 1.5 / w : s;
}

std::pair<double, double> rho_eval(const DeformationSpec& spec, double t) {
  if (!(t >= 0)) throw domain_error("rho_eval: t must be >= 0");
  const RhoJet j = rho_jet(spec, t);
  return {j.r0, j.r1};
}

cplx phi_theta(double xi, cplx theta, const DeformationSpec& spec) {
  const RhoJet j = rho_jet(spec, std::abs(xi));
  return xi + theta * sgn(xi) * j.r0;
}

cplx jacobian(double xi, cplx theta, const DeformationSpec& spec) {
  const RhoJet j = rho_jet(spec, std::abs(xi));
  return 1.0 + theta * j.r1;
}

SymbolSample symbol(double xi, double xistar, cplx theta, double h,
                    const DeformationSpec& spec) {
  const cplx i(0, 1);
  const RhoJet jet = rho_jet(spec, std::abs(xi));
  const cplx J = 1.0 + theta * jet.r1;
  const cplx Jp = theta * sgn(xi) * jet.r2;
  const cplx Jpp = theta * jet.r3;
  const cplx J2 = J * J, J3 = J2 * J, J4 = J2 * J2;
  const cplx phi = xi + theta * sgn(xi) * jet.r0;
  const cplx a = 2.0 * Jp / J3;
  const cplx b = -i * (0.5 * Jpp / J3 - 1.25 * Jp * Jp / J4);
  SymbolSample out;
  out.xi = xi;
  out.xistar = xistar;
  out.h = h;
  out.value = phi * phi - i * (xistar * xistar) / J2 + h * a * xistar +
              h * h * b;
  return out;
}

AdmissibilityReport check_admissible(const RectangleOmega& omega, double beta,
                                     const DeformationSpec& spec) {
  omega.validate_basic();
  spec.validate();
  if (!(beta >= 0)) throw config_error("check_admissible: beta must be >= 0");
  AdmissibilityReport rep;
  if (beta == 0.0 || beta >= spec.gamma) {
    // No deformation (or one too strong for the decay rate) uncovers nothing.
    rep.pass = false;
    rep.margin = -omega.gamma_lo;
    rep.worst_x = omega.a_lo;
    return rep;
  }
  double worst = std::numeric_limits<double>::infinity();
  double worst_x = omega.a_lo;
  const int M = 200;
  for (int k = 0; k < M; ++k) {
    const double x =
        omega.a_lo + (omega.a_hi - omega.a_lo) * k / (M - 1.0);
    const double val = -omega.gamma_lo + beta * rho_jet(spec, x).r0;
    if (val < worst) {
      worst = val;
      worst_x = x;
    }
  }
  rep.margin = worst;
  rep.worst_x = worst_x;
  rep.pass = worst > 0;
  return rep;
}

double symbol_region_margin(cplx theta, RegionKind region,
                            const RectangleOmega* omega, double h,
                            const DeformationSpec& spec, double Xi,
                            int n_scan) {
  spec.validate();
  if (n_scan < 2) throw config_error("symbol_region_margin: n_scan too small");
  if (!(Xi > 0)) throw config_error("symbol_region_margin: Xi must be positive");
  if (region == RegionKind::omega_squared && omega == nullptr)
    throw config_error(
        "symbol_region_margin: omega_squared region needs an Omega");
  std::optional<OmegaSq> osq;
  if (region == RegionKind::omega_squared) {
    // Prop-3.2-style margins presume (Omega, beta) admissible, theta = -i beta.
    const AdmissibilityReport adm =
        check_admissible(*omega, -theta.imag(), spec);
    if (!adm.pass)
      throw config_error(
          "symbol_region_margin: (Omega, beta) fails admissibility; lower-edge "
          "margin " +
          std::to_string(adm.margin) + " at x = " + std::to_string(adm.worst_x));
    osq.emplace(*omega);
  }

  double margin = std::numeric_limits<double>::infinity();
  for (int ix = 0; ix < n_scan; ++ix) {
    const double xi = -Xi + 2.0 * Xi * ix / (n_scan - 1.0);
    for (int is = 0; is < n_scan; ++is) {
      const double xs = -Xi + 2.0 * Xi * is / (n_scan - 1.0);
      const cplx q = symbol(xi, xs, theta, h, spec).value;
      const double m = 1.0 + xi * xi + xs * xs;
      const double d =
          region == RegionKind::bad_sector ? dist_bad_sector(q) : osq->dist(q);
      margin = std::min(margin, d / m);
    }
  }
  return margin;
}

std::vector<SymbolSample> numerical_range_scan(cplx theta,
                                               const DeformationSpec& spec,
                                               double Xi, int n) {
  spec.validate();
  if (n < 2) throw config_error("numerical_range_scan: n too small");
  if (!(Xi > 0)) throw config_error("numerical_range_scan: Xi must be positive");
  std::vector<SymbolSample> out;
  out.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int ix = 0; ix < n; ++ix) {
    const double xi = -Xi + 2.0 * Xi * ix / (n - 1.0);
    for (int is = 0; is < n; ++is) {
      const double xs = -Xi + 2.0 * Xi * is / (n - 1.0);
      out.push_back(symbol(xi, xs, theta, 0.0, spec));
    }
  }
  return out;
}

double scan_min_distance_to_omega_sq(const std::vector<SymbolSample>& samples,
                                     const RectangleOmega& omega) {
  const OmegaSq osq(omega);
  double d = std::numeric_limits<double>::infinity();
  for (const SymbolSample& s : samples) d = std::min(d, osq.dist(s.value));
  return d;
}

}  // namespace viscap
