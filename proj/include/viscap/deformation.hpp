#pragma once

#include <utility>

#include "viscap/resonance.hpp"
#include "viscap/types.hpp"

namespace viscap {

enum class RhoKind { plateau, scaled_tanh };

// Radial deformation profile rho and the decay-rate bound gamma. The plateau
// profile (cubic smoothstep ramp on [t0, t0+w], identically 1 beyond) is the
// default and realizes the full deformation depth; scaled_tanh (s * tanh t)
// never reaches 1 and suits numerical-range studies.
struct DeformationSpec {
  RhoKind kind = RhoKind::plateau;
  double t0 = 1.0;  // plateau ramp start
  double w = 4.0;   // plateau ramp width; max slope 1.5/w
  double s = 0.4;   // scaled_tanh amplitude; slope s at 0
  double gamma = 1.0;

  // sup rho' must stay below tan(pi/8)/gamma.
  void validate() const;
  double sup_slope() const;
};

struct SymbolSample {
  double xi = 0;
  double xistar = 0;
  double h = 0;
  cplx value;
};

// (rho(t), rho'(t)) for t >= 0.
std::pair<double, double> rho_eval(const DeformationSpec& spec, double t);

// phi_theta(xi) = xi + theta sign(xi) rho(|xi|); phi^2 = (|xi| + theta rho)^2.
cplx phi_theta(double xi, cplx theta, const DeformationSpec& spec);

// J_theta(xi) = 1 + theta rho'(|xi|) (1-D Jacobian of the deformation).
cplx jacobian(double xi, cplx theta, const DeformationSpec& spec);

// q_theta(xi, xi*; h) = phi^2 - i J^{-2} xi*^2 + h a(xi) xi* + h^2 b(xi),
// with a = 2 J^{-3} J' and b = -i (J''/(2J^3) - 5 J'^2/(4 J^4)) obtained by
// expanding phi^2 - i h^2 J^{-1/2} D J^{-1} D J^{-1/2}.
SymbolSample symbol(double xi, double xistar, cplx theta, double h,
                    const DeformationSpec& spec);

struct AdmissibilityReport {
  bool pass = false;
  double margin = 0;   // inf over the lower edge of (y + beta rho(x))
  double worst_x = 0;
};

// Omega must sit above the curve y = -beta rho(x): evaluated on a 200-point
// mesh of the closed lower edge. beta in [0, gamma); beta = 0 simply fails.
AdmissibilityReport check_admissible(const RectangleOmega& omega, double beta,
                                     const DeformationSpec& spec);

enum class RegionKind {
  bad_sector,     // {|z| > 1, pi/2 < arg z < pi}
  omega_squared,  // {lambda^2 : lambda in Omega}
};

// min over an n x n scan of [-Xi, Xi]^2 of |q_theta - z| / (1 + xi^2 + xi*^2),
// z ranging over the region (exact distance for the sector, 100-point mapped
// boundary for Omega^2). Positive value certifies desk-scale ellipticity.
double symbol_region_margin(cplx theta, RegionKind region,
                            const RectangleOmega* omega, double h,
                            const DeformationSpec& spec, double Xi = 20.0,
                            int n_scan = 400);

// Principal-symbol values (h = 0) on the scan grid, for plotting and
// region-avoidance checks.
std::vector<SymbolSample> numerical_range_scan(cplx theta,
                                               const DeformationSpec& spec,
                                               double Xi = 20.0, int n = 400);

// Min distance from scan values to {lambda^2 : lambda in Omega}.
double scan_min_distance_to_omega_sq(const std::vector<SymbolSample>& samples,
                                     const RectangleOmega& omega);

}  // namespace viscap
