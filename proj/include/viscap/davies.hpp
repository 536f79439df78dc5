#pragma once

#include "viscap/assembly.hpp"
#include "viscap/types.hpp"

namespace viscap {

// Resolvent norms are meaningless once they exceed the double-precision floor;
// values implied above this cap are reported as singularities.
inline constexpr double resolvent_norm_cap = 1e12;

// sigma(H_c) = { c^{1/2} (1 + 2k) } in one dimension, principal square root,
// for -pi < arg c <= 0.
std::vector<cplx> exact_spectrum(cplx c, int count);

// ||(-Delta - i eps x^2 - z)^{-1}|| = 1/sigma_min. Throws singularity_error
// when the implied norm exceeds the cap (z at or next to a discrete eigenvalue).
double resolvent_norm(double eps, cplx z, const Grid1D& g);

// Largest singular value of e^{-gw|x|} (-Delta - i eps x^2 - lambda^2)^{-1}
// e^{-gw|x|}; lambda must sit in the sector Re > 0, arg > -pi/8 with
// -Im lambda < gw.
double weighted_cap_resolvent_norm(double eps, cplx lam, double gw,
                                   const Grid1D& g);

}  // namespace viscap
