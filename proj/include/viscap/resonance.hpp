#pragma once

#include <optional>

#include "viscap/types.hpp"

namespace viscap {

// Omega = (a_lo, a_hi) + i(-gamma_lo, b_hi), open rectangle in the lambda plane.
struct RectangleOmega {
  double a_lo = 0;
  double a_hi = 0;
  double gamma_lo = 0;  // depth below the real axis; lower edge is Im = -gamma_lo
  double b_hi = 0;

  bool contains(cplx lam) const {
    return a_lo < lam.real() && lam.real() < a_hi && -gamma_lo < lam.imag() &&
           lam.imag() < b_hi;
  }

  // Shape sanity shared by every consumer: nonempty open rectangle.
  void validate_basic() const;

  // CAP-sector requirements: 0 < a_lo, gamma_lo/a_lo < tan(pi/8) (keeps the
  // rectangle off the Davies ray), gamma_lo below the potential's decay rate.
  void validate_sector(double envelope_gamma) const;
};

enum class Method { CAP, BS };

struct ResonanceEstimate {
  cplx lambda;
  int multiplicity = 1;
  Method method = Method::CAP;
  std::optional<double> epsilon;  // producing eps for CAP, absent for BS
  double error_estimate = 0;
};

}  // namespace viscap
