#include "viscap/resonance.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace viscap {

void RectangleOmega::validate_basic() const {
  if (!std::isfinite(a_lo) || !std::isfinite(a_hi) || !std::isfinite(gamma_lo) ||
      !std::isfinite(b_hi))
    throw config_error("Omega: non-finite corner");
  if (!(a_lo < a_hi))
    throw config_error("Omega: need a_lo < a_hi");
  if (!(-gamma_lo < b_hi))
    throw config_error("Omega: need b_hi > -gamma_lo (nonempty height)");
}

void RectangleOmega::validate_sector(double envelope_gamma) const {
  validate_basic();
  if (!(a_lo > 0))
    throw config_error("Omega: sector requires a_lo > 0");
  if (!(gamma_lo < envelope_gamma))
    throw config_error(
        "Omega: depth gamma_lo = " + std::to_string(gamma_lo) +
        " must stay below the potential's decay rate gamma = " +
        std::to_string(envelope_gamma));
  const double tan_pi8 = std::tan(std::numbers::pi / 8.0);
  if (!(gamma_lo / a_lo < tan_pi8))
    throw config_error(
        "Omega: gamma_lo/a_lo = " + std::to_string(gamma_lo / a_lo) +
        " crosses the Davies ray guard tan(pi/8) = " + std::to_string(tan_pi8));
}

}  // namespace viscap
