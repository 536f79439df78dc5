#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "viscap/types.hpp"

namespace viscap {

struct Grid1D;

// Admissible potential: real-valued with certified decay |V(x)| <= C e^{-2 gamma |x|}.
struct Potential {
  std::string name;
  std::function<double(double)> evaluator;
  double envelope_C = 1.0;
  double envelope_gamma = 1.0;
};

// v = sign(V)|V|^{1/2}, w = |V|^{1/2}, so v*w = V pointwise.
struct Factorization {
  std::vector<double> v;
  std::vector<double> w;
  std::string source;
};

struct EnvelopeReport {
  double margin = 0;       // min over grid of C e^{-2 gamma |x|} - |V(x)|
  double worst_x = 0;      // grid point attaining the minimum
  double worst_value = 0;  // |V| there
  bool pass = false;       // margin >= 0
};

double eval_potential(const Potential& p, double x);
EnvelopeReport verify_envelope(const Potential& p, const Grid1D& g);
Factorization factorize(const Potential& p, const Grid1D& g);

// Catalog. Envelope constants are certified defaults, overridable via JSON.
Potential make_sech2(double V0);                   // V0 sech^2(x), C=4V0, gamma=1
Potential make_expwell(double V0, double gamma);   // -V0 e^{-2 gamma |x|}
Potential make_square(double V0, double a);        // -V0 on [-a,a]; midpoint value at |x|=a
Potential make_gaussian(double V0, double width);  // -V0 e^{-(x/width)^2}
Potential make_zero();

// {"kind": "sech2"|"expwell"|"square"|"gaussian"|"zero", "params": {...},
//  "envelope": {"C":.., "gamma":..}} -- envelope optional.
Potential potential_from_json(const nlohmann::json& j);

}  // namespace viscap
