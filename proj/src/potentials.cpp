#include "viscap/potentials.hpp"

#include <cmath>
#include <limits>

#include "viscap/assembly.hpp"

namespace viscap {

double eval_potential(const Potential& p, double x) {
  if (!std::isfinite(x)) throw domain_error("eval_potential: x must be finite");
  const double v = p.evaluator(x);
  if (!std::isfinite(v))
    throw numerical_error("eval_potential: evaluator returned non-finite value at x=" +
                          std::to_string(x));
  return v;
}

EnvelopeReport verify_envelope(const Potential& p, const Grid1D& g) {
  if (g.points.empty()) throw config_error("verify_envelope: empty grid");
  EnvelopeReport rep;
  rep.margin = std::numeric_limits<double>::infinity();
  for (double x : g.points) {
    const double absV = std::abs(eval_potential(p, x));
    const double bound = p.envelope_C * std::exp(-2.0 * p.envelope_gamma * std::abs(x));
    const double m = bound - absV;
    if (m < rep.margin) {
      rep.margin = m;
      rep.worst_x = x;
      rep.worst_value = absV;
    }
  }
  rep.pass = rep.margin >= 0;
  return rep;
}

Factorization factorize(const Potential& p, const Grid1D& g) {
  if (g.points.empty()) throw config_error("factorize: empty grid");
  Factorization f;
  f.source = p.name;
  f.v.resize(g.N);
  f.w.resize(g.N);
  for (std::size_t j = 0; j < g.N; ++j) {
    const double V = eval_potential(p, g.points[j]);
    const double r = std::sqrt(std::abs(V));
    f.w[j] = r;
    f.v[j] = V >= 0 ? r : -r;
  }
  return f;
}

Potential make_sech2(double V0) {
  Potential p;
  p.name = "sech2";
  p.evaluator = [V0](double x) {
    const double s = 1.0 / std::cosh(x);
    return V0 * s * s;
  };
  // sech x <= 2 e^{-|x|}, so |V| <= 4 V0 e^{-2|x|}.
  p.envelope_C = 4.0 * std::abs(V0);
  p.envelope_gamma = 1.0;
  if (p.envelope_C == 0) p.envelope_C = 1.0;
  return p;
}

Potential make_expwell(double V0, double gamma) {
  if (!(gamma > 0)) throw config_error("expwell: gamma must be positive");
  Potential p;
  p.name = "expwell";
  p.evaluator = [V0, gamma](double x) { return -V0 * std::exp(-2.0 * gamma * std::abs(x)); };
  p.envelope_C = std::abs(V0) > 0 ? std::abs(V0) : 1.0;
  p.envelope_gamma = gamma;
  return p;
}

Potential make_square(double V0, double a) {
  if (!(a > 0)) throw config_error("square: half-width a must be positive");
  Potential p;
  p.name = "square";
  // Midpoint value at the jump keeps the trapezoid quadrature second order.
  p.evaluator = [V0, a](double x) {
    const double ax = std::abs(x);
    if (ax < a) return -V0;
    if (ax == a) return -V0 / 2.0;
    return 0.0;
  };
  // Compact support decays faster than any exponential; certify gamma = 1.
  p.envelope_C = (std::abs(V0) > 0 ? std::abs(V0) : 1.0) * std::exp(2.0 * a);
  p.envelope_gamma = 1.0;
  return p;
}

Potential make_gaussian(double V0, double width) {
  if (!(width > 0)) throw config_error("gaussian: width must be positive");
  Potential p;
  p.name = "gaussian";
  p.evaluator = [V0, width](double x) {
    const double u = x / width;
    return -V0 * std::exp(-u * u);
  };
  // |V| e^{2 gamma |x|} peaks at |x| = gamma width^2 with value V0 e^{(gamma width)^2}.
  p.envelope_gamma = 1.0;
  p.envelope_C = (std::abs(V0) > 0 ? std::abs(V0) : 1.0) * std::exp(width * width);
  return p;
}

Potential make_zero() {
  Potential p;
  p.name = "zero";
  p.evaluator = [](double) { return 0.0; };
  p.envelope_C = 1.0;
  p.envelope_gamma = 1.0;
  return p;
}

Potential potential_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw config_error("potential: expected object with a \"kind\" field");
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  Potential p;
  if (kind == "sech2") {
    p = make_sech2(params.value("V0", 8.0));
  } else if (kind == "expwell") {
    p = make_expwell(params.value("V0", 3.0), params.value("gamma", 1.0));
  } else if (kind == "square") {
    p = make_square(params.value("V0", 1.0), params.value("a", 1.0));
  } else if (kind == "gaussian") {
    p = make_gaussian(params.value("V0", 1.0), params.value("width", 1.0));
  } else if (kind == "zero") {
    p = make_zero();
  } else {
    throw config_error("potential: unknown kind \"" + kind + "\"");
  }
  if (j.contains("envelope")) {
    const auto& e = j.at("envelope");
    p.envelope_C = e.value("C", p.envelope_C);
    p.envelope_gamma = e.value("gamma", p.envelope_gamma);
    if (!(p.envelope_C > 0) || !(p.envelope_gamma > 0))
      throw config_error("potential: envelope constants must be positive");
  }
  return p;
}

}  // namespace viscap
