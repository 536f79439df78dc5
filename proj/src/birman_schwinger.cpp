#include "viscap/birman_schwinger.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "viscap/eig.hpp"

namespace viscap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log D carried as cplx(log|D|, arg-representative mod 2pi). All phase
// continuation works on wrapped differences, so the branch of the
// representative never matters.
using LogDet = cplx;

std::string fmt(cplx z) {
  return "(" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")";
}

void check_lambda(cplx lam, const char* who) {
  if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag()))
    throw domain_error(std::string(who) + ": non-finite lambda");
  if (lam == 0.0)
    throw singularity_error(std::string(who) +
                            ": free kernel has a pole at lambda = 0");
}

void check_sizes(const Grid1D& g, const Factorization& f, const char* who) {
  if (f.v.size() != g.N || f.w.size() != g.N)
    throw config_error(std::string(who) +
                       ": factorization length does not match grid");
}

LogDet logdet_of(Matrix M) {
  LUFactors lu = lu_factor(std::move(M));
  if (lu.singular) return cplx(kNegInf, 0.0);
  auto [lg, ar] = lu_logdet(lu);
  return cplx(lg, ar);
}

// exp(l - M) in complex form; M rescales so nothing overflows.
cplx descale(LogDet l, double M) {
  return std::exp(l.real() - M) * std::polar(1.0, l.imag());
}

struct EdgeZero {};  // interior split line ran over a determinant zero

struct DetCache {
  const Grid1D* g = nullptr;
  const Factorization* f = nullptr;
  std::map<std::pair<double, double>, LogDet> memo;
  double max_loga = kNegInf;  // running max of log|D| over all samples
  long evals = 0;
  long eval_cap = 20000;

  LogDet logdet(cplx lam) {
    const auto key = std::make_pair(lam.real(), lam.imag());
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (++evals > eval_cap)
      throw contour_error(
          "find_resonances: determinant evaluation budget exhausted; the "
          "contour machinery is not converging");
    Matrix M = bs_matrix(lam, *g, *f);
    for (std::size_t i = 0; i < M.n; ++i) M(i, i) += 1.0;
    const LogDet ld = logdet_of(std::move(M));
    max_loga = std::max(max_loga, ld.real());
    memo.emplace(key, ld);
    return ld;
  }
};

// Phase increment of D along the segment a -> b, bisecting until every step
// moves the phase by at most pi/2. `outer` marks the user-visible contour,
// where a vanishing determinant is a placement error rather than a retryable
// interior event.
double arc(DetCache& C, cplx a, cplx b, int level, bool outer) {
  const LogDet la = C.logdet(a), lb = C.logdet(b);
  const double floor_log = C.max_loga - 30.0;  // |D| below ~1e-13 of the max
  if (la.real() < floor_log || lb.real() < floor_log) {
    if (outer)
      throw contour_error(
          "contour placement: |D| vanishes on the contour near " + fmt(a) +
          "; move the region boundary away from the zero");
    throw EdgeZero{};
  }
  const double d = std::remainder(lb.imag() - la.imag(), 2.0 * kPi);
  if (level >= 2 && std::abs(d) <= kPi / 2.0) return d;
  if (level >= 34) {
    if (outer)
      throw contour_error(
          "contour placement: phase refinement exhausted near " + fmt(a) +
          "; a zero sits on or hugs the contour");
    throw EdgeZero{};
  }
  const cplx m = a + 0.5 * (b - a);
  return arc(C, a, m, level + 1, outer) + arc(C, m, b, level + 1, outer);
}

struct BoxR {
  double x0, x1, y0, y1;
  long w = 0;
  double diam() const { return std::hypot(x1 - x0, y1 - y0); }
};

long box_winding(DetCache& C, const BoxR& b, bool outer) {
  const cplx c0(b.x0, b.y0), c1(b.x1, b.y0), c2(b.x1, b.y1), c3(b.x0, b.y1);
  const double total = arc(C, c0, c1, 0, outer) + arc(C, c1, c2, 0, outer) +
                       arc(C, c2, c3, 0, outer) + arc(C, c3, c0, 0, outer);
  const double w_raw = total / (2.0 * kPi);
  const long w = std::lround(w_raw);
  if (std::abs(w_raw - w) > 0.25)
    throw contour_error("winding number not integral (" +
                        std::to_string(w_raw) + ") on box around " +
                        fmt(cplx((b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2)));
  return w;
}

// Split `b` across its longest side. The split line is nudged when it lands on
// a zero or the child windings fail to add up.
std::pair<BoxR, BoxR> split_box(DetCache& C, const BoxR& b) {
  const bool vertical = (b.x1 - b.x0) >= (b.y1 - b.y0);
  for (int attempt = 0; attempt <= 3; ++attempt) {
    const double t = 0.5 + 0.07 * attempt;
    BoxR r1 = b, r2 = b;
    if (vertical) {
      const double c = b.x0 + t * (b.x1 - b.x0);
      r1.x1 = c;
      r2.x0 = c;
    } else {
      const double c = b.y0 + t * (b.y1 - b.y0);
      r1.y1 = c;
      r2.y0 = c;
    }
    try {
      r1.w = box_winding(C, r1, false);
      r2.w = box_winding(C, r2, false);
    } catch (const EdgeZero&) {
      continue;  // zero on the split line: move it
    } catch (const contour_error&) {
      continue;  // non-integral winding across the line: move it
    }
    if (r1.w + r2.w != b.w) continue;
    return {r1, r2};
  }
  throw contour_error("subdivision failed around " +
                      fmt(cplx((b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2)) +
                      "; every candidate split line sits on a zero");
}

cplx newton_polish(DetCache& C, cplx start, double stop_log, double& err_est) {
  cplx lam = start;
  double step = 0;
  for (int it = 0; it < 50; ++it) {
    const LogDet lc = C.logdet(lam);
    if (lc.real() <= stop_log) {
      err_est = step;
      return lam;
    }
    const double del = 1e-6;
    const LogDet lp = C.logdet(lam + del), lm = C.logdet(lam - del);
    const double M = std::max({lp.real(), lm.real(), lc.real()});
    const cplx dD = (descale(lp, M) - descale(lm, M)) / (2.0 * del);
    if (dD == 0.0) break;
    const cplx delta = descale(lc, M) / dD;
    lam -= delta;
    step = std::abs(delta);
    if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) break;
  }
  const LogDet lc = C.logdet(lam);
  if (lc.real() <= stop_log) {
    err_est = step;
    return lam;
  }
  throw numerical_error("find_resonances: Newton refinement failed near " +
                        fmt(start));
}

}  // namespace

cplx free_kernel(cplx lam, double x, double y) {
  check_lambda(lam, "free_kernel");
  const cplx i(0, 1);
  return i / (2.0 * lam) * std::exp(i * lam * std::abs(x - y));
}

Matrix bs_matrix(cplx lam, const Grid1D& g, const Factorization& f) {
  check_lambda(lam, "bs_matrix");
  check_sizes(g, f, "bs_matrix");
  const std::size_t N = g.N;
  const cplx i(0, 1);
  const cplx pref = i / (2.0 * lam);
  // Kernel depends only on |x_i - x_j| = h_x * |i - j| on the uniform grid.
  std::vector<cplx> t(N);
  for (std::size_t m = 0; m < N; ++m)
    t[m] = pref * std::exp(i * lam * (g.h_x * static_cast<double>(m)));
  Matrix K(N);
  for (std::size_t a = 0; a < N; ++a) {
    cplx* row = K.row(a);
    const double va_h = f.v[a] * g.h_x;
    for (std::size_t b = 0; b < N; ++b) {
      const std::size_t m = a > b ? a - b : b - a;
      row[b] = va_h * t[m] * f.w[b];
    }
  }
  return K;
}

DeterminantTrace bs_determinant(cplx lam, const Grid1D& g,
                                const Factorization& f) {
  Matrix M = bs_matrix(lam, g, f);
  for (std::size_t i = 0; i < M.n; ++i) M(i, i) += 1.0;
  const LogDet ld = logdet_of(std::move(M));
  DeterminantTrace out;
  out.lambda = lam;
  out.det_value = (ld.real() == kNegInf)
                      ? cplx(0, 0)
                      : std::exp(ld.real()) * std::polar(1.0, ld.imag());
  return out;
}

std::vector<ResonanceEstimate> find_resonances(const RectangleOmega& omega,
                                               const Grid1D& g,
                                               const Factorization& f,
                                               double tol) {
  omega.validate_basic();
  check_sizes(g, f, "find_resonances");
  if (!(tol > 0)) throw config_error("find_resonances: tol must be positive");
  if (omega.a_lo <= 0 && omega.a_hi >= 0 && -omega.gamma_lo <= 0 &&
      omega.b_hi >= 0)
    throw config_error(
        "find_resonances: Omega must exclude lambda = 0 (kernel pole)");

  DetCache C;
  C.g = &g;
  C.f = &f;
  BoxR root{omega.a_lo, omega.a_hi, -omega.gamma_lo, omega.b_hi, 0};
  root.w = box_winding(C, root, true);
  // Newton target: |D| < tol * max(1, max |D| seen on the outer boundary).
  const double stop_log = std::log(tol) + std::max(0.0, C.max_loga);
  if (root.w < 0)
    throw contour_error(
        "find_resonances: negative total winding; the discretized "
        "determinant is not holomorphic on Omega (grid too coarse)");
  std::vector<ResonanceEstimate> out;
  if (root.w == 0) return out;

  std::vector<BoxR> work{root}, final_boxes;
  while (!work.empty()) {
    BoxR b = work.back();
    work.pop_back();
    if (b.w == 0) continue;
    if (b.diam() <= 1e-2) {
      final_boxes.push_back(b);
      continue;
    }
    auto [r1, r2] = split_box(C, b);
    work.push_back(r1);
    work.push_back(r2);
  }
  // Deterministic processing order.
  std::sort(final_boxes.begin(), final_boxes.end(),
            [](const BoxR& a, const BoxR& b) {
              if (a.x0 != b.x0) return a.x0 < b.x0;
              return a.y0 < b.y0;
            });

  struct Zero {
    cplx lam;
    long mult;
    double err;
  };
  std::vector<Zero> zeros;
  for (const BoxR& b : final_boxes) {
    double err = 0;
    const cplx z =
        newton_polish(C, cplx((b.x0 + b.x1) / 2, (b.y0 + b.y1) / 2), stop_log,
                      err);
    bool merged = false;
    for (Zero& q : zeros) {
      if (std::abs(q.lam - z) < 1e-6) {
        q.mult += b.w;
        q.err = std::max(q.err, err);
        merged = true;
        break;
      }
    }
    if (!merged) zeros.push_back({z, b.w, err});
  }
  long total = 0;
  for (const Zero& q : zeros) total += q.mult;
  if (total != root.w)
    throw contour_error(
        "find_resonances: unresolved region; boundary winding " +
        std::to_string(root.w) + " but located multiplicity sum " +
        std::to_string(total));

  for (const Zero& q : zeros) {
    ResonanceEstimate e;
    e.lambda = q.lam;
    e.multiplicity = static_cast<int>(q.mult);
    e.method = Method::BS;
    e.epsilon.reset();
    e.error_estimate = q.err;
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(),
            [](const ResonanceEstimate& a, const ResonanceEstimate& b) {
              if (a.lambda.real() != b.lambda.real())
                return a.lambda.real() < b.lambda.real();
              return a.lambda.imag() < b.lambda.imag();
            });
  return out;
}

int multiplicity(cplx lam0, double r, const Grid1D& g, const Factorization& f,
                 int nodes) {
  if (!(r > 0)) throw config_error("multiplicity: radius must be positive");
  if (nodes < 8) throw config_error("multiplicity: need at least 8 nodes");
  check_sizes(g, f, "multiplicity");
  const cplx i(0, 1);

  std::string last_report;
  for (int round = 0; round < 2; ++round) {
    const int K = nodes << round;
    std::vector<cplx> z(K);
    for (int k = 0; k < K; ++k)
      z[k] = lam0 + r * std::polar(1.0, 2.0 * kPi * k / K);

    // Trace route: (1/2pi i) sum_k w_k tr[(I+K)^{-1} K'] with the closed
    // trapezoid weights w_k = (z_{k+1} - z_{k-1})/2.
    cplx S = 0;
    std::vector<LogDet> node_ld(K);
    double max_ld = kNegInf, min_ld = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k) {
      const cplx zeta = z[k];
      Matrix Km = bs_matrix(zeta, g, f);
      // dK/dzeta = K .* (i h |a-b| - 1/zeta): differentiate the kernel table.
      Matrix Kd(Km.n);
      for (std::size_t a = 0; a < Km.n; ++a) {
        const cplx* kr = Km.row(a);
        cplx* dr = Kd.row(a);
        for (std::size_t b = 0; b < Km.n; ++b) {
          const double d = g.h_x * static_cast<double>(a > b ? a - b : b - a);
          dr[b] = kr[b] * (i * d - 1.0 / zeta);
        }
      }
      for (std::size_t q = 0; q < Km.n; ++q) Km(q, q) += 1.0;
      LUFactors lu = lu_factor(std::move(Km));
      if (lu.singular)
        throw contour_error("multiplicity: determinant vanishes at node " +
                            fmt(zeta));
      auto [lg, ar] = lu_logdet(lu);
      node_ld[k] = cplx(lg, ar);
      max_ld = std::max(max_ld, lg);
      min_ld = std::min(min_ld, lg);
      lu_solve_matrix(lu, Kd);
      cplx tr = 0;
      for (std::size_t q = 0; q < Kd.n; ++q) tr += Kd(q, q);
      const cplx w = (z[(k + 1) % K] - z[(k + K - 1) % K]) / 2.0;
      S += w * tr;
    }
    if (min_ld < max_ld - 27.6)  // |D| under ~1e-12 of the circle max
      throw contour_error(
          "multiplicity: contour placement — |D| nearly vanishes on the "
          "circle around " + fmt(lam0));
    const cplx m_tr = S / (2.0 * kPi * i);

    // Winding route on the same circle, refined adaptively between nodes.
    DetCache C;
    C.g = &g;
    C.f = &f;
    for (int k = 0; k < K; ++k)
      C.memo.emplace(std::make_pair(z[k].real(), z[k].imag()), node_ld[k]);
    C.max_loga = max_ld;
    double total = 0;
    bool wind_ok = true;
    long W = 0;
    try {
      for (int k = 0; k < K; ++k) total += arc(C, z[k], z[(k + 1) % K], 2, true);
      const double w_raw = total / (2.0 * kPi);
      W = std::lround(w_raw);
      if (std::abs(w_raw - W) > 0.25) wind_ok = false;
    } catch (const EdgeZero&) {
      wind_ok = false;
    }

    const long m_round = std::lround(m_tr.real());
    const bool trace_ok = std::abs(m_tr - cplx(static_cast<double>(m_round), 0)) <= 0.1;
    if (trace_ok && wind_ok && W == m_round) return static_cast<int>(m_round);
    last_report = "trace route " + fmt(m_tr) + ", winding route " +
                  std::to_string(W);
  }
  throw contour_error(
      "multiplicity: routes disagree or are non-integral after node "
      "doubling (" + last_report + ") around " + fmt(lam0));
}

Matrix regularized_bs_matrix(cplx lam, double eps, const Grid1D& g,
                             const Factorization& f) {
  check_lambda(lam, "regularized_bs_matrix");
  check_sizes(g, f, "regularized_bs_matrix");
  if (!(eps >= 0))
    throw config_error("regularized_bs_matrix: eps must be >= 0");
  const std::size_t N = g.N;
  Matrix A = laplacian_matrix(g);
  const cplx lam2 = lam * lam;
  const cplx i(0, 1);
  for (std::size_t j = 0; j < N; ++j)
    A(j, j) += -i * eps * g.points[j] * g.points[j] - lam2;
  LUFactors lu = lu_factor(std::move(A));
  const double sm = smallest_singular_value_from_factors(lu);
  if (sm < 1e-9)
    throw conditioning_error(
        "regularized_bs_matrix: free CAP resolvent nearly singular at "
        "lambda = " + fmt(lam) + " (sigma_min = " + std::to_string(sm) + ")");
  // X = (A_eps - lambda^2)^{-1} diag(w), then rows scaled by v. No h_x: the
  // resolvent here is a matrix inverse, not a quadrature of a kernel.
  Matrix X(N);
  for (std::size_t j = 0; j < N; ++j) X(j, j) = f.w[j];
  lu_solve_matrix(lu, X);
  for (std::size_t a = 0; a < N; ++a) {
    cplx* row = X.row(a);
    for (std::size_t b = 0; b < N; ++b) row[b] *= f.v[a];
  }
  return X;
}

int multiplicity_eps(cplx lam0, double r, double eps, const Grid1D& g,
                     const Factorization& f, const Potential& p, int nodes) {
  if (!(r > 0)) throw config_error("multiplicity_eps: radius must be positive");
  if (nodes < 8) throw config_error("multiplicity_eps: need at least 8 nodes");
  check_sizes(g, f, "multiplicity_eps");
  const cplx i(0, 1);
  const std::size_t N = g.N;

  // D_eps(zeta) = det(A_eps + V - zeta^2) / det(A_eps - zeta^2) in log form.
  Matrix A = laplacian_matrix(g);
  for (std::size_t j = 0; j < N; ++j)
    A(j, j) += -i * eps * g.points[j] * g.points[j];
  std::vector<double> V(N);
  for (std::size_t j = 0; j < N; ++j)
    V[j] = eval_potential(p, g.points[j]);

  std::map<std::pair<double, double>, LogDet> memo;
  double num_max = kNegInf, den_max = kNegInf;
  long evals = 0;
  auto log_ratio = [&](cplx zeta) -> LogDet {
    const auto key = std::make_pair(zeta.real(), zeta.imag());
    const auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    if (++evals > 20000)
      throw contour_error("multiplicity_eps: evaluation budget exhausted");
    const cplx z2 = zeta * zeta;
    Matrix Mn = A, Md = A;
    for (std::size_t j = 0; j < N; ++j) {
      Mn(j, j) += V[j] - z2;
      Md(j, j) += -z2;
    }
    const LogDet ln = logdet_of(std::move(Mn));
    const LogDet ld = logdet_of(std::move(Md));
    num_max = std::max(num_max, ln.real());
    den_max = std::max(den_max, ld.real());
    if (ln.real() < num_max - 30.0 || ld.real() < den_max - 30.0)
      throw contour_error(
          "multiplicity_eps: contour placement — regularized determinant has "
          "a zero or pole on the circle near " + fmt(zeta));
    const LogDet out = ln - ld;
    memo.emplace(key, out);
    return out;
  };

  std::function<double(cplx, cplx, int)> ratio_arc = [&](cplx a, cplx b,
                                                         int level) -> double {
    const LogDet la = log_ratio(a), lb = log_ratio(b);
    const double d = std::remainder(lb.imag() - la.imag(), 2.0 * kPi);
    if (level >= 2 && std::abs(d) <= kPi / 2.0) return d;
    if (level >= 34)
      throw contour_error(
          "multiplicity_eps: phase refinement exhausted near " + fmt(a) +
          "; zero or pole sits on the circle");
    const cplx m = a + 0.5 * (b - a);
    return ratio_arc(a, m, level + 1) + ratio_arc(m, b, level + 1);
  };

  double total = 0;
  for (int k = 0; k < nodes; ++k) {
    const cplx a = lam0 + r * std::polar(1.0, 2.0 * kPi * k / nodes);
    const cplx b = lam0 + r * std::polar(1.0, 2.0 * kPi * (k + 1) / nodes);
    total += ratio_arc(a, b, 2);
  }
  const double m_raw = total / (2.0 * kPi);
  const long m_eps = std::lround(m_raw);
  if (std::abs(m_raw - m_eps) > 0.25)
    throw contour_error("multiplicity_eps: winding not integral (" +
                        std::to_string(m_raw) + ") around " + fmt(lam0));

  // Direct eigenvalue count of the discretized P_eps in the same disc.
  Matrix P = cap_matrix(g, p, eps);
  std::vector<cplx> evs;
  if (auto blocks = reflection_blocks(P)) {
    SpectrumResult s1 = eigenvalues(blocks->first);
    SpectrumResult s2 = eigenvalues(blocks->second);
    evs = std::move(s1.eigenvalues);
    evs.insert(evs.end(), s2.eigenvalues.begin(), s2.eigenvalues.end());
  } else {
    evs = eigenvalues(P).eigenvalues;
  }
  int count = 0;
  for (const cplx& ev : evs) {
    const auto lam = try_sqrt_sector(ev, 1e-9);
    if (lam && std::abs(*lam - lam0) < r) ++count;
  }

  if (static_cast<long>(count) != m_eps)
    throw discrepancy_error(
        "multiplicity_eps: identity violated around " + fmt(lam0) +
        " at eps = " + std::to_string(eps) + ": regularized contour count " +
        std::to_string(m_eps) + " (zeros minus free-spectrum poles) vs "
        "direct eigenvalue count " + std::to_string(count) +
        "; square-root images of the free CAP spectrum entered the disc");
  return count;
}

double weighted_free_resolvent_norm(cplx lam, double c, const Grid1D& g) {
  check_lambda(lam, "weighted_free_resolvent_norm");
  if (!(c > 0))
    throw config_error("weighted_free_resolvent_norm: weight rate c must be positive");
  if (!(lam.real() >= 0) || !(lam.imag() > -c + 1e-12 * (1.0 + c)))
    throw domain_error(
        "weighted_free_resolvent_norm: need Re lambda >= 0 and Im lambda > -c "
        "for the weighted kernel to decay");
  const std::size_t N = g.N;
  const cplx i(0, 1);
  const cplx pref = i / (2.0 * lam);
  std::vector<cplx> t(N);
  for (std::size_t m = 0; m < N; ++m)
    t[m] = pref * std::exp(i * lam * (g.h_x * static_cast<double>(m)));
  std::vector<double> wgt(N);
  for (std::size_t j = 0; j < N; ++j) wgt[j] = std::exp(-c * std::abs(g.points[j]));
  Matrix K(N);
  for (std::size_t a = 0; a < N; ++a) {
    cplx* row = K.row(a);
    const double wa_h = wgt[a] * g.h_x;
    for (std::size_t b = 0; b < N; ++b) {
      const std::size_t m = a > b ? a - b : b - a;
      row[b] = wa_h * t[m] * wgt[b];
    }
  }
  return operator_norm(K);
}

}  // namespace viscap
