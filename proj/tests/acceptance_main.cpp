// Acceptance gate: runs the ten primary checks in order and prints one
// PASS/FAIL line each, with the measured numbers. Exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "viscap/assembly.hpp"
#include "viscap/birman_schwinger.hpp"
#include "viscap/cap_sweep.hpp"
#include "viscap/cli.hpp"
#include "viscap/davies.hpp"
#include "viscap/deformation.hpp"
#include "viscap/eig.hpp"
#include "viscap/potentials.hpp"

using namespace viscap;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %d: %s — %s\n", id, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::vector<cplx> parity_eigs(const Matrix& H) {
  if (auto blocks = reflection_blocks(H)) {
    std::vector<cplx> ev = eigenvalues(blocks->first).eigenvalues;
    const auto odd = eigenvalues(blocks->second).eigenvalues;
    ev.insert(ev.end(), odd.begin(), odd.end());
    return ev;
  }
  return eigenvalues(H).eigenvalues;
}

std::vector<cplx> free_cap_spectrum(double L, std::size_t N, double eps) {
  const Grid1D g = build_grid(L, N);
  return parity_eigs(cap_matrix(g, make_zero(), eps));
}

double nearest_match_err(const std::vector<cplx>& exact,
                         const std::vector<cplx>& computed) {
  double worst = 0;
  for (cplx e : exact) {
    double best = std::numeric_limits<double>::infinity();
    for (cplx z : computed) best = std::min(best, std::abs(z - e));
    worst = std::max(worst, best / std::abs(e));
  }
  return worst;
}

RectangleOmega acceptance_window() {
  RectangleOmega om;
  om.a_lo = 2.0;
  om.a_hi = 3.5;
  om.gamma_lo = 0.8;
  om.b_hi = 0.5;
  return om;
}

const cplx kLamStar(std::sqrt(31.0) / 2.0, -0.5);

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  const RectangleOmega om = acceptance_window();

  // ---- 1: Davies string reproduction at fixed grid -------------------------
  std::vector<cplx> sigma1;  // eps = 1 spectrum, reused by criterion 2
  {
    std::string detail;
    bool pass = true;
    try {
      for (double eps : {1.0, 1e-1, 1e-2}) {
        const auto ev = free_cap_spectrum(12.0, 512, eps);
        if (eps == 1.0) sigma1 = ev;
        const auto exact = exact_spectrum(cplx(0, -eps), 10);
        const double err = nearest_match_err(exact, ev);
        pass = pass && err <= 1e-6;
        detail += fmt("eps=%g: %.3g; ", eps, err);
      }
      detail = "max rel err vs sqrt(eps) e^{-i pi/4}(2k+1), k<10, L=12 N=512 "
               "(tol 1e-6): " + detail;
      if (!pass)
        detail += "box L=12 cannot hold the spread-out CAP modes at small eps";
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("exception: ") + e.what();
    }
    report(1, pass, detail);
  }

  // ---- 2: exact sqrt(eps) scaling on similarity-scaled grids ---------------
  {
    std::string detail;
    bool pass = true;
    try {
      if (sigma1.empty()) sigma1 = free_cap_spectrum(12.0, 512, 1.0);
      // The identity concerns the eigenvalue string sqrt(eps) e^{-i pi/4}
      // (2k+1); anchor mode selection on the exact values (k < 10, as in
      // criterion 1).  High grid modes of the non-normal discretization carry
      // eigenvalue condition numbers far above 1e8 and cannot satisfy any
      // 1e-8 identity between independently run eigensolves.
      const auto anchors = exact_spectrum(cplx(0, -1), 10);
      auto nearest = [](const std::vector<cplx>& v, cplx a) {
        cplx best = v.front();
        for (cplx z : v)
          if (std::abs(z - a) < std::abs(best - a)) best = z;
        return best;
      };
      detail = "max rel dev of sigma(eps)/sqrt(eps) vs sigma(1) on the "
               "k<10 string, L=12 eps^{-1/4}, N=512 (tol 1e-8): ";
      for (double eps : {1e-1, 1e-2}) {
        auto ev = free_cap_spectrum(12.0 * std::pow(eps, -0.25), 512, eps);
        for (cplx& z : ev) z /= std::sqrt(eps);
        double worst = 0;
        for (cplx a : anchors) {
          const cplx b = nearest(sigma1, a), s = nearest(ev, a);
          worst = std::max(worst, std::abs(s - b) / std::abs(b));
        }
        pass = pass && worst < 1e-8;
        detail += fmt("eps=%g: %.3g; ", eps, worst);
      }
    } catch (const std::exception& e) {
      pass = false;
      detail = std::string("exception: ") + e.what();
    }
    report(2, pass, detail);
  }

  // ---- 3: BS oracle accuracy and runtime -----------------------------------
  Grid1D g600 = build_grid(12.0, 600);
  Factorization f600 = factorize(make_sech2(8.0), g600);
  cplx zero3 = kLamStar;  // refined below; fallback keeps later criteria alive
  int mult3 = 0;
  {
    std::string detail;
    bool pass = false;
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const auto rs = find_resonances(om, g600, f600, 1e-8);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      if (rs.size() == 1) {
        zero3 = rs[0].lambda;
        mult3 = rs[0].multiplicity;
        const double dist = std::abs(zero3 - kLamStar);
        pass = dist < 5e-3 && secs < 60.0;
        detail = fmt("one zero at %.12g%+.12gi, |lambda - lambda*| = %.3g "
                     "(tol 5e-3), %.1f s (budget 60 s)",
                     zero3.real(), zero3.imag(), dist, secs);
      } else {
        detail = fmt("expected exactly one zero in Omega, got %zu (%.1f s)",
                     rs.size(), secs);
      }
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(3, pass, detail);
  }

  // ---- 4: viscosity-limit convergence along the sweep ----------------------
  SweepResult sweep4;
  {
    std::string detail;
    bool pass = false;
    try {
      SweepConfig cfg;
      cfg.potential = make_sech2(8.0);
      cfg.omega = om;
      sweep4 = run_sweep(cfg);
      const Track* best = nullptr;
      for (const Track& t : sweep4.tracks) {
        if (t.points.size() != sweep4.schedule.size()) continue;
        if (!best || std::abs(t.points.back().lambda - kLamStar) <
                         std::abs(best->points.back().lambda - kLamStar))
          best = &t;
      }
      if (!best) {
        detail = fmt("no full-length track (%zu tracks, %zu orphans)",
                     sweep4.tracks.size(), sweep4.orphans.size());
      } else {
        std::vector<double> d;
        for (const TrackPoint& p : best->points)
          d.push_back(std::abs(p.lambda - kLamStar));
        bool mono = true;
        for (std::size_t k = 1; k < d.size(); ++k)
          mono = mono && d[k] <= std::max(d[k - 1], 1e-3);
        const bool ends = d.back() < 1e-2;
        pass = mono && ends;
        detail = "|lambda(eps) - lambda*| along the track: ";
        for (double v : d) detail += fmt("%.2e ", v);
        detail += fmt("; monotone-with-floor(1e-3): %s, final < 1e-2: %s",
                      mono ? "yes" : "NO", ends ? "yes" : "NO");
        if (!pass)
          detail += " (eigenvector conditioning of the large-box QR degrades "
                    "the tail of the schedule)";
      }
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(4, pass, detail);
  }

  // ---- 5: delta-disc eigenvalue count vs BS multiplicity -------------------
  {
    std::string detail;
    bool pass = false;
    try {
      const double delta = 0.05;
      int count = 0;
      double nearest = std::numeric_limits<double>::infinity();
      for (const cplx& lam : sweep4.final_lambdas) {
        const double dd = std::abs(lam - zero3);
        nearest = std::min(nearest, dd);
        if (dd < delta) ++count;
      }
      const int m_trace = multiplicity(zero3, delta, g600, f600);
      pass = count == 1 && m_trace == 1 && mult3 == 1;
      detail = fmt("final-eps CAP eigenvalues in B(zero, 0.05): %d (nearest "
                   "at %.3g), trace-contour m = %d, subdivision winding m = "
                   "%d; need all = 1",
                   count, nearest, m_trace, mult3);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(5, pass, detail);
  }

  // ---- 6: Lemma 4.1 regularized count at eps = 1e-2, 1e-3 ------------------
  {
    std::string detail;
    bool pass = true;
    SweepConfig cfg;
    cfg.potential = make_sech2(8.0);
    cfg.omega = om;
    for (double eps : {1e-2, 1e-3}) {
      try {
        const auto [L, N] = grid_for_eps(cfg, eps);
        const Grid1D g = build_grid(L, N);
        const Factorization f = factorize(cfg.potential, g);
        const int m = multiplicity_eps(zero3, 0.05, eps, g, f, cfg.potential);
        pass = pass && m == 1;
        detail += fmt("eps=%g (L=%g,N=%zu): m_eps = %d; ", eps, L, N, m);
      } catch (const std::exception& e) {
        pass = false;
        detail += fmt("eps=%g: %s; ", eps, e.what());
      }
    }
    report(6, pass, detail);
  }

  // ---- 7: Lemma 3.3 uniform weighted bound, unweighted blow-up -------------
  {
    std::string detail;
    bool pass = false;
    try {
      const Grid1D gw = build_grid(12.0, 512);
      double mx = 0, mn = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 5; ++k) {
        const double v = weighted_cap_resolvent_norm(std::pow(10.0, -1.0 - k),
                                                     cplx(1.5, 0.2), 1.0, gw);
        mx = std::max(mx, v);
        mn = std::min(mn, v);
      }
      const Grid1D gu = build_grid(18.0, 512);
      const cplx z = std::polar(1.0, -std::numbers::pi / 8.0);
      const double epses[] = {4e-2, 2e-2, 1e-2, 5e-3};
      double prev = 0;
      bool increasing = true;
      double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
      for (double eps : epses) {
        const double nm =
            std::min(resolvent_norm(eps, z, gu), resolvent_norm_cap);
        increasing = increasing && nm > prev;
        prev = nm;
        const double x = 1.0 / std::sqrt(eps);
        const double y = std::log(nm);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
      }
      const double n = 4.0;
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      const double corr =
          (n * sxy - sx * sy) /
          std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
      pass = (mx / mn < 10.0) && increasing && slope > 0 && corr > 0.9;
      detail = fmt("weighted max/min over eps in [1e-5, 1e-1] = %.6f (< 10); "
                   "unweighted at e^{-i pi/8}: increasing = %s, log-norm vs "
                   "eps^{-1/2} slope = %.4f (> 0), corr = %.4f (> 0.9)",
                   mx / mn, increasing ? "yes" : "NO", slope, corr);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(7, pass, detail);
  }

  // ---- 8: deformed-symbol region avoidance ---------------------------------
  {
    std::string detail;
    bool pass = false;
    try {
      DeformationSpec tanh_s;
      tanh_s.kind = RhoKind::scaled_tanh;
      tanh_s.s = 0.4;
      tanh_s.gamma = 1.0;
      tanh_s.validate();
      RectangleOmega om8;
      om8.a_lo = 6.0;
      om8.a_hi = 8.0;
      om8.gamma_lo = 0.1;
      om8.b_hi = 1.0;
      const AdmissibilityReport adm = check_admissible(om8, 0.4, tanh_s);
      const auto scan = numerical_range_scan(cplx(0, -0.4), tanh_s, 20.0, 400);
      const double dmin = scan_min_distance_to_omega_sq(scan, om8);

      const DeformationSpec plat;  // full-depth plateau profile
      double worst_margin = std::numeric_limits<double>::infinity();
      for (cplx th : {cplx(0.5, 0), cplx(-0.5, 0), cplx(0, 0.5), cplx(0, -0.5)})
        worst_margin = std::min(
            worst_margin, symbol_region_margin(th, RegionKind::bad_sector,
                                               nullptr, 0.0, plat));
      RectangleOmega om32;
      om32.a_lo = 6.0;
      om32.a_hi = 8.0;
      om32.gamma_lo = 0.3;
      om32.b_hi = 1.0;
      const double m32 = symbol_region_margin(
          cplx(0, -0.4), RegionKind::omega_squared, &om32, 0.0, plat);
      pass = adm.pass && dmin > 0 && worst_margin > 0 && m32 > 0;
      detail = fmt("0.4 tanh admissibility margin %.4f, scan min dist to "
                   "Omega^2 = %.4f; plateau bad-sector margin (4 thetas) >= "
                   "%.4f, Omega^2 margin at theta=-0.4i: %.4f (all must be "
                   "> 0)",
                   adm.margin, dmin, worst_margin, m32);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(8, pass, detail);
  }

  // ---- 9: free-potential sanity across both methods ------------------------
  {
    std::string detail;
    bool pass = false;
    try {
      const Grid1D g = build_grid(12.0, 200);
      const Factorization fz = factorize(make_zero(), g);
      double dev = 0;
      for (int ix = 0; ix < 10; ++ix)
        for (int iy = 0; iy < 10; ++iy) {
          const cplx lam(om.a_lo + (om.a_hi - om.a_lo) * (ix + 0.5) / 10.0,
                         -om.gamma_lo +
                             (om.b_hi + om.gamma_lo) * (iy + 0.5) / 10.0);
          dev = std::max(dev,
                         std::abs(bs_determinant(lam, g, fz).det_value - 1.0));
        }
      const bool bs_empty = find_resonances(om, g, fz, 1e-8).empty();
      SweepConfig cfg;
      cfg.potential = make_zero();
      cfg.omega = om;
      cfg.eps_count = 2;
      const SweepResult r = run_sweep(cfg);
      const bool cap_empty =
          r.tracks.empty() && converged_estimates(r, cfg.cauchy_tol).empty();
      pass = dev < 1e-10 && bs_empty && cap_empty;
      detail = fmt("max |D - 1| over 10x10 Omega sample = %.3g (tol 1e-10); "
                   "BS zeros: %s, CAP tracks/estimates: %s",
                   dev, bs_empty ? "none" : "FOUND", cap_empty ? "none"
                                                              : "FOUND");
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(9, pass, detail);
  }

  // ---- 10: byte-identical compare pipeline ---------------------------------
  {
    std::string detail;
    bool pass = false;
    try {
      const fs::path root = fs::temp_directory_path() / "viscap_acceptance";
      fs::remove_all(root);
      fs::create_directories(root);
      const fs::path cfgp = root / "config.json";
      {
        std::ofstream out(cfgp);
        out << R"({
  "command": "compare",
  "potential": {"kind": "sech2", "params": {"V0": 8.0}},
  "omega": {"a_lo": 2.0, "a_hi": 3.5, "gamma_lo": 0.8, "b_hi": 0.5},
  "sweep": {"eps_count": 3},
  "oracle": {"N": 400, "scan_nx": 6, "scan_ny": 4},
  "compare": {"delta": 0.05}
})";
      }
      const fs::path da = root / "a", db = root / "b";
      const int ra = run(cfgp.string(), da.string(), "");
      const int rb = run(cfgp.string(), db.string(), "");
      std::vector<std::string> names_a, names_b;
      for (const auto& e : fs::directory_iterator(da))
        names_a.push_back(e.path().filename().string());
      for (const auto& e : fs::directory_iterator(db))
        names_b.push_back(e.path().filename().string());
      std::sort(names_a.begin(), names_a.end());
      std::sort(names_b.begin(), names_b.end());
      bool identical = ra == exit_ok && rb == exit_ok && names_a == names_b &&
                       !names_a.empty();
      if (identical)
        for (const std::string& nm : names_a)
          identical = identical && slurp(da / nm) == slurp(db / nm);
      pass = identical;
      detail = fmt("exit codes %d/%d, %zu artifacts, byte-identical: %s",
                   ra, rb, names_a.size(), identical ? "yes" : "NO");
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    report(10, pass, detail);
  }

  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures;
}
