#include "viscap/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "viscap/artifacts.hpp"
#include "viscap/birman_schwinger.hpp"
#include "viscap/davies.hpp"
#include "viscap/deformation.hpp"
#include "viscap/eig.hpp"
#include "viscap/potentials.hpp"

namespace viscap {

namespace {

namespace fs = std::filesystem;
using njson = nlohmann::ordered_json;

cplx cplx_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw config_error(std::string(what) + ": expected {\"re\":.., \"im\":..}");
  return {j.at("re").get<double>(), j.at("im").get<double>()};
}

RectangleOmega omega_from_json(const nlohmann::json& j) {
  for (const char* k : {"a_lo", "a_hi", "gamma_lo", "b_hi"})
    if (!j.contains(k))
      throw config_error(std::string("omega: missing field ") + k);
  RectangleOmega om;
  om.a_lo = j.at("a_lo").get<double>();
  om.a_hi = j.at("a_hi").get<double>();
  om.gamma_lo = j.at("gamma_lo").get<double>();
  om.b_hi = j.at("b_hi").get<double>();
  return om;
}

DeformationSpec rho_from_json(const nlohmann::json& j) {
  DeformationSpec spec;
  const std::string kind = j.value("kind", std::string("plateau"));
  if (kind == "plateau")
    spec.kind = RhoKind::plateau;
  else if (kind == "scaled_tanh")
    spec.kind = RhoKind::scaled_tanh;
  else
    throw config_error("rho.kind must be \"plateau\" or \"scaled_tanh\"");
  spec.t0 = j.value("t0", spec.t0);
  spec.w = j.value("w", spec.w);
  spec.s = j.value("s", spec.s);
  spec.gamma = j.value("gamma", spec.gamma);
  spec.validate();
  return spec;
}

SweepConfig sweep_from_json(const nlohmann::json& cfg) {
  if (!cfg.contains("potential"))
    throw config_error("sweep needs a \"potential\" section");
  if (!cfg.contains("omega"))
    throw config_error("sweep needs an \"omega\" section");
  SweepConfig sc;
  sc.potential = potential_from_json(cfg.at("potential"));
  sc.omega = omega_from_json(cfg.at("omega"));
  const nlohmann::json s =
      cfg.contains("sweep") ? cfg.at("sweep") : nlohmann::json::object();
  sc.L = s.value("L", sc.L);
  sc.N = s.value("N", sc.N);
  sc.eps_start = s.value("eps_start", sc.eps_start);
  sc.eps_ratio = s.value("eps_ratio", sc.eps_ratio);
  sc.eps_count = s.value("eps_count", sc.eps_count);
  sc.track_radius = s.value("track_radius", sc.track_radius);
  sc.cauchy_tol = s.value("cauchy_tol", sc.cauchy_tol);
  sc.grow_grid = s.value("grow_grid", sc.grow_grid);
  return sc;
}

njson estimate_to_json(const ResonanceEstimate& e) {
  njson j;
  j["lambda"] = cplx_to_json(e.lambda);
  j["multiplicity"] = e.multiplicity;
  j["method"] = e.method == Method::BS ? "BS" : "CAP";
  if (e.epsilon) j["epsilon"] = *e.epsilon;
  j["error_estimate"] = e.error_estimate;
  return j;
}

struct SweepArtifacts {
  SweepResult result;
  std::vector<ResonanceEstimate> estimates;
};

SweepArtifacts do_sweep(const nlohmann::json& cfg, const std::string& out) {
  const SweepConfig sc = sweep_from_json(cfg);
  SweepArtifacts art;
  art.result = run_sweep(sc);
  art.estimates = converged_estimates(art.result, sc.cauchy_tol);

  std::vector<std::vector<double>> rows;
  for (const Track& t : art.result.tracks)
    for (const TrackPoint& p : t.points) {
      const cplx z = p.lambda * p.lambda;
      rows.push_back({p.eps, static_cast<double>(t.id), p.lambda.real(),
                      p.lambda.imag(), z.real(), z.imag()});
    }
  write_csv(out + "/sweep.csv",
            {"epsilon", "track_id", "re_lambda", "im_lambda", "re_z", "im_z"},
            rows);

  njson rj;
  rj["method"] = "CAP";
  rj["estimates"] = njson::array();
  for (const auto& e : art.estimates) rj["estimates"].push_back(estimate_to_json(e));
  rj["schedule"] = art.result.schedule;
  rj["track_count"] = art.result.tracks.size();
  rj["failures"] = njson::array();
  for (const auto& [eps, msg] : art.result.failures)
    rj["failures"].push_back(njson{{"epsilon", eps}, {"message", msg}});
  rj["orphans"] = njson::array();
  for (const TrackPoint& p : art.result.orphans)
    rj["orphans"].push_back(
        njson{{"epsilon", p.eps}, {"lambda", cplx_to_json(p.lambda)}});
  write_json(out + "/resonances.json", rj);

  // Envelope certification on the largest grid the sweep touches.
  const double eps_last =
      art.result.schedule.empty() ? sc.eps_start : art.result.schedule.back();
  const auto [L, N] = grid_for_eps(sc, eps_last);
  const Grid1D g = build_grid(L, N);
  const EnvelopeReport er = verify_envelope(sc.potential, g);
  njson mj;
  mj["potential"] = sc.potential.name;
  mj["envelope_C"] = sc.potential.envelope_C;
  mj["envelope_gamma"] = sc.potential.envelope_gamma;
  mj["grid"] = njson{{"L", g.L}, {"N", g.N}};
  mj["margin"] = er.margin;
  mj["worst_x"] = er.worst_x;
  mj["worst_value"] = er.worst_value;
  mj["pass"] = er.pass;
  write_json(out + "/margin_report.json", mj);
  return art;
}

std::vector<ResonanceEstimate> do_oracle(const nlohmann::json& cfg,
                                         const std::string& out) {
  if (!cfg.contains("potential"))
    throw config_error("oracle needs a \"potential\" section");
  if (!cfg.contains("omega"))
    throw config_error("oracle needs an \"omega\" section");
  const Potential p = potential_from_json(cfg.at("potential"));
  const RectangleOmega om = omega_from_json(cfg.at("omega"));
  const nlohmann::json o =
      cfg.contains("oracle") ? cfg.at("oracle") : nlohmann::json::object();
  const double L = o.value("L", 12.0);
  const std::size_t N = o.value("N", std::size_t{600});
  const double tol = o.value("tol", 1e-8);
  const Grid1D g = build_grid(L, N);
  const Factorization f = factorize(p, g);

  const auto ests = find_resonances(om, g, f, tol);
  njson oj;
  oj["method"] = "BS";
  oj["resonances"] = njson::array();
  for (const auto& e : ests) {
    njson ej;
    ej["lambda"] = cplx_to_json(e.lambda);
    ej["multiplicity"] = e.multiplicity;
    ej["method"] = "BS";
    ej["residual"] = std::abs(bs_determinant(e.lambda, g, f).det_value);
    oj["resonances"].push_back(ej);
  }
  write_json(out + "/oracle.json", oj);

  // Coarse |D| landscape over Omega for plotting and sanity.
  const int nx = o.value("scan_nx", 24);
  const int ny = o.value("scan_ny", 16);
  if (nx < 2 || ny < 2) throw config_error("oracle: scan grid too small");
  std::vector<std::vector<double>> rows;
  for (int ix = 0; ix < nx; ++ix)
    for (int iy = 0; iy < ny; ++iy) {
      const double re = om.a_lo + (om.a_hi - om.a_lo) * (ix + 0.5) / nx;
      const double im =
          -om.gamma_lo + (om.b_hi + om.gamma_lo) * (iy + 0.5) / ny;
      const cplx D = bs_determinant(cplx(re, im), g, f).det_value;
      rows.push_back({re, im, D.real(), D.imag()});
    }
  write_csv(out + "/determinant_scan.csv",
            {"re_lambda", "im_lambda", "re_D", "im_D"}, rows);
  return ests;
}

void do_davies(const nlohmann::json& cfg, const std::string& out) {
  const nlohmann::json d =
      cfg.contains("davies") ? cfg.at("davies") : nlohmann::json::object();
  const std::size_t N = d.value("N", std::size_t{512});
  const double Lw = d.value("L_weighted", 12.0);
  const double Lu = d.value("L_unweighted", 18.0);
  const cplx lam = d.contains("lambda")
                       ? cplx_from_json(d.at("lambda"), "davies.lambda")
                       : cplx(1.5, 0.2);
  const double gw = d.value("gamma_weight", 1.0);
  std::vector<double> eps_w =
      d.value("eps_weighted",
              std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4, 1e-5});
  const cplx z = d.contains("z")
                     ? cplx_from_json(d.at("z"), "davies.z")
                     : std::polar(1.0, -std::numbers::pi / 8.0);
  std::vector<double> eps_u =
      d.value("eps_unweighted", std::vector<double>{4e-2, 2e-2, 1e-2, 5e-3});

  std::vector<std::vector<double>> rows;
  const Grid1D gweighted = build_grid(Lw, N);
  for (double eps : eps_w) {
    const double nm = weighted_cap_resolvent_norm(eps, lam, gw, gweighted);
    // Weighted rows key on lambda: the z columns carry lambda itself.
    rows.push_back({eps, lam.real(), lam.imag(), nm, 1.0, gw});
  }
  const Grid1D gunw = build_grid(Lu, N);
  for (double eps : eps_u) {
    const double nm = std::min(resolvent_norm(eps, z, gunw), resolvent_norm_cap);
    rows.push_back({eps, z.real(), z.imag(), nm, 0.0, 0.0});
  }
  write_csv(out + "/davies_sweep.csv",
            {"epsilon", "re_z", "im_z", "norm", "weighted_flag", "gamma_weight"},
            rows);
}

void do_symbol(const nlohmann::json& cfg, const std::string& out) {
  const nlohmann::json s =
      cfg.contains("symbol") ? cfg.at("symbol") : nlohmann::json::object();
  const DeformationSpec spec =
      s.contains("rho") ? rho_from_json(s.at("rho")) : DeformationSpec{};
  const cplx theta = s.contains("theta")
                         ? cplx_from_json(s.at("theta"), "symbol.theta")
                         : cplx(0, -0.4);
  const double Xi = s.value("Xi", 20.0);
  const int n = s.value("n", 200);
  const double h = s.value("h", 0.0);
  if (n < 2) throw config_error("symbol: n too small");
  std::vector<std::vector<double>> rows;
  for (int ix = 0; ix < n; ++ix) {
    const double xi = -Xi + 2.0 * Xi * ix / (n - 1.0);
    for (int is = 0; is < n; ++is) {
      const double xs = -Xi + 2.0 * Xi * is / (n - 1.0);
      const SymbolSample smp = symbol(xi, xs, theta, h, spec);
      rows.push_back({smp.xi, smp.xistar, smp.value.real(), smp.value.imag(),
                      theta.real(), theta.imag(), h});
    }
  }
  write_csv(out + "/symbol_scan.csv",
            {"xi", "xistar", "re_q", "im_q", "theta_re", "theta_im", "h"},
            rows);
}

}  // namespace

CompareReport compare_report(const SweepResult& sweep,
                             const std::vector<ResonanceEstimate>& oracle,
                             double delta) {
  if (!(delta > 0)) throw config_error("compare_report: delta must be positive");
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < oracle.size(); ++i)
    for (std::size_t j = i + 1; j < oracle.size(); ++j)
      min_sep = std::min(min_sep,
                         std::abs(oracle[i].lambda - oracle[j].lambda));
  if (!(delta < min_sep / 2.0))
    throw config_error(
        "compare_report: delta = " + std::to_string(delta) +
        " must stay below half the minimum oracle separation " +
        std::to_string(min_sep));

  CompareReport rep;
  for (const auto& est : oracle) {
    CompareEntry e;
    e.lambda_bs = est.lambda;
    e.multiplicity = est.multiplicity;
    e.best_match_dist = std::numeric_limits<double>::infinity();
    for (const cplx& lam : sweep.final_lambdas) {
      const double d = std::abs(lam - est.lambda);
      e.best_match_dist = std::min(e.best_match_dist, d);
      if (d < delta) ++e.cap_count;
    }
    e.pass = e.cap_count == e.multiplicity;
    if (e.cap_count > 0)
      rep.max_pair_dist = std::max(rep.max_pair_dist, e.best_match_dist);
    rep.pass = rep.pass && e.pass;
    rep.entries.push_back(e);
  }
  return rep;
}

nlohmann::ordered_json compare_report_to_json(const CompareReport& r) {
  njson j;
  j["entries"] = njson::array();
  for (const auto& e : r.entries) {
    njson ej;
    ej["lambda_bs"] = cplx_to_json(e.lambda_bs);
    ej["multiplicity"] = e.multiplicity;
    ej["cap_count"] = e.cap_count;
    // -1 encodes "no CAP eigenvalue available" (distance would be infinite).
    ej["best_match_dist"] =
        std::isfinite(e.best_match_dist) ? e.best_match_dist : -1.0;
    ej["pass"] = e.pass;
    j["entries"].push_back(ej);
  }
  j["max_pair_dist"] = r.max_pair_dist;
  j["pass"] = r.pass;
  return j;
}

int run(const std::string& config_path, const std::string& out_dir,
        const std::string& command) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create output directory %s\n",
                 out_dir.c_str());
    return exit_config;
  }
  auto fail = [&](const char* kind, const std::string& msg, int code) {
    njson j;
    j["error"] = kind;
    j["message"] = msg;
    write_json(out_dir + "/error.json", j);
    return code;
  };

  nlohmann::json cfg;
  std::string cmd;
  try {
    std::ifstream in(config_path);
    if (!in) throw config_error("cannot open config: " + config_path);
    cfg = nlohmann::json::parse(in);
    const std::string from_cfg = cfg.value("command", std::string());
    if (!command.empty() && !from_cfg.empty() && command != from_cfg)
      throw config_error("command line says \"" + command +
                         "\" but config says \"" + from_cfg + "\"");
    cmd = !command.empty() ? command : from_cfg;
    if (cmd.empty())
      throw config_error("no command: pass a subcommand or set \"command\"");

    if (cmd == "sweep") {
      do_sweep(cfg, out_dir);
    } else if (cmd == "oracle") {
      do_oracle(cfg, out_dir);
    } else if (cmd == "davies") {
      do_davies(cfg, out_dir);
    } else if (cmd == "symbol") {
      do_symbol(cfg, out_dir);
    } else if (cmd == "compare") {
      const auto sweep_art = do_sweep(cfg, out_dir);
      const auto oracle_est = do_oracle(cfg, out_dir);
      const double delta =
          cfg.contains("compare")
              ? cfg.at("compare").value("delta", 0.05)
              : 0.05;
      const CompareReport rep =
          compare_report(sweep_art.result, oracle_est, delta);
      njson rj = compare_report_to_json(rep);
      rj["delta"] = delta;
      write_json(out_dir + "/compare_report.json", rj);
      if (!rep.pass)
        return fail("compare_failed",
                    "CAP eigenvalue counts do not reproduce the BS "
                    "multiplicities at delta = " + std::to_string(delta),
                    exit_compare_failed);
    } else {
      throw config_error("unknown command: " + cmd);
    }
  } catch (const nlohmann::json::exception& e) {
    return fail("config", std::string("config parse: ") + e.what(), exit_config);
  } catch (const config_error& e) {
    return fail("config", e.what(), exit_config);
  } catch (const domain_error& e) {
    return fail("config", e.what(), exit_config);
  } catch (const numerical_error& e) {
    return fail("numerical", e.what(), exit_numerical);
  }
  return exit_ok;
}

}  // namespace viscap
