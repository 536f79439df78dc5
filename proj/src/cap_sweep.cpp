#include "viscap/cap_sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <tuple>

#include "viscap/eig.hpp"

namespace viscap {

namespace {

// Smallest Re(lambda)/(6 |lambda|^2) over the closed rectangle: the cubic
// absorption rate of the CAP eigenfunction envelope exp(Im(integral of
// sqrt(lambda^2 + i eps x^2))) ~ exp(-eps w3 x^3) at large x. The minimum sits
// at a corner (decreasing in Re on Re > |Im|, decreasing in |Im|).
double min_absorption_rate(const RectangleOmega& om) {
  const double res[2] = {om.a_lo, om.a_hi};
  const double ims[2] = {-om.gamma_lo, om.b_hi};
  double w3 = std::numeric_limits<double>::infinity();
  for (double re : res)
    for (double im : ims) w3 = std::min(w3, re / (6.0 * (re * re + im * im)));
  return w3;
}

void validate_cfg(const SweepConfig& cfg) {
  cfg.omega.validate_basic();
  cfg.omega.validate_sector(cfg.potential.envelope_gamma);
  if (!(cfg.eps_start > 0))
    throw config_error("run_sweep: eps_start must be positive");
  if (!(cfg.eps_ratio > 0 && cfg.eps_ratio < 1))
    throw config_error("run_sweep: eps_ratio must lie in (0, 1)");
  if (cfg.eps_count < 2)
    throw config_error("run_sweep: eps_count must be at least 2");
  if (!(cfg.track_radius > 0))
    throw config_error("run_sweep: track_radius must be positive");
  if (!(cfg.cauchy_tol > 0))
    throw config_error("run_sweep: cauchy_tol must be positive");
  if (!(cfg.L > 0) || cfg.N < 4 || cfg.N % 2 != 0)
    throw config_error("run_sweep: base grid needs L > 0 and even N >= 4");
}

std::vector<cplx> spectrum_with_parity(const Matrix& A) {
  if (auto blocks = reflection_blocks(A)) {
    SpectrumResult s1 = eigenvalues(blocks->first);
    SpectrumResult s2 = eigenvalues(blocks->second);
    std::vector<cplx> out = std::move(s1.eigenvalues);
    out.insert(out.end(), s2.eigenvalues.begin(), s2.eigenvalues.end());
    return out;
  }
  return eigenvalues(A).eigenvalues;
}

}  // namespace

std::pair<double, std::size_t> grid_for_eps(const SweepConfig& cfg,
                                            double eps) {
  if (!cfg.grow_grid) return {cfg.L, cfg.N};
  if (!(eps > 0)) throw config_error("grid_for_eps: eps must be positive");
  const double w3 = min_absorption_rate(cfg.omega);
  const double gp = cfg.omega.gamma_lo;
  // Outgoing tails grow like e^{gamma' x} until the absorber's -eps w3 x^3
  // takes over; demand e^{-8} net suppression at the box edge so the periodic
  // wrap-around is below the eigenvalue accuracy floor.
  double L = std::ceil(cfg.L);
  while (eps * w3 * L * L * L - gp * L < 8.0) {
    L += 1.0;
    if (L > 5000.0)
      throw config_error(
          "grid_for_eps: no admissible box below L = 5000; omega too deep "
          "for this eps");
  }
  L = std::max(L, cfg.L);
  // Plane-wave resolution k_max = 10 >= 3x the sector's |lambda| range.
  std::size_t N = static_cast<std::size_t>(
      std::ceil(20.0 * L / std::numbers::pi));
  if (N % 2 != 0) ++N;
  N = std::max<std::size_t>(N, 4);
  return {L, N};
}

SweepResult run_sweep(const SweepConfig& cfg) {
  validate_cfg(cfg);
  SweepResult res;
  res.schedule.resize(static_cast<std::size_t>(cfg.eps_count));
  for (int k = 0; k < cfg.eps_count; ++k)
    res.schedule[static_cast<std::size_t>(k)] =
        cfg.eps_start * std::pow(cfg.eps_ratio, k);

  struct Active {
    std::size_t track;  // index into res.tracks
    cplx last;
  };
  std::vector<Active> alive;
  int next_id = 0;
  std::vector<double> ok_steps;

  for (double eps : res.schedule) {
    std::vector<cplx> lams;
    try {
      const auto [L, N] = grid_for_eps(cfg, eps);
      const Grid1D g = build_grid(L, N);
      const Matrix P = cap_matrix(g, cfg.potential, eps);
      SpectrumResult spec;
      spec.eigenvalues = spectrum_with_parity(P);
      lams = filter_sector(spec, cfg.omega);
    } catch (const numerical_error& e) {
      res.failures.emplace_back(eps, e.what());
      continue;  // partial result; tracks simply do not extend here
    }
    ok_steps.push_back(eps);

    std::vector<cplx> prev(alive.size());
    for (std::size_t i = 0; i < alive.size(); ++i) prev[i] = alive[i].last;
    const auto pairs = match_tracks(prev, lams, cfg.track_radius);

    std::vector<Active> next_alive;
    std::vector<bool> used_new(lams.size(), false);
    for (const auto& [pi, ni] : pairs) {
      Track& t = res.tracks[alive[pi].track];
      t.points.push_back({eps, lams[ni]});
      next_alive.push_back({alive[pi].track, lams[ni]});
      used_new[ni] = true;
    }
    for (std::size_t ni = 0; ni < lams.size(); ++ni) {
      if (used_new[ni]) continue;
      Track t;
      t.id = next_id++;
      t.points.push_back({eps, lams[ni]});
      res.tracks.push_back(std::move(t));
      next_alive.push_back({res.tracks.size() - 1, lams[ni]});
    }
    alive = std::move(next_alive);
    res.final_lambdas = lams;
  }
  if (ok_steps.empty()) res.final_lambdas.clear();

  // Orphan records: a track that does not span the full run of successful
  // steps contributes its entry point (late start) / exit point (early end).
  if (!ok_steps.empty()) {
    for (const Track& t : res.tracks) {
      if (t.points.front().eps != ok_steps.front())
        res.orphans.push_back(t.points.front());
      if (t.points.back().eps != ok_steps.back())
        res.orphans.push_back(t.points.back());
    }
  }
  return res;
}

std::vector<std::pair<std::size_t, std::size_t>> match_tracks(
    const std::vector<cplx>& prev, const std::vector<cplx>& next,
    double radius) {
  if (!(radius > 0)) throw config_error("match_tracks: radius must be positive");
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < prev.size(); ++i)
    for (std::size_t j = 0; j < next.size(); ++j) {
      const double d = std::abs(prev[i] - next[j]);
      if (d <= radius) cand.emplace_back(d, i, j);
    }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> ui(prev.size(), false), uj(next.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& [d, i, j] : cand) {
    if (ui[i] || uj[j]) continue;
    ui[i] = true;
    uj[j] = true;
    out.emplace_back(i, j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ResonanceEstimate> converged_estimates(const SweepResult& r,
                                                   double tol) {
  if (!(tol > 0))
    throw config_error("converged_estimates: tol must be positive");
  struct Cand {
    int id;
    cplx lam;
    double eps;
    double step;
  };
  std::vector<Cand> cands;
  for (const Track& t : r.tracks) {
    if (t.points.size() < 2) continue;  // single-point tracks carry no Cauchy info
    const TrackPoint& a = t.points[t.points.size() - 2];
    const TrackPoint& b = t.points.back();
    const double step = std::abs(b.lambda - a.lambda);
    if (step < tol) cands.push_back({t.id, b.lambda, b.eps, step});
  }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& a, const Cand& b) { return a.id < b.id; });

  // Union coincident endpoints (within tol): multiplicity = cluster size.
  std::vector<int> parent(cands.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x)
      x = parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (std::size_t i = 0; i < cands.size(); ++i)
    for (std::size_t j = i + 1; j < cands.size(); ++j)
      if (std::abs(cands[i].lam - cands[j].lam) < tol) {
        const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }

  std::vector<ResonanceEstimate> out;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (find(static_cast<int>(i)) != static_cast<int>(i)) continue;
    int mult = 0;
    double err = 0;
    for (std::size_t j = 0; j < cands.size(); ++j)
      if (find(static_cast<int>(j)) == static_cast<int>(i)) {
        ++mult;
        err = std::max(err, cands[j].step);
      }
    ResonanceEstimate e;
    e.lambda = cands[i].lam;
    e.multiplicity = mult;
    e.method = Method::CAP;
    e.epsilon = cands[i].eps;
    e.error_estimate = err;
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

}  // namespace viscap
