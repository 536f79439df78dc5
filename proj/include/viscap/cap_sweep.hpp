#pragma once

#include <string>
#include <utility>

#include "viscap/assembly.hpp"
#include "viscap/potentials.hpp"
#include "viscap/resonance.hpp"
#include "viscap/types.hpp"

namespace viscap {

struct SweepConfig {
  Potential potential;
  double L = 12.0;           // base grid; grown per-eps when grow_grid is set
  std::size_t N = 512;
  RectangleOmega omega;
  double eps_start = 1e-1;
  double eps_ratio = 0.31622776601683794;  // 10^{-1/2}
  int eps_count = 7;
  double track_radius = 0.1;  // max per-step jump when matching tracks
  double cauchy_tol = 1e-2;
  // CAP eigenfunctions spread as eps shrinks (turning point of the quadratic
  // absorber scales like eps^{-1/2}); with grow_grid the box is enlarged per
  // eps so the absorbed tail fits, never below the configured (L, N).
  bool grow_grid = true;
};

struct TrackPoint {
  double eps = 0;
  cplx lambda;
};

struct Track {
  int id = 0;
  std::vector<TrackPoint> points;
};

struct SweepResult {
  std::vector<double> schedule;  // strictly decreasing
  std::vector<Track> tracks;
  // (eps, lambda) records of tracks that entered after the first step or left
  // before the last one.
  std::vector<TrackPoint> orphans;
  std::vector<std::pair<double, std::string>> failures;  // per-eps solver failures
  std::vector<cplx> final_lambdas;  // filtered eigenvalues at the last eps
};

// Grid actually used at a given eps under the growth policy.
std::pair<double, std::size_t> grid_for_eps(const SweepConfig& cfg, double eps);

SweepResult run_sweep(const SweepConfig& cfg);

// Greedy nearest-neighbor pairing in increasing distance order; pairs farther
// than radius stay unmatched. Returns (prev index, next index) pairs.
std::vector<std::pair<std::size_t, std::size_t>> match_tracks(
    const std::vector<cplx>& prev, const std::vector<cplx>& next, double radius);

std::vector<ResonanceEstimate> converged_estimates(const SweepResult& r,
                                                   double tol);

}  // namespace viscap
