#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "viscap/cap_sweep.hpp"
#include "viscap/resonance.hpp"
#include "viscap/types.hpp"

namespace viscap {

// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 acceptance-check failure (compare only).
inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 1;
inline constexpr int exit_numerical = 2;
inline constexpr int exit_compare_failed = 3;

struct CompareEntry {
  cplx lambda_bs;
  int multiplicity = 0;
  int cap_count = 0;           // final-eps CAP eigenvalues inside B(lambda, delta)
  bool pass = false;           // cap_count == multiplicity
  double best_match_dist = 0;  // nearest CAP eigenvalue, inf when none
};

struct CompareReport {
  std::vector<CompareEntry> entries;
  double max_pair_dist = 0;  // max over matched pairs of |lambda_CAP - lambda_BS|
  bool pass = true;
};

// Count cross-check: for each oracle resonance, the number of final-eps
// CAP eigenvalues in the delta-disc must equal its BS multiplicity. delta must
// stay below half the minimum pairwise oracle separation.
CompareReport compare_report(const SweepResult& sweep,
                             const std::vector<ResonanceEstimate>& oracle,
                             double delta);

nlohmann::ordered_json compare_report_to_json(const CompareReport& r);

// Parse config, dispatch the command, write artifacts into out_dir, map errors
// to exit codes (writing error.json). command overrides the config's own
// "command" field when non-empty; they must agree when both are present.
int run(const std::string& config_path, const std::string& out_dir,
        const std::string& command = "");

}  // namespace viscap
