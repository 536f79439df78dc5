#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "viscap/cli.hpp"

using namespace viscap;
namespace fs = std::filesystem;

namespace {

const cplx kLamStar(std::sqrt(31.0) / 2.0, -0.5);

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "viscap_cli_tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.json";
  std::ofstream out(p);
  out << text;
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json load_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

const std::string kPotentialOmega = R"(
  "potential": {"kind": "sech2", "params": {"V0": 8.0}},
  "omega": {"a_lo": 2.0, "a_hi": 3.5, "gamma_lo": 0.8, "b_hi": 0.5}
)";

}  // namespace

TEST_CASE("run: malformed config maps to exit 1 with error.json") {
  const fs::path d = fresh_dir("malformed");
  const std::string cfg = write_config(d, "{ this is not json");
  const fs::path out = d / "out";
  CHECK(run(cfg, out.string(), "") == exit_config);
  CHECK(fs::exists(out / "error.json"));
  CHECK_FALSE(fs::exists(out / "sweep.csv"));
  CHECK(load_json(out / "error.json").at("error") == "config");
}

TEST_CASE("run: command flag must agree with the config") {
  const fs::path d = fresh_dir("mismatch");
  const std::string cfg = write_config(d, R"({"command": "sweep"})");
  const fs::path out = d / "out";
  CHECK(run(cfg, out.string(), "davies") == exit_config);
  CHECK(fs::exists(out / "error.json"));
}

TEST_CASE("run: davies writes the resolvent table") {
  const fs::path d = fresh_dir("davies");
  const std::string cfg = write_config(d, R"({
    "command": "davies",
    "davies": {
      "N": 256,
      "eps_weighted": [1e-1, 1e-2],
      "eps_unweighted": [4e-2]
    }
  })");
  const fs::path out = d / "out";
  REQUIRE(run(cfg, out.string(), "") == exit_ok);
  const std::string csv = slurp(out / "davies_sweep.csv");
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line ==
        "epsilon,re_z,im_z,norm,weighted_flag,gamma_weight");
  std::vector<std::string> rows;
  while (std::getline(lines, line))
    if (!line.empty()) rows.push_back(line);
  REQUIRE(rows.size() == 3);
  // Two weighted rows (flag 1, carrying lambda), then the unweighted one.
  CHECK(rows[0].find(",1,1") != std::string::npos);
  CHECK(rows[1].find(",1,1") != std::string::npos);
  CHECK(rows[2].find(",0,0") != std::string::npos);
}

TEST_CASE("run: davies on the Davies eigenvalue itself is a numerical error") {
  const fs::path d = fresh_dir("davies_singular");
  std::ostringstream cfg;
  cfg << std::setprecision(17);  // z must hit the eigenvalue, not a 6-digit
                                 // neighbor of it
  cfg << R"({"command": "davies", "davies": {
        "N": 512, "L_unweighted": 12.0,
        "eps_weighted": [],
        "eps_unweighted": [1.0],
        "z": {"re": )"
      << std::cos(-std::numbers::pi / 4.0) << R"(, "im": )"
      << std::sin(-std::numbers::pi / 4.0) << "}}}";
  const std::string cfgp = write_config(d, cfg.str());
  const fs::path out = d / "out";
  CHECK(run(cfgp, out.string(), "") == exit_numerical);
  CHECK(load_json(out / "error.json").at("error") == "numerical");
  CHECK_FALSE(fs::exists(out / "davies_sweep.csv"));
}

TEST_CASE("run: symbol scan is deterministic") {
  const fs::path d = fresh_dir("symbol");
  const std::string cfg = write_config(d, R"({
    "command": "symbol",
    "symbol": {"n": 40}
  })");
  const fs::path out1 = d / "out1";
  const fs::path out2 = d / "out2";
  REQUIRE(run(cfg, out1.string(), "") == exit_ok);
  REQUIRE(run(cfg, out2.string(), "") == exit_ok);
  const std::string a = slurp(out1 / "symbol_scan.csv");
  REQUIRE_FALSE(a.empty());
  CHECK(a == slurp(out2 / "symbol_scan.csv"));
  CHECK(a.rfind("xi,xistar,re_q,im_q,theta_re,theta_im,h", 0) == 0);
}

TEST_CASE("run: oracle locates the sech^2 resonance") {
  const fs::path d = fresh_dir("oracle");
  const std::string cfg = write_config(d, std::string(R"({
    "command": "oracle",)") + kPotentialOmega + R"(,
    "oracle": {"N": 400, "scan_nx": 4, "scan_ny": 3}
  })");
  const fs::path out = d / "out";
  REQUIRE(run(cfg, out.string(), "") == exit_ok);
  const nlohmann::json oj = load_json(out / "oracle.json");
  CHECK(oj.at("method") == "BS");
  REQUIRE(oj.at("resonances").size() == 1);
  const auto& r = oj.at("resonances").at(0);
  CHECK(r.at("multiplicity") == 1);
  const cplx lam(r.at("lambda").at("re").get<double>(),
                 r.at("lambda").at("im").get<double>());
  CHECK(std::abs(lam - kLamStar) < 1e-2);
  CHECK(r.at("residual").get<double>() < 1e-6);
  CHECK(fs::exists(out / "determinant_scan.csv"));
}

TEST_CASE("run: compare pipeline agrees at delta = 0.05") {
  const fs::path d = fresh_dir("compare_pass");
  const std::string cfg = write_config(d, std::string(R"({
    "command": "compare",)") + kPotentialOmega + R"(,
    "sweep": {"eps_count": 3},
    "oracle": {"N": 300, "scan_nx": 3, "scan_ny": 3},
    "compare": {"delta": 0.05}
  })");
  const fs::path out = d / "out";
  REQUIRE(run(cfg, out.string(), "") == exit_ok);
  const nlohmann::json rj = load_json(out / "compare_report.json");
  CHECK(rj.at("pass") == true);
  CHECK(rj.at("delta") == 0.05);
  REQUIRE(rj.at("entries").size() == 1);
  CHECK(rj.at("entries").at(0).at("cap_count") == 1);
  CHECK(rj.at("entries").at(0).at("multiplicity") == 1);
  CHECK(rj.at("entries").at(0).at("best_match_dist").get<double>() < 0.05);
  CHECK(fs::exists(out / "sweep.csv"));
  CHECK(fs::exists(out / "resonances.json"));
  CHECK(fs::exists(out / "margin_report.json"));
  CHECK(fs::exists(out / "oracle.json"));
}

TEST_CASE("run: compare with a hopeless delta exits 3") {
  const fs::path d = fresh_dir("compare_fail");
  const std::string cfg = write_config(d, std::string(R"({
    "command": "compare",)") + kPotentialOmega + R"(,
    "sweep": {"eps_count": 2},
    "oracle": {"N": 300, "scan_nx": 3, "scan_ny": 3},
    "compare": {"delta": 1e-6}
  })");
  const fs::path out = d / "out";
  CHECK(run(cfg, out.string(), "") == exit_compare_failed);
  const nlohmann::json rj = load_json(out / "compare_report.json");
  CHECK(rj.at("pass") == false);
  CHECK(rj.at("entries").at(0).at("cap_count") == 0);
  CHECK(fs::exists(out / "error.json"));
}

TEST_CASE("compare_report: counting rules and the delta guard") {
  SweepResult sweep;
  std::vector<ResonanceEstimate> oracle;

  // No oracle resonances: vacuously passing report.
  CHECK(compare_report(sweep, oracle, 0.05).pass);
  CHECK(compare_report(sweep, oracle, 0.05).entries.empty());

  ResonanceEstimate a;
  a.lambda = cplx(2.0, -0.5);
  a.multiplicity = 1;
  a.method = Method::BS;
  ResonanceEstimate b = a;
  b.lambda = cplx(2.08, -0.5);
  oracle = {a, b};
  CHECK_THROWS_AS(compare_report(sweep, oracle, 0.05), config_error);
  CHECK_THROWS_AS(compare_report(sweep, oracle, 0.0), config_error);

  oracle = {a};
  sweep.final_lambdas = {cplx(2.001, -0.5)};
  const CompareReport hit = compare_report(sweep, oracle, 0.05);
  CHECK(hit.pass);
  CHECK(hit.entries[0].cap_count == 1);
  CHECK(hit.entries[0].best_match_dist == doctest::Approx(1e-3));
  CHECK(hit.max_pair_dist == doctest::Approx(1e-3));

  const CompareReport miss = compare_report(sweep, oracle, 1e-6);
  CHECK_FALSE(miss.pass);
  CHECK(miss.entries[0].cap_count == 0);

  // No CAP eigenvalues at all: infinite distance serialized as -1.
  sweep.final_lambdas.clear();
  const CompareReport none = compare_report(sweep, oracle, 0.05);
  CHECK_FALSE(none.pass);
  const nlohmann::ordered_json j = compare_report_to_json(none);
  CHECK(j.at("entries").at(0).at("best_match_dist") == -1.0);
}
