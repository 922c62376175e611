#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "pfl/report.hpp"
#include "pfl/runner.hpp"

using namespace pfl;
using nlohmann::ordered_json;

namespace {

struct TmpDir {
  std::filesystem::path p;
  TmpDir() {
    p = std::filesystem::temp_directory_path() /
        ("pfl-run-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(p);
  }
  ~TmpDir() { std::filesystem::remove_all(p); }
};

ScenarioConfig tiny_standing() {
  return parse_config(ordered_json::parse(R"({
    "scenario": "standing-profile",
    "dim": 1,
    "extent": [1.0],
    "cells": [200],
    "epsilon": 0.04,
    "dt_rule": {"kind": "cfl", "gamma_h": 1e9, "gamma_eps": 0.02},
    "scheme": "semi-implicit",
    "horizon": 0.004,
    "output_interval": 0.001,
    "initial": {"front_pos": 0.5, "plus_side": 1},
    "seed": 1
  })"));
}

int count_lines(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) ++n;
  return n;
}

}  // namespace

TEST_CASE("run_scenario produces rows, assertions, and artifacts") {
  TmpDir tmp;
  const ScenarioConfig cfg = tiny_standing();
  const RunResult r = run_scenario(cfg, 0.04, (tmp.p / "out").string());
  CHECK(r.status == 0);
  CHECK(r.stop_reason == "horizon");
  CHECK(r.t_end == doctest::Approx(0.004).epsilon(1e-9));
  REQUIRE(r.rows.size() >= 5);  // t=0 plus 4 samples
  CHECK(r.rows.front().t == 0.0);
  CHECK(r.rows.back().t == doctest::Approx(0.004).epsilon(1e-9));
  CHECK(r.energy0 > 0.9);
  for (const Assertion& a : r.assertions) CHECK(a.pass);
  CHECK(std::filesystem::exists(tmp.p / "out" / "record.csv"));
  CHECK(std::filesystem::exists(tmp.p / "out" / "summary.json"));
  CHECK(std::filesystem::exists(tmp.p / "out" / "snapshot_initial.bin"));
  CHECK(std::filesystem::exists(tmp.p / "out" / "snapshot_final.bin"));
  CHECK(count_lines(tmp.p / "out" / "record.csv") ==
        static_cast<int>(r.rows.size()) + 1);
  // summary carries the schema tag and echoes the config
  CHECK(r.summary["schema"] == "pfl-run-1");
  CHECK(r.summary["config"]["scenario"] == "standing-profile");
}

TEST_CASE("steps land exactly on sample times") {
  const ScenarioConfig cfg = tiny_standing();
  const RunResult r = run_scenario(cfg, 0.04, "");
  for (std::size_t k = 0; k < r.rows.size(); ++k)
    CHECK(r.rows[k].t == doctest::Approx(0.001 * k).epsilon(1e-10));
}

TEST_CASE("summaries are deterministic across in-process reruns") {
  const ScenarioConfig cfg = tiny_standing();
  const RunResult a = run_scenario(cfg, 0.04, "");
  const RunResult b = run_scenario(cfg, 0.04, "");
  CHECK(summary_text(a.summary) == summary_text(b.summary));
}

TEST_CASE("invalid config makes run_scenario throw before stepping") {
  ScenarioConfig cfg = tiny_standing();
  cfg.horizon = -1.0;
  CHECK_THROWS_AS((void)run_scenario(cfg, 0.04, ""), std::invalid_argument);
}

TEST_CASE("csv row writer round-trips through the column registry") {
  TmpDir tmp;
  std::vector<DiagRow> rows(2);
  rows[0].t = 0.0;
  rows[0].energy = 1.5;
  rows[1].t = 0.5;
  rows[1].energy = 1.25;
  rows[1].radius_est = std::numeric_limits<double>::quiet_NaN();
  const std::string path = (tmp.p / "rows.csv").string();
  write_rows_csv(path, rows);
  std::ifstream is(path);
  std::string header, l0, l1;
  std::getline(is, header);
  std::getline(is, l0);
  std::getline(is, l1);
  CHECK(header.rfind("t,dt,steps", 0) == 0);
  CHECK(l1.rfind("0.5,", 0) == 0);
  // NaN becomes an empty cell, so two adjacent commas appear
  CHECK(l1.find(",,") != std::string::npos);
  const auto& cols = DiagRow::columns();
  CHECK(std::count(header.begin(), header.end(), ',') ==
        static_cast<long>(cols.size()) - 1);
}

TEST_CASE("make_assertion relations") {
  CHECK(make_assertion("a", 1.0, "<=", 2.0).pass);
  CHECK(!make_assertion("a", 3.0, "<=", 2.0).pass);
  CHECK(make_assertion("a", 3.0, ">=", 2.0).pass);
  CHECK(!make_assertion("a", std::numeric_limits<double>::quiet_NaN(), "<=", 2.0).pass);
  CHECK_THROWS_AS((void)make_assertion("a", 1.0, "==", 1.0), std::invalid_argument);
}

TEST_CASE("trend fit recovers exact power laws with tight intervals") {
  const std::vector<double> eps = {0.08, 0.04, 0.02};
  std::vector<double> y;
  for (double e : eps) y.push_back(3.0 * e * e);  // slope 2
  const TrendFit f = fit_trend(eps, y);
  CHECK(f.finite);
  CHECK(f.strictly_decreasing);
  CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f.ci_halfwidth == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

  // non-monotone data is flagged
  const TrendFit g = fit_trend(eps, {1.0, 2.0, 0.5});
  CHECK(!g.strictly_decreasing);

  // nonpositive values cannot be fitted on log axes
  const TrendFit h = fit_trend(eps, {1.0, 0.0, -1.0});
  CHECK(!h.finite);
  CHECK(std::isnan(h.slope));
}

TEST_CASE("t quantiles: table values and large-df limit") {
  CHECK(t_quantile_975(1) == doctest::Approx(12.706).epsilon(1e-6));
  CHECK(t_quantile_975(2) == doctest::Approx(4.303).epsilon(1e-6));
  CHECK(t_quantile_975(10) == doctest::Approx(2.228).epsilon(1e-6));
  CHECK(t_quantile_975(1000) == doctest::Approx(1.96).epsilon(1e-6));
}

TEST_CASE("sweep report: verdict logic on synthetic summaries") {
  auto summary = [](double eps, double disc, double pairing, double radius_err) {
    ordered_json s;
    s["schema"] = "pfl-run-1";
    s["scenario"] = "circle-mcf";
    s["eps"] = eps;
    s["status"] = 0;
    s["stop_reason"] = "horizon";
    s["assertions"] = ordered_json::array();
    ordered_json fin;
    fin["disc_l1"] = disc;
    fin["pairing_max"] = pairing;
    fin["radius_err_rel"] = radius_err;
    s["final"] = fin;
    s["battery"] = {{"brakke_slack", {0.0}},
                    {"l2flow", {1e-3}},
                    {"bulk_residual", ordered_json::array()}};
    return s;
  };
  std::vector<ordered_json> good = {summary(0.08, 8e-3, 4e-2, 2e-2),
                                    summary(0.04, 4e-3, 2e-2, 1e-2),
                                    summary(0.02, 2e-3, 1e-2, 5e-3)};
  const SweepReport rep = build_report(good);
  CHECK(rep.pass);
  CHECK(rep.scenario == "circle-mcf");
  CHECK(rep.json["metrics"]["disc_l1"]["gates_verdict"] == true);
  CHECK(rep.json["metrics"]["disc_l1"]["pass"] == true);
  CHECK(rep.json["metrics"]["interface_err"]["pass"] == true);

  // a non-decreasing gated metric fails the verdict
  std::vector<ordered_json> bad = good;
  bad[2]["final"]["disc_l1"] = 9e-3;
  CHECK(!build_report(bad).pass);

  // a failed run fails the verdict even with clean trends
  std::vector<ordered_json> failed = good;
  failed[1]["status"] = 3;
  CHECK(!build_report(failed).pass);

  // mixed scenarios are rejected
  std::vector<ordered_json> mixed = good;
  mixed[1]["scenario"] = "ms-undercooling";
  CHECK_THROWS_AS((void)build_report(mixed), std::runtime_error);
}

TEST_CASE("report round-trips through run directories on disk") {
  TmpDir tmp;
  // three real (tiny) runs at a decreasing eps sequence
  ordered_json j = ordered_json::parse(R"({
    "scenario": "standing-profile",
    "dim": 1,
    "extent": [1.0],
    "cells_rule": {"h_over_eps": 0.25},
    "epsilon": [0.08, 0.04, 0.02],
    "dt_rule": {"kind": "cfl", "gamma_h": 1e9, "gamma_eps": 0.01},
    "scheme": "semi-implicit",
    "horizon": 0.002,
    "output_interval": 0.001,
    "initial": {"front_pos": 0.5, "plus_side": 1},
    "seed": 1
  })");
  const ScenarioConfig cfg = parse_config(j);
  std::vector<std::string> dirs;
  for (double e : cfg.epsilons) {
    std::ostringstream os;
    os << (tmp.p / "eps_").string() << e;
    (void)run_scenario(cfg, e, os.str());
    dirs.push_back(os.str());
  }
  const SweepReport rep = report_from_dirs(dirs);
  CHECK(rep.epsilons.size() == 3);
  CHECK(rep.epsilons[0] == 0.08);
  CHECK(rep.runs_ok);
  write_report(rep, (tmp.p / "rep").string());
  CHECK(std::filesystem::exists(tmp.p / "rep" / "report.json"));
  CHECK(std::filesystem::exists(tmp.p / "rep" / "metrics.csv"));
  const ordered_json loaded = load_summary(dirs[0] + "/summary.json");
  CHECK(loaded["eps"] == 0.08);
  CHECK_THROWS_AS((void)load_summary((tmp.p / "rep" / "report.json").string()),
                  std::runtime_error);
}
