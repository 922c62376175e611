// End-to-end exit-code and stdout-contract checks on the installed CLI.
// The binary path arrives via the PFL_CLI_PATH compile definition.
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::ordered_json;

namespace {

struct TmpDir {
  std::filesystem::path p;
  TmpDir() {
    p = std::filesystem::temp_directory_path() /
        ("pfl-cli-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(p);
  }
  ~TmpDir() { std::filesystem::remove_all(p); }
};

int run_cli(const std::string& args, const std::filesystem::path& stdout_file,
            const std::filesystem::path& stderr_file) {
  std::ostringstream cmd;
  cmd << PFL_CLI_PATH << " " << args << " > " << stdout_file << " 2> "
      << stderr_file;
  const int rc = std::system(cmd.str().c_str());
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

void write_file(const std::filesystem::path& p, const std::string& body) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p);
  os << body;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

const char* kTinyConfig = R"({
  "scenario": "standing-profile",
  "dim": 1,
  "extent": [1.0],
  "cells": [200],
  "epsilon": 0.04,
  "dt_rule": {"kind": "cfl", "gamma_h": 1e9, "gamma_eps": 0.02},
  "scheme": "semi-implicit",
  "horizon": 0.002,
  "output_interval": 0.001,
  "initial": {"front_pos": 0.5, "plus_side": 1},
  "seed": 1
})";

// Minimal but schema-valid run summary for feeding `report` synthetic trends.
std::string synth_summary(double eps, double disc) {
  ordered_json s;
  s["schema"] = "pfl-run-1";
  s["scenario"] = "standing-profile";
  s["eps"] = eps;
  s["status"] = 0;
  s["stop_reason"] = "horizon";
  s["final"] = {{"disc_l1", disc}, {"pairing_max", disc}};
  s["battery"] = {{"brakke_slack", ordered_json::array()},
                  {"l2flow", ordered_json::array()},
                  {"bulk_residual", ordered_json::array()}};
  s["assertions"] = ordered_json::array();
  return s.dump(2);
}

}  // namespace

TEST_CASE("cli: usage and config errors exit 2, missing file exits 3") {
  TmpDir t;
  const auto out = t.p / "stdout.txt", err = t.p / "stderr.txt";
  CHECK(run_cli("", out, err) == 2);                       // no subcommand
  CHECK(run_cli("frobnicate", out, err) == 2);             // unknown verb
  CHECK(run_cli("run", out, err) == 2);                    // --config required
  CHECK(run_cli("run --config " + (t.p / "nope.json").string(), out, err) == 3);

  write_file(t.p / "bad.json", "{ not json");
  CHECK(run_cli("run --config " + (t.p / "bad.json").string(), out, err) == 2);

  // schema violation: unknown key
  write_file(t.p / "unk.json", R"({"scenario":"standing-profile","frob":1})");
  CHECK(run_cli("run --config " + (t.p / "unk.json").string(), out, err) == 2);

  // validation failure: grid far too coarse for eps
  std::string coarse(kTinyConfig);
  coarse.replace(coarse.find("[200]"), 5, "[10]");
  write_file(t.p / "coarse.json", coarse);
  CHECK(run_cli("run --config " + (t.p / "coarse.json").string(), out, err) == 2);
  CHECK(slurp(err).find("error:") != std::string::npos);

  // run wants exactly one epsilon
  write_file(t.p / "tiny.json", kTinyConfig);
  CHECK(run_cli("run --config " + (t.p / "tiny.json").string() +
                    " --epsilon 0.04 --epsilon 0.02",
                out, err) == 2);
}

TEST_CASE("cli: a good run exits 0, emits one JSON summary, reruns match") {
  TmpDir t;
  const auto out = t.p / "stdout.txt", err = t.p / "stderr.txt";
  write_file(t.p / "tiny.json", kTinyConfig);
  const std::string base = "run --config " + (t.p / "tiny.json").string();

  CHECK(run_cli(base + " --out " + (t.p / "a").string() + " --assert", out,
                err) == 0);
  const std::string text_a = slurp(out);
  const ordered_json j = ordered_json::parse(text_a);  // stdout is one document
  CHECK(j["schema"] == "pfl-run-1");
  CHECK(j["status"] == 0);
  CHECK(std::filesystem::exists(t.p / "a" / "summary.json"));
  CHECK(std::filesystem::exists(t.p / "a" / "record.csv"));
  // stderr carries progress, stdout does not
  CHECK(slurp(err).find("run finished") != std::string::npos);
  CHECK(text_a.find("run finished") == std::string::npos);

  CHECK(run_cli(base + " --out " + (t.p / "b").string(), out, err) == 0);
  CHECK(slurp(out) == text_a);  // byte-identical rerun
  CHECK(slurp(t.p / "a" / "summary.json") == slurp(t.p / "b" / "summary.json"));
}

TEST_CASE("cli: report merges directories; --assert gates on the verdict") {
  TmpDir t;
  const auto out = t.p / "stdout.txt", err = t.p / "stderr.txt";
  // decaying trend -> verdict passes
  write_file(t.p / "g1" / "summary.json", synth_summary(0.08, 8e-3));
  write_file(t.p / "g2" / "summary.json", synth_summary(0.04, 4e-3));
  write_file(t.p / "g3" / "summary.json", synth_summary(0.02, 2e-3));
  const std::string good_dirs = (t.p / "g1").string() + " " +
                                (t.p / "g2").string() + " " +
                                (t.p / "g3").string();
  CHECK(run_cli("report --out " + (t.p / "grep").string() + " " + good_dirs +
                    " --assert",
                out, err) == 0);
  const ordered_json rep = ordered_json::parse(slurp(out));
  CHECK(rep["schema"] == "pfl-report-1");
  CHECK(rep["pass"] == true);
  CHECK(std::filesystem::exists(t.p / "grep" / "report.json"));
  CHECK(std::filesystem::exists(t.p / "grep" / "metrics.csv"));

  // non-monotone gated metric -> verdict fails -> --assert exits 1
  write_file(t.p / "b1" / "summary.json", synth_summary(0.08, 8e-3));
  write_file(t.p / "b2" / "summary.json", synth_summary(0.04, 9e-3));
  const std::string bad_dirs =
      (t.p / "b1").string() + " " + (t.p / "b2").string();
  CHECK(run_cli("report --out " + (t.p / "brep").string() + " " + bad_dirs,
                out, err) == 0);  // without --assert still exits 0
  CHECK(run_cli("report --out " + (t.p / "brep").string() + " " + bad_dirs +
                    " --assert",
                out, err) == 1);

  // report with nothing to scan
  std::filesystem::create_directories(t.p / "empty");
  CHECK(run_cli("report --out " + (t.p / "empty").string(), out, err) == 2);
}
