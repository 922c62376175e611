// pfl — phase-field interface laboratory, command-line front end.
//
//   pfl run    --config cfg.json [--out DIR] [--epsilon E] [--assert]
//   pfl sweep  --config cfg.json [--out DIR] [--epsilon E ...] [--assert]
//   pfl report [--out DIR] [run-dir ...] [--assert]
//
// Exit codes: 0 success, 1 assertion failure (--assert), 2 configuration
// error (bad JSON, schema violation, validation error, bad usage),
// 3 runtime failure (solver breakdown, I/O error).
//
// stdout carries exactly one JSON document per invocation (the run summary
// or the sweep report); progress and validation messages go to stderr.
// Summaries contain no timestamps, so reruns are bit-identical.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <vector>

#include "pfl/report.hpp"
#include "pfl/runner.hpp"

namespace {

std::string eps_tag(double eps) {
  std::ostringstream o;
  o << "eps_" << eps;
  return o.str();
}

// Print warnings always; on errors print all of them and return false.
bool gate_validation(const pfl::Validation& v) {
  for (const auto& w : v.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& e : v.errors) std::cerr << "error: " << e << "\n";
  return v.ok();
}

void print_assertions(const pfl::RunResult& r) {
  for (const auto& a : r.assertions)
    std::cerr << (a.pass ? "[PASS] " : "[FAIL] ") << a.name << ": " << a.measured
              << " " << a.relation << " " << a.bound << "\n";
}

int cmd_run(const std::string& config_path, std::string out,
            const std::vector<double>& eps_override, bool assert_flag) {
  pfl::ScenarioConfig cfg = pfl::load_config(config_path);
  if (!eps_override.empty()) cfg.epsilons = eps_override;
  if (cfg.epsilons.size() != 1) {
    std::cerr << "error: run needs exactly one epsilon (config lists "
              << cfg.epsilons.size() << "); pass --epsilon\n";
    return 2;
  }
  if (!gate_validation(pfl::validate(cfg))) return 2;
  const double eps = cfg.epsilons[0];
  if (out.empty())
    out = cfg.output_dir + "/" + pfl::kind_name(cfg.kind) + "_" + eps_tag(eps);
  const pfl::RunResult r = pfl::run_scenario(cfg, eps, out);
  std::cout << pfl::summary_text(r.summary) << "\n";
  print_assertions(r);
  if (r.status == 3) {
    std::cerr << "runtime failure: " << r.message << "\n";
    return 3;
  }
  std::cerr << "run finished: stop=" << r.stop_reason << " t_end=" << r.t_end
            << " steps=" << r.steps << " artifacts=" << out << "\n";
  if (assert_flag)
    for (const auto& a : r.assertions)
      if (!a.pass) return 1;
  return 0;
}

int cmd_sweep(const std::string& config_path, std::string out,
              const std::vector<double>& eps_override, bool assert_flag) {
  pfl::ScenarioConfig cfg = pfl::load_config(config_path);
  if (!eps_override.empty()) cfg.epsilons = eps_override;
  if (!gate_validation(pfl::validate(cfg))) return 2;
  if (!gate_validation(pfl::validate_sweep(cfg))) return 2;
  if (out.empty()) out = cfg.output_dir;

  std::vector<std::string> dirs;
  for (double eps : cfg.epsilons) {
    const std::string dir = out + "/" + eps_tag(eps);
    std::cerr << "sweep: eps=" << eps << " -> " << dir << "\n";
    const pfl::RunResult r = pfl::run_scenario(cfg, eps, dir);
    print_assertions(r);
    if (r.status == 3) {
      std::cerr << "runtime failure at eps=" << eps << ": " << r.message << "\n";
      return 3;
    }
    std::cerr << "  stop=" << r.stop_reason << " t_end=" << r.t_end
              << " steps=" << r.steps << "\n";
    dirs.push_back(dir);
  }
  const pfl::SweepReport rep = pfl::report_from_dirs(dirs);
  pfl::write_report(rep, out);
  std::cout << rep.json.dump(2) << "\n";
  std::cerr << "sweep verdict: " << (rep.pass ? "pass" : "fail") << "\n";
  if (assert_flag && !rep.pass) return 1;
  return 0;
}

int cmd_report(std::string out, std::vector<std::string> dirs, bool assert_flag) {
  if (dirs.empty()) {
    if (out.empty()) {
      std::cerr << "error: report needs run directories or --out to scan\n";
      return 2;
    }
    std::vector<std::string> found;
    for (const auto& e : std::filesystem::directory_iterator(out))
      if (e.is_directory() && std::filesystem::exists(e.path() / "summary.json"))
        found.push_back(e.path().string());
    std::sort(found.begin(), found.end());
    dirs = std::move(found);
    if (dirs.empty()) {
      std::cerr << "error: no run directories with summary.json under " << out
                << "\n";
      return 2;
    }
  }
  const pfl::SweepReport rep = pfl::report_from_dirs(dirs);
  pfl::write_report(rep, out.empty() ? std::string(".") : out);
  std::cout << rep.json.dump(2) << "\n";
  std::cerr << "report verdict: " << (rep.pass ? "pass" : "fail") << "\n";
  if (assert_flag && !rep.pass) return 1;
  return 0;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phase-field interface laboratory"};
  app.require_subcommand(1);

  std::string config, out;
  std::vector<double> eps_override;
  std::vector<std::string> report_dirs;
  bool assert_flag = false;

  CLI::App* run = app.add_subcommand("run", "execute one scenario");
  run->add_option("--config", config, "scenario config (JSON)")->required();
  run->add_option("--out", out, "artifact directory");
  run->add_option("--epsilon", eps_override, "override interface width");
  run->add_flag("--assert", assert_flag, "exit 1 if any assertion fails");

  CLI::App* sweep = app.add_subcommand("sweep", "run a decreasing-eps sweep");
  sweep->add_option("--config", config, "scenario config (JSON)")->required();
  sweep->add_option("--out", out, "artifact directory");
  sweep->add_option("--epsilon", eps_override, "override the epsilon list");
  sweep->add_flag("--assert", assert_flag, "exit 1 unless the verdict passes");

  CLI::App* report = app.add_subcommand("report", "merge runs into a report");
  report->add_option("--out", out, "report directory (scanned if no dirs given)");
  report->add_option("dirs", report_dirs, "run directories to merge");
  report->add_flag("--assert", assert_flag, "exit 1 unless the verdict passes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (run->parsed())
    return guarded([&] { return cmd_run(config, out, eps_override, assert_flag); });
  if (sweep->parsed())
    return guarded(
        [&] { return cmd_sweep(config, out, eps_override, assert_flag); });
  return guarded([&] { return cmd_report(out, report_dirs, assert_flag); });
}
