#pragma once

// Sweep reporting: merge per-run summaries across a decreasing sequence of
// interface widths, fit log-log decay slopes with 95% confidence intervals,
// and emit a convergence verdict.
//
// Conventions:
//   * runs are ordered by eps, largest first;
//   * a fitted slope p is the exponent in value ~ C * eps^p, so p > 0 means
//     the quantity decays as eps -> 0;
//   * the verdict passes iff every run finished cleanly with all of its
//     structural assertions green and every metric monitored for the
//     scenario kind is strictly decreasing in eps with a positive slope.

#include <string>
#include <vector>

#include <json.hpp>

namespace pfl {

struct TrendFit {
  std::vector<double> values;     // one per eps, largest eps first
  double slope = 0;               // d log(value) / d log(eps)
  double intercept = 0;           // log C
  double ci_halfwidth = 0;        // 95% half-width on the slope (t-based)
  bool strictly_decreasing = false;
  bool finite = false;            // all values finite and positive
  int n = 0;
};

// 97.5% two-sided Student t quantile for the given degrees of freedom.
double t_quantile_975(int df);

// Fit log(value) against log(eps) by least squares.
TrendFit fit_trend(const std::vector<double>& eps, const std::vector<double>& value);

struct SweepReport {
  std::string scenario;
  std::vector<double> epsilons;
  bool runs_ok = false;  // all runs status 0 with green assertions
  bool pass = false;
  nlohmann::ordered_json json;
};

// Metrics whose decay gates the verdict for a given scenario kind name.
std::vector<std::string> monitored_metrics(const std::string& scenario);

// Read one run summary, checking the schema tag.
nlohmann::ordered_json load_summary(const std::string& path);

// Build the report from already-parsed run summaries.
SweepReport build_report(const std::vector<nlohmann::ordered_json>& summaries);

// Convenience: load <dir>/summary.json from each run directory.
SweepReport report_from_dirs(const std::vector<std::string>& run_dirs);

// Write report.json and metrics.csv (rows = eps, columns = metrics).
void write_report(const SweepReport& rep, const std::string& out_dir);

}  // namespace pfl
