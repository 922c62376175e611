#include "pfl/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace pfl {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double json_num(const nlohmann::ordered_json& j) {
  return j.is_number() ? j.get<double>() : kNaN;
}

double array_max(const nlohmann::ordered_json& j) {
  if (!j.is_array() || j.empty()) return kNaN;
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& v : j) {
    if (!v.is_number()) return kNaN;
    m = std::max(m, v.get<double>());
  }
  return m;
}

// Pull one named metric out of a run summary.
double metric_value(const nlohmann::ordered_json& s, const std::string& name) {
  const auto fin = s.find("final");
  if (name == "bulk_residual" || name == "l2flow_max") {
    const auto bat = s.find("battery");
    if (bat == s.end()) return kNaN;
    const char* key = name == "bulk_residual" ? "bulk_residual" : "l2flow";
    if (!bat->contains(key)) return kNaN;
    return array_max((*bat)[key]);
  }
  if (fin == s.end()) return kNaN;
  const std::string key = name == "interface_err" ? "radius_err_rel" : name;
  if (!fin->contains(key)) return kNaN;
  return json_num((*fin)[key]);
}

const std::vector<std::string>& all_metrics() {
  static const std::vector<std::string> m = {
      "disc_l1",  "disc_rel",      "pairing_max", "interface_err",
      "identity_rel", "bulk_residual", "l2flow_max"};
  return m;
}

}  // namespace

double t_quantile_975(int df) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571,
                                 2.447,  2.365, 2.306, 2.262, 2.228};
  if (df <= 0) return kNaN;
  if (df <= 10) return table[df - 1];
  if (df <= 15) return 2.131;
  if (df <= 20) return 2.086;
  if (df <= 30) return 2.042;
  return 1.960;
}

TrendFit fit_trend(const std::vector<double>& eps, const std::vector<double>& value) {
  TrendFit f;
  f.values = value;
  f.n = static_cast<int>(value.size());
  if (eps.size() != value.size() || f.n < 2) {
    f.slope = f.intercept = f.ci_halfwidth = kNaN;
    return f;
  }
  f.strictly_decreasing = true;
  f.finite = true;
  for (int i = 0; i < f.n; ++i) {
    if (!std::isfinite(value[i]) || value[i] <= 0) f.finite = false;
    if (i && !(value[i] < value[i - 1])) f.strictly_decreasing = false;
  }
  if (!f.finite) {
    f.slope = f.intercept = f.ci_halfwidth = kNaN;
    return f;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(f.n), ly(f.n);
  for (int i = 0; i < f.n; ++i) {
    lx[i] = std::log(eps[i]);
    ly[i] = std::log(value[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / f.n, my = sy / f.n;
  for (int i = 0; i < f.n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const int df = f.n - 2;
  if (df >= 1) {
    double sse = 0;
    for (int i = 0; i < f.n; ++i) {
      const double r = ly[i] - (f.intercept + f.slope * lx[i]);
      sse += r * r;
    }
    f.ci_halfwidth = t_quantile_975(df) * std::sqrt(sse / df / sxx);
  } else {
    f.ci_halfwidth = kNaN;
  }
  return f;
}

std::vector<std::string> monitored_metrics(const std::string& scenario) {
  if (scenario == "ms-undercooling") return {"disc_l1", "bulk_residual"};
  if (scenario == "grain-boundary") return {};
  std::vector<std::string> m = {"disc_l1", "pairing_max"};
  if (scenario == "circle-mcf" || scenario == "circle-forced" ||
      scenario == "drift-circle")
    m.push_back("interface_err");
  return m;
}

nlohmann::ordered_json load_summary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("report: cannot open " + path);
  nlohmann::ordered_json j = nlohmann::ordered_json::parse(is);
  if (!j.contains("schema") || j["schema"] != "pfl-run-1")
    throw std::runtime_error("report: " + path + " is not a pfl-run-1 summary");
  return j;
}

SweepReport build_report(const std::vector<nlohmann::ordered_json>& in) {
  if (in.size() < 2) throw std::runtime_error("report: need at least two runs");
  std::vector<nlohmann::ordered_json> summaries = in;
  std::sort(summaries.begin(), summaries.end(),
            [](const nlohmann::ordered_json& a, const nlohmann::ordered_json& b) {
              return a["eps"].get<double>() > b["eps"].get<double>();
            });

  SweepReport rep;
  rep.scenario = summaries.front()["scenario"].get<std::string>();
  rep.runs_ok = true;
  nlohmann::ordered_json jruns = nlohmann::ordered_json::array();
  for (const auto& s : summaries) {
    if (s["scenario"] != rep.scenario)
      throw std::runtime_error("report: mixed scenario kinds in sweep");
    rep.epsilons.push_back(s["eps"].get<double>());
    bool ok = s["status"].get<int>() == 0;
    for (const auto& a : s["assertions"]) ok = ok && a["pass"].get<bool>();
    rep.runs_ok = rep.runs_ok && ok;
    nlohmann::ordered_json jr;
    jr["eps"] = s["eps"];
    jr["status"] = s["status"];
    jr["stop_reason"] = s["stop_reason"];
    jr["assertions_pass"] = ok;
    jruns.push_back(jr);
  }

  const std::vector<std::string> gate = monitored_metrics(rep.scenario);
  bool trends_ok = true;
  nlohmann::ordered_json jmetrics;
  for (const std::string& name : all_metrics()) {
    std::vector<double> vals;
    for (const auto& s : summaries) vals.push_back(metric_value(s, name));
    if (std::all_of(vals.begin(), vals.end(),
                    [](double v) { return !std::isfinite(v); }))
      continue;  // metric not produced by this scenario
    const TrendFit f = fit_trend(rep.epsilons, vals);
    nlohmann::ordered_json jm;
    jm["values"] = f.values;
    jm["slope"] = f.slope;
    jm["ci95_halfwidth"] = f.ci_halfwidth;
    jm["strictly_decreasing"] = f.strictly_decreasing;
    const bool gated = std::find(gate.begin(), gate.end(), name) != gate.end();
    jm["gates_verdict"] = gated;
    if (gated) {
      const bool ok = f.finite && f.strictly_decreasing && f.slope > 0;
      jm["pass"] = ok;
      trends_ok = trends_ok && ok;
    }
    jmetrics[name] = std::move(jm);
  }

  rep.pass = rep.runs_ok && trends_ok;
  rep.json["schema"] = "pfl-report-1";
  rep.json["scenario"] = rep.scenario;
  rep.json["epsilons"] = rep.epsilons;
  rep.json["runs"] = jruns;
  rep.json["metrics"] = jmetrics;
  rep.json["runs_ok"] = rep.runs_ok;
  rep.json["trends_ok"] = trends_ok;
  rep.json["pass"] = rep.pass;
  return rep;
}

SweepReport report_from_dirs(const std::vector<std::string>& run_dirs) {
  std::vector<nlohmann::ordered_json> summaries;
  for (const std::string& d : run_dirs)
    summaries.push_back(load_summary(d + "/summary.json"));
  return build_report(summaries);
}

void write_report(const SweepReport& rep, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream os(out_dir + "/report.json");
    if (!os) throw std::runtime_error("report: cannot write to " + out_dir);
    os << rep.json.dump(2) << "\n";
  }
  std::ofstream os(out_dir + "/metrics.csv");
  os.precision(17);
  os << "eps";
  for (const auto& [name, jm] : rep.json["metrics"].items()) os << "," << name;
  os << "\n";
  for (std::size_t i = 0; i < rep.epsilons.size(); ++i) {
    os << rep.epsilons[i];
    for (const auto& [name, jm] : rep.json["metrics"].items()) {
      const double v = jm["values"][i].is_number() ? jm["values"][i].get<double>()
                                                   : kNaN;
      os << ",";
      if (std::isfinite(v)) os << v;
    }
    os << "\n";
  }
}

}  // namespace pfl
