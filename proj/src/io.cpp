#include "pbm/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace pbm {

namespace {

std::string space_name(ParamSpace space) {
  switch (space) {
    case ParamSpace::Free4: return "free";
    case ParamSpace::EqualVar3: return "eqvar";
    case ParamSpace::PropVar3: return "propvar";
    case ParamSpace::SharedDrift2: return "null";
    case ParamSpace::SOnly2: return "s_only";
  }
  return "?";
}

nlohmann::ordered_json fit_core_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["scenario"] = space_name(fit.space);
  j["param_names"] = param_names(fit.space);
  j["estimate"] = fit.estimate;
  if (!fit.se.empty()) {
    j["se"] = fit.se;
    auto ci = nlohmann::ordered_json::array();
    for (const auto& [lo, hi] : fit.ci95) ci.push_back({lo, hi});
    j["ci95"] = ci;
  } else {
    j["se"] = nullptr;
    j["ci95"] = nullptr;
  }
  j["loglik"] = fit.loglik;
  j["converged"] = fit.converged;
  j["restarts_used"] = fit.restarts_used;
  return j;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

void append_param_rows(std::ostringstream& os, const std::vector<ParamStat>& stats) {
  for (const auto& p : stats) {
    os << p.name << ',' << format_double(p.truth) << ',' << format_double(p.avg) << ','
       << format_double(p.emp_se) << ',' << format_double(p.asym_se) << ','
       << format_double(p.cp) << '\n';
  }
}

nlohmann::ordered_json param_stats_json(const std::vector<ParamStat>& stats) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& p : stats) {
    arr.push_back({{"param", p.name},
                   {"truth", p.truth},
                   {"avg", p.avg},
                   {"emp_se", p.emp_se},
                   {"asym_se", p.asym_se},
                   {"cp", p.cp}});
  }
  return arr;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_pairs_csv(std::ostream& os, const std::vector<ObservationPair>& pairs) {
  os << "s,r\n";
  for (const auto& p : pairs) os << format_double(p.s) << ',' << format_double(p.r) << '\n';
  if (!os) throw IoFailure("failed while writing pair data");
}

std::vector<ObservationPair> read_pairs_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParseFailure("line 1: missing header (expected \"s,r\")");
  if (trim(line) != "s,r") throw ParseFailure("line 1: bad header \"" + trim(line) + "\" (expected \"s,r\")");
  std::vector<ObservationPair> pairs;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string::npos)
      throw ParseFailure("line " + std::to_string(lineno) + ": expected two comma-separated values");
    const std::string sa = trim(row.substr(0, comma));
    const std::string sb = trim(row.substr(comma + 1));
    double s, r;
    size_t used = 0;
    try {
      s = std::stod(sa, &used);
      if (used != sa.size()) throw std::invalid_argument("trailing");
      r = std::stod(sb, &used);
      if (used != sb.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseFailure("line " + std::to_string(lineno) + ": non-numeric value");
    }
    if (!(s > 0.0))
      throw ParseFailure("line " + std::to_string(lineno) + ": non-positive s value " + sa);
    if (!(r > 0.0))
      throw ParseFailure("line " + std::to_string(lineno) + ": non-positive r value " + sb);
    pairs.push_back({s, r});
  }
  return pairs;
}

std::vector<ObservationPair> read_pairs_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoFailure("cannot open " + path);
  return read_pairs_csv(is);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw IoFailure("cannot open " + path + " for writing");
  os << content;
  if (!os) throw IoFailure("failed while writing " + path);
}

nlohmann::ordered_json fit_report_json(const FitResult& fit, double b, int n) {
  nlohmann::ordered_json j = fit_core_json(fit);
  j["b"] = b;
  j["n"] = n;
  return j;
}

nlohmann::ordered_json lrt_report_json(const LrtResult& lrt, double b, int n) {
  nlohmann::ordered_json j;
  j["statistic"] = lrt.statistic;
  j["threshold"] = LrtResult::kThreshold;
  j["reject"] = lrt.reject;
  j["b"] = b;
  j["n"] = n;
  j["null_fit"] = fit_core_json(lrt.null_fit);
  j["full_fit"] = fit_core_json(lrt.full_fit);
  return j;
}

std::string summary_csv(const StudySummary& summary) {
  std::ostringstream os;
  os << "param,truth,avg,emp_se,asym_se,cp\n";
  append_param_rows(os, summary.params);
  append_param_rows(os, summary.s_only_params);
  return os.str();
}

nlohmann::ordered_json summary_json(const StudySummary& summary) {
  nlohmann::ordered_json j;
  j["n"] = summary.n;
  j["reps"] = summary.reps;
  j["seed"] = summary.seed;
  j["params"] = param_stats_json(summary.params);
  if (!summary.s_only_params.empty()) j["s_only_params"] = param_stats_json(summary.s_only_params);
  if (summary.lrt_rejection_percent)
    j["lrt_rejection_percent"] = *summary.lrt_rejection_percent;
  j["failed_replications"] = summary.failed_replications;
  return j;
}

std::string sweep_csv(const std::string& axis, const std::vector<double>& values,
                      const std::vector<StudySummary>& summaries) {
  std::ostringstream os;
  os << "axis,value,param,truth,avg,emp_se,asym_se,cp,lrt_reject_pct\n";
  for (size_t i = 0; i < summaries.size(); ++i) {
    const std::string lrt = summaries[i].lrt_rejection_percent
                                ? format_double(*summaries[i].lrt_rejection_percent)
                                : "";
    auto rows = summaries[i].params;
    rows.insert(rows.end(), summaries[i].s_only_params.begin(), summaries[i].s_only_params.end());
    for (const auto& p : rows) {
      os << axis << ',' << format_double(values[i]) << ',' << p.name << ','
         << format_double(p.truth) << ',' << format_double(p.avg) << ','
         << format_double(p.emp_se) << ',' << format_double(p.asym_se) << ','
         << format_double(p.cp) << ',' << lrt << '\n';
    }
  }
  return os.str();
}

nlohmann::ordered_json sweep_json(const std::string& axis, const std::vector<double>& values,
                                  const std::vector<StudySummary>& summaries) {
  nlohmann::ordered_json j;
  j["axis"] = axis;
  auto arr = nlohmann::ordered_json::array();
  for (size_t i = 0; i < summaries.size(); ++i) {
    nlohmann::ordered_json point = summary_json(summaries[i]);
    point["value"] = values[i];
    arr.push_back(std::move(point));
  }
  j["points"] = arr;
  return j;
}

std::string render_table(const StudySummary& summary) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-18s %12s %12s %12s %12s %8s\n", "param", "truth", "average",
                "emp_se", "asym_se", "cp%");
  os << buf;
  auto rows = summary.params;
  rows.insert(rows.end(), summary.s_only_params.begin(), summary.s_only_params.end());
  for (const auto& p : rows) {
    std::snprintf(buf, sizeof(buf), "%-18s %12.5g %12.5g %12.5g %12.5g %8.1f\n", p.name.c_str(),
                  p.truth, p.avg, p.emp_se, p.asym_se, p.cp);
    os << buf;
  }
  if (summary.lrt_rejection_percent) {
    std::snprintf(buf, sizeof(buf), "LRT rejection: %.1f%%\n", *summary.lrt_rejection_percent);
    os << buf;
  }
  if (summary.failed_replications > 0) {
    std::snprintf(buf, sizeof(buf), "failed replications: %d of %d\n", summary.failed_replications,
                  summary.reps);
    os << buf;
  }
  return os.str();
}

}  // namespace pbm
