#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbm/inference.hpp"
#include "pbm/study.hpp"

namespace pbm {

// Malformed data file content (bad header, non-numeric or non-positive
// values); carries the offending line number in the message.
struct ParseFailure : Error {
  using Error::Error;
};

// Stream/filesystem failure.
struct IoFailure : Error {
  using Error::Error;
};

// Doubles are serialized with 17 significant digits (round-trip exact).
std::string format_double(double v);

// Data files: header "s,r", one pair per row.
void write_pairs_csv(std::ostream& os, const std::vector<ObservationPair>& pairs);
std::vector<ObservationPair> read_pairs_csv(std::istream& is);
std::vector<ObservationPair> read_pairs_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Fit / LRT reports.
nlohmann::ordered_json fit_report_json(const FitResult& fit, double b, int n);
nlohmann::ordered_json lrt_report_json(const LrtResult& lrt, double b, int n);

// Study summaries.  CSV schema: param,truth,avg,emp_se,asym_se,cp
// (one row per parameter; S-only rows are appended when present).
std::string summary_csv(const StudySummary& summary);
nlohmann::ordered_json summary_json(const StudySummary& summary);

// Sweep CSV schema: axis,value,param,truth,avg,emp_se,asym_se,cp,lrt_reject_pct
// (lrt_reject_pct empty when the study did not run the test).
std::string sweep_csv(const std::string& axis, const std::vector<double>& values,
                      const std::vector<StudySummary>& summaries);
nlohmann::ordered_json sweep_json(const std::string& axis, const std::vector<double>& values,
                                  const std::vector<StudySummary>& summaries);

// Table-1-style fixed-width text rendering of a summary.
std::string render_table(const StudySummary& summary);

}  // namespace pbm
