// Command-line front end: simulate / estimate / lrt / study / sweep.
//
// Exit codes: 0 success, 2 input error, 3 I/O error, 4 study
// failure-rate error.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pbm/io.hpp"
#include "pbm/sampler.hpp"
#include "pbm/study.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;
constexpr int kExitStudy = 4;

struct CliFailure {
  int code;
  std::string message;
};

void write_output(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    if (!std::cout) throw pbm::IoFailure("failed while writing to stdout");
    return;
  }
  pbm::write_text_file(path, content);
}

pbm::Scenario scenario_from_string(const std::string& name) {
  if (name == "free") return pbm::Scenario::unconstrained();
  if (name == "eqvar") return pbm::Scenario::equal_variance();
  if (name == "propvar") return pbm::Scenario::proportional(1.0);  // k is fitted, not fixed
  throw CliFailure{kExitInput, "unknown scenario \"" + name + "\" (expected free|eqvar|propvar)"};
}

// Model/study parameters that may come from flags, a JSON config file,
// or defaults, with flags taking precedence over the file.
struct StudyArgs {
  double b = std::nan("");
  double mu1 = std::nan("");
  double sigma1sq = std::nan("");
  double mu2 = std::nan("");
  double sigma2sq = std::nan("");
  std::string scenario = "free";
  int n = 100;
  int reps = 1000;
  uint64_t seed = 1;
  bool lrt = false;
  bool s_only = false;
  unsigned threads = 0;
  std::string axis;
  std::vector<double> values;
  double grid_lo = std::nan("");
  double grid_hi = std::nan("");
  int grid_points = 20;
};

void add_study_flags(CLI::App* cmd, StudyArgs& a, bool sweep) {
  cmd->add_option("--b", a.b, "Boundary level B");
  cmd->add_option("--mu1", a.mu1, "Pre-intervention drift");
  cmd->add_option("--sigma1sq", a.sigma1sq, "Pre-intervention squared diffusion coefficient");
  cmd->add_option("--mu2", a.mu2, "Post-intervention drift");
  cmd->add_option("--sigma2sq", a.sigma2sq, "Post-intervention squared diffusion coefficient");
  cmd->add_option("--scenario", a.scenario, "Fitting scenario: free|eqvar|propvar");
  cmd->add_option("--n", a.n, "Sample size per replication");
  cmd->add_option("--reps", a.reps, "Number of replications");
  cmd->add_option("--seed", a.seed, "Base RNG seed (64-bit unsigned)");
  cmd->add_flag("--lrt", a.lrt, "Also run the likelihood ratio test per replication");
  cmd->add_flag("--s-only", a.s_only, "Also run the S-only fit per replication");
  cmd->add_option("--threads", a.threads, "Worker threads (0 = hardware)");
  if (sweep) {
    cmd->add_option("--axis", a.axis, "Sweep axis: mu1|mu2|sigma2|k");
    cmd->add_option("--values", a.values, "Explicit grid values")->delimiter(',');
    cmd->add_option("--grid-lo", a.grid_lo, "Log-spaced grid lower end");
    cmd->add_option("--grid-hi", a.grid_hi, "Log-spaced grid upper end");
    cmd->add_option("--grid-points", a.grid_points, "Log-spaced grid size");
  }
}

// Merge a JSON config file into flag values; a key is applied only when
// the matching flag was not given on the command line.
void apply_config(const CLI::App& cmd, const std::string& path, StudyArgs& a, bool sweep) {
  std::ifstream is(path);
  if (!is) throw pbm::IoFailure("cannot open config file " + path);
  ordered_json cfg;
  try {
    is >> cfg;
  } catch (const std::exception& e) {
    throw CliFailure{kExitInput, std::string("config file: ") + e.what()};
  }
  if (!cfg.is_object()) throw CliFailure{kExitInput, "config file: expected a JSON object"};

  auto flag_given = [&](const std::string& flag) { return cmd.count(flag) > 0; };
  for (const auto& [key, value] : cfg.items()) {
    try {
      if (key == "b") { if (!flag_given("--b")) a.b = value.get<double>(); }
      else if (key == "mu1") { if (!flag_given("--mu1")) a.mu1 = value.get<double>(); }
      else if (key == "sigma1sq") { if (!flag_given("--sigma1sq")) a.sigma1sq = value.get<double>(); }
      else if (key == "mu2") { if (!flag_given("--mu2")) a.mu2 = value.get<double>(); }
      else if (key == "sigma2sq") { if (!flag_given("--sigma2sq")) a.sigma2sq = value.get<double>(); }
      else if (key == "scenario") { if (!flag_given("--scenario")) a.scenario = value.get<std::string>(); }
      else if (key == "n") { if (!flag_given("--n")) a.n = value.get<int>(); }
      else if (key == "reps") { if (!flag_given("--reps")) a.reps = value.get<int>(); }
      else if (key == "seed") { if (!flag_given("--seed")) a.seed = value.get<uint64_t>(); }
      else if (key == "lrt") { if (!flag_given("--lrt")) a.lrt = value.get<bool>(); }
      else if (key == "s_only") { if (!flag_given("--s-only")) a.s_only = value.get<bool>(); }
      else if (key == "threads") { if (!flag_given("--threads")) a.threads = value.get<unsigned>(); }
      else if (sweep && key == "axis") { if (!flag_given("--axis")) a.axis = value.get<std::string>(); }
      else if (sweep && key == "values") { if (!flag_given("--values")) a.values = value.get<std::vector<double>>(); }
      else if (sweep && key == "grid_lo") { if (!flag_given("--grid-lo")) a.grid_lo = value.get<double>(); }
      else if (sweep && key == "grid_hi") { if (!flag_given("--grid-hi")) a.grid_hi = value.get<double>(); }
      else if (sweep && key == "grid_points") { if (!flag_given("--grid-points")) a.grid_points = value.get<int>(); }
      else throw CliFailure{kExitInput, "config file: unknown key \"" + key + "\""};
    } catch (const ordered_json::exception& e) {
      throw CliFailure{kExitInput, "config file: bad value for \"" + key + "\": " + e.what()};
    }
  }
}

double require_positive(double v, const std::string& name) {
  if (std::isnan(v)) throw CliFailure{kExitInput, "missing required parameter " + name};
  if (!(v > 0.0)) throw CliFailure{kExitInput, name + " must be positive"};
  return v;
}

pbm::Model model_from_args(const StudyArgs& a) {
  return pbm::Model(require_positive(a.b, "--b"),
                    pbm::WienerPhase(require_positive(a.mu1, "--mu1"),
                                     require_positive(a.sigma1sq, "--sigma1sq")),
                    pbm::WienerPhase(require_positive(a.mu2, "--mu2"),
                                     require_positive(a.sigma2sq, "--sigma2sq")));
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  if (path == "-") return path;
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

// ---------------------------------------------------------------------------

int run_simulate(const std::string& out, const StudyArgs& a, int n, bool oracle, double dt,
                 int horizon, uint64_t stream) {
  const pbm::Model model = model_from_args(a);
  if (n < 1) throw CliFailure{kExitInput, "--n must be >= 1"};
  pbm::RngStream rng(a.seed, stream);
  std::vector<pbm::ObservationPair> pairs(n);
  if (oracle) {
    const pbm::OracleConfig cfg{dt, horizon};
    for (auto& p : pairs) p = pbm::oracle_sample_pair(model, cfg, rng);
  } else {
    const pbm::PairSampler sampler(model);
    for (auto& p : pairs) p = sampler.sample(rng);
  }
  std::ostringstream os;
  pbm::write_pairs_csv(os, pairs);
  write_output(out, os.str());
  return kExitOk;
}

int run_estimate(const std::string& input, const std::string& out, double b,
                 const std::string& scenario_name) {
  const pbm::Scenario scenario = scenario_from_string(scenario_name);
  const pbm::Sample sample(pbm::read_pairs_file(input));
  const pbm::FitResult fr = pbm::fit(sample, scenario, require_positive(b, "--b"));
  write_output(out, pbm::fit_report_json(fr, b, sample.n()).dump(2) + "\n");
  return kExitOk;
}

int run_lrt(const std::string& input, const std::string& out, double b) {
  const pbm::Sample sample(pbm::read_pairs_file(input));
  const pbm::LrtResult lrt = pbm::lrt_equal_drift(sample, require_positive(b, "--b"));
  write_output(out, pbm::lrt_report_json(lrt, b, sample.n()).dump(2) + "\n");
  return kExitOk;
}

void emit_study(const pbm::StudySummary& summary, const std::string& out_csv,
                const std::string& out_json, const std::string& heading) {
  if (!heading.empty()) std::cout << heading << "\n";
  std::cout << pbm::render_table(summary);
  if (!out_csv.empty()) write_output(out_csv, pbm::summary_csv(summary));
  if (!out_json.empty()) write_output(out_json, pbm::summary_json(summary).dump(2) + "\n");
}

int run_study_cmd(const StudyArgs& a, bool table1, const std::string& out_csv,
                  const std::string& out_json) {
  if (table1) {
    // The four Table-1 parameter rows: B=10, mu1=1, sigma1^2=0.4,
    // mu2=0.1, sigma2^2 in {0.026, 0.059, 0.094, 0.131}.
    const double sigma2sq_rows[4] = {0.026, 0.059, 0.094, 0.131};
    for (int row = 0; row < 4; ++row) {
      StudyArgs ra = a;
      ra.b = 10.0;
      ra.mu1 = 1.0;
      ra.sigma1sq = 0.4;
      ra.mu2 = 0.1;
      ra.sigma2sq = sigma2sq_rows[row];
      ra.scenario = "free";
      pbm::StudyConfig cfg(model_from_args(ra), scenario_from_string(ra.scenario));
      cfg.n = ra.n; cfg.reps = ra.reps; cfg.seed = ra.seed;
      cfg.compute_lrt = ra.lrt; cfg.compute_s_only = ra.s_only; cfg.threads = ra.threads;
      const pbm::StudySummary summary = pbm::run_study(cfg);
      const std::string suffix = "_row" + std::to_string(row + 1);
      emit_study(summary, out_csv.empty() ? "" : with_suffix(out_csv, suffix),
                 out_json.empty() ? "" : with_suffix(out_json, suffix),
                 "Table 1 row " + std::to_string(row + 1) +
                     " (sigma2_sq = " + pbm::format_double(ra.sigma2sq) + ")");
    }
    return kExitOk;
  }
  pbm::StudyConfig cfg(model_from_args(a), scenario_from_string(a.scenario));
  cfg.n = a.n; cfg.reps = a.reps; cfg.seed = a.seed;
  cfg.compute_lrt = a.lrt; cfg.compute_s_only = a.s_only; cfg.threads = a.threads;
  emit_study(pbm::run_study(cfg), out_csv, out_json, "");
  return kExitOk;
}

int run_sweep_cmd(const StudyArgs& a, const std::string& out_csv, const std::string& out_json) {
  if (a.axis.empty()) throw CliFailure{kExitInput, "missing required parameter --axis"};
  const pbm::SweepAxis axis = pbm::sweep_axis_from_string(a.axis);
  std::vector<double> values = a.values;
  if (values.empty()) {
    const double lo = std::isnan(a.grid_lo) ? 0.1 : a.grid_lo;
    const double hi = std::isnan(a.grid_hi) ? 10.0 : a.grid_hi;
    values = pbm::log_spaced_grid(lo, hi, a.grid_points);
  }
  for (double v : values)
    if (!(v > 0.0)) throw CliFailure{kExitInput, "--values must all be positive"};

  pbm::StudyConfig cfg(model_from_args(a), scenario_from_string(a.scenario));
  cfg.n = a.n; cfg.reps = a.reps; cfg.seed = a.seed;
  cfg.compute_lrt = a.lrt; cfg.compute_s_only = a.s_only; cfg.threads = a.threads;
  const auto summaries = pbm::run_sweep(cfg, axis, values);
  for (size_t i = 0; i < summaries.size(); ++i) {
    std::cout << a.axis << " = " << pbm::format_double(values[i]) << "\n"
              << pbm::render_table(summaries[i]);
  }
  if (!out_csv.empty()) write_output(out_csv, pbm::sweep_csv(a.axis, values, summaries));
  if (!out_json.empty())
    write_output(out_json, pbm::sweep_json(a.axis, values, summaries).dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference toolkit for boundary-crossing times of a Wiener process"
               " perturbed by an intervention"};
  app.require_subcommand(1);

  // simulate
  StudyArgs sim_args;
  int sim_n = 100;
  bool sim_oracle = false;
  double sim_dt = 1e-3;
  int sim_horizon = 64;
  uint64_t sim_stream = 0;
  std::string sim_out = "-";
  CLI::App* sim = app.add_subcommand("simulate", "Draw (s,r) pairs and write them as CSV");
  sim->add_option("--b", sim_args.b, "Boundary level B");
  sim->add_option("--mu1", sim_args.mu1, "Pre-intervention drift");
  sim->add_option("--sigma1sq", sim_args.sigma1sq, "Pre-intervention squared diffusion coefficient");
  sim->add_option("--mu2", sim_args.mu2, "Post-intervention drift");
  sim->add_option("--sigma2sq", sim_args.sigma2sq, "Post-intervention squared diffusion coefficient");
  sim->add_option("--n", sim_n, "Number of pairs");
  sim->add_option("--seed", sim_args.seed, "RNG seed (64-bit unsigned)");
  sim->add_option("--stream", sim_stream, "RNG stream id");
  sim->add_flag("--oracle", sim_oracle, "Use the discretized-path oracle instead of exact sampling");
  sim->add_option("--dt", sim_dt, "Oracle time step");
  sim->add_option("--horizon", sim_horizon, "Oracle renewal cycles before inspection");
  sim->add_option("--out", sim_out, "Output path (- for stdout)");

  // estimate
  std::string est_input, est_out = "-", est_scenario = "free";
  double est_b = std::nan("");
  CLI::App* est = app.add_subcommand("estimate", "Maximum likelihood fit from a CSV of (s,r) pairs");
  est->add_option("input", est_input, "Input CSV with header s,r")->required();
  est->add_option("--b", est_b, "Boundary level B");
  est->add_option("--scenario", est_scenario, "free|eqvar|propvar");
  est->add_option("--out", est_out, "Output path for the JSON report (- for stdout)");

  // lrt
  std::string lrt_input, lrt_out = "-";
  double lrt_b = std::nan("");
  CLI::App* lrt = app.add_subcommand("lrt", "Likelihood ratio test of mu1 = mu2");
  lrt->add_option("input", lrt_input, "Input CSV with header s,r")->required();
  lrt->add_option("--b", lrt_b, "Boundary level B");
  lrt->add_option("--out", lrt_out, "Output path for the JSON report (- for stdout)");

  // study
  StudyArgs study_args;
  std::string study_config, study_out_csv, study_out_json;
  bool study_table1 = false;
  CLI::App* study = app.add_subcommand("study", "Monte Carlo simulate-then-fit study");
  add_study_flags(study, study_args, false);
  study->add_option("--config", study_config, "JSON config file (flags override its values)");
  study->add_flag("--table1", study_table1, "Run the four Table-1 parameter rows");
  study->add_option("--out-csv", study_out_csv, "Summary CSV path");
  study->add_option("--out-json", study_out_json, "Summary JSON path");

  // sweep
  StudyArgs sweep_args;
  std::string sweep_config, sweep_out_csv, sweep_out_json;
  CLI::App* sweep = app.add_subcommand("sweep", "Study repeated over a parameter grid");
  add_study_flags(sweep, sweep_args, true);
  sweep->add_option("--config", sweep_config, "JSON config file (flags override its values)");
  sweep->add_option("--out-csv", sweep_out_csv, "Sweep CSV path");
  sweep->add_option("--out-json", sweep_out_json, "Sweep JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (sim->parsed())
      return run_simulate(sim_out, sim_args, sim_n, sim_oracle, sim_dt, sim_horizon, sim_stream);
    if (est->parsed()) return run_estimate(est_input, est_out, est_b, est_scenario);
    if (lrt->parsed()) return run_lrt(lrt_input, lrt_out, lrt_b);
    if (study->parsed()) {
      if (!study_config.empty()) apply_config(*study, study_config, study_args, false);
      return run_study_cmd(study_args, study_table1, study_out_csv, study_out_json);
    }
    if (sweep->parsed()) {
      if (!sweep_config.empty()) apply_config(*sweep, sweep_config, sweep_args, true);
      return run_sweep_cmd(sweep_args, sweep_out_csv, sweep_out_json);
    }
  } catch (const CliFailure& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const pbm::ParseFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const pbm::IoFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const pbm::StudyFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStudy;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const pbm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
