#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbm/inference.hpp"
#include "pbm/model.hpp"

namespace pbm {

// Configuration of one simulate-then-fit experiment: truth model,
// fitting scenario, per-replication sample size, replication count, and
// the base seed.  Replication i always uses RngStream(seed, i), so a
// summary is a pure function of this struct regardless of thread count.
struct StudyConfig {
  Model model;
  Scenario scenario;
  int n = 100;
  int reps = 1000;
  uint64_t seed = 1;
  bool compute_lrt = false;
  bool compute_s_only = false;
  unsigned threads = 0;  // 0 = hardware concurrency

  StudyConfig(Model m, Scenario sc) : model(std::move(m)), scenario(sc) {}
};

struct ParamStat {
  std::string name;
  double truth;
  double avg;       // mean of estimates over converged replications
  double emp_se;    // SD of estimates over converged replications
  double asym_se;   // median of the per-replication asymptotic SEs
  double cp;        // % of converged replications whose 95% CI covers truth
};

struct StudySummary {
  std::vector<ParamStat> params;
  std::vector<ParamStat> s_only_params;        // present when compute_s_only
  std::optional<double> lrt_rejection_percent;  // present when compute_lrt
  int failed_replications = 0;
  int reps = 0;
  int n = 0;
  uint64_t seed = 0;
};

// True parameter vector of the scenario implied by the model (e.g.
// (mu1, mu2, sigma2) for EqualVariance).  Throws std::invalid_argument
// if the model does not satisfy the scenario's constraint.
std::vector<double> truth_vector(const Model& model, const Scenario& scenario);

// Run cfg.reps independent simulate-then-fit replications and
// aggregate.  Replications that throw or fail to converge are excluded
// from the averages and counted in failed_replications; more than 5%
// failures raises StudyFailure.
StudySummary run_study(const StudyConfig& cfg);

enum class SweepAxis { Mu1, Mu2, Sigma2, K };

SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

// Copy of cfg with the axis applied: Mu1/Mu2 set a drift (rescaling the
// matching variance in the proportional scenario), Sigma2 sets both
// variances to the value, K sets sigma2_i = value * mu_i.
StudyConfig apply_axis(StudyConfig cfg, SweepAxis axis, double value);

// One summary per grid value; every point reuses the base seed, so
// curves share common random numbers.
std::vector<StudySummary> run_sweep(const StudyConfig& base, SweepAxis axis,
                                    const std::vector<double>& values);

// Default grid behind the sweep figures: 20 log-spaced points.
std::vector<double> log_spaced_grid(double lo, double hi, int points = 20);

}  // namespace pbm
