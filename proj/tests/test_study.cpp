#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pbm/io.hpp"
#include "pbm/sampler.hpp"
#include "pbm/study.hpp"

using namespace pbm;

namespace {
const Model kRow1{10.0, WienerPhase(1.0, 0.4), WienerPhase(0.1, 0.026)};

StudyConfig small_config() {
  StudyConfig cfg(kRow1, Scenario::unconstrained());
  cfg.n = 60;
  cfg.reps = 30;
  cfg.seed = 11;
  return cfg;
}
}  // namespace

TEST_CASE("truth_vector per scenario") {
  CHECK(truth_vector(kRow1, Scenario::unconstrained()) ==
        std::vector<double>{1.0, 0.4, 0.1, 0.026});
  const Model eq(10.0, WienerPhase(1.0, 0.4), WienerPhase(0.5, 0.4));
  CHECK(truth_vector(eq, Scenario::equal_variance()) == std::vector<double>{1.0, 0.5, 0.4});
  CHECK_THROWS_AS(truth_vector(kRow1, Scenario::equal_variance()), std::invalid_argument);
  const Model prop = make_proportional_model(1.0, 2.0, 0.7, 10.0);
  const auto tv = truth_vector(prop, Scenario::proportional(0.7));
  CHECK(tv[2] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(truth_vector(kRow1, Scenario::proportional(1.0)), std::invalid_argument);
}

TEST_CASE("run_study with a single replication mirrors the single fit") {
  StudyConfig cfg = small_config();
  cfg.reps = 1;
  cfg.n = 100;
  const StudySummary summary = run_study(cfg);
  CHECK(summary.reps == 1);
  CHECK(summary.failed_replications == 0);

  const PairSampler sampler(cfg.model);
  RngStream rng(cfg.seed, 0);
  std::vector<ObservationPair> pairs(cfg.n);
  for (auto& p : pairs) p = sampler.sample(rng);
  const FitResult fr = fit_space(Sample(std::move(pairs)), ParamSpace::Free4, cfg.model.boundary);
  for (size_t j = 0; j < 4; ++j) {
    CHECK(summary.params[j].avg == fr.estimate[j]);
    CHECK(summary.params[j].asym_se == fr.se[j]);
    CHECK(summary.params[j].emp_se == 0.0);
    CHECK((summary.params[j].cp == 0.0 || summary.params[j].cp == 100.0));
  }
}

TEST_CASE("run_study is deterministic in the seed and thread count") {
  StudyConfig cfg = small_config();
  cfg.threads = 1;
  const std::string once = summary_json(run_study(cfg)).dump();
  cfg.threads = 4;
  const std::string again = summary_json(run_study(cfg)).dump();
  CHECK(once == again);

  cfg.seed = 12;
  const std::string other = summary_json(run_study(cfg)).dump();
  CHECK(once != other);
}

TEST_CASE("run_study aggregates near the truth at a small scale") {
  StudyConfig cfg = small_config();
  cfg.reps = 60;
  const StudySummary summary = run_study(cfg);
  CHECK(summary.failed_replications <= 3);
  REQUIRE(summary.params.size() == 4);
  CHECK(summary.params[0].name == "mu1");
  CHECK(std::abs(summary.params[0].avg - 1.0) < 0.05);
  CHECK(std::abs(summary.params[2].avg - 0.1) < 0.01);
  for (const auto& p : summary.params) {
    CHECK(p.emp_se > 0.0);
    CHECK(p.asym_se > 0.0);
    CHECK(p.cp >= 0.0);
    CHECK(p.cp <= 100.0);
  }
}

TEST_CASE("run_study optional blocks") {
  StudyConfig cfg(Model(10.0, WienerPhase(1.0, 0.4), WienerPhase(1.0, 0.4)),
                  Scenario::equal_variance());
  cfg.n = 60;
  cfg.reps = 20;
  cfg.seed = 21;
  cfg.compute_lrt = true;
  cfg.compute_s_only = true;
  const StudySummary summary = run_study(cfg);
  REQUIRE(summary.lrt_rejection_percent.has_value());
  CHECK(*summary.lrt_rejection_percent >= 0.0);
  CHECK(*summary.lrt_rejection_percent <= 100.0);
  REQUIRE(summary.s_only_params.size() == 2);
  CHECK(summary.s_only_params[0].name == "mu1_s_only");
  CHECK(std::abs(summary.s_only_params[0].avg - 1.0) < 0.1);
}

TEST_CASE("run_study validates its configuration") {
  StudyConfig cfg = small_config();
  cfg.n = 4;
  CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.reps = 0;
  CHECK_THROWS_AS(run_study(cfg), std::invalid_argument);
}

TEST_CASE("apply_axis semantics") {
  StudyConfig cfg = small_config();
  const StudyConfig m2 = apply_axis(cfg, SweepAxis::Mu2, 3.0);
  CHECK(m2.model.phase2.mu == 3.0);
  CHECK(m2.model.phase2.sigma2 == cfg.model.phase2.sigma2);

  const StudyConfig sig = apply_axis(cfg, SweepAxis::Sigma2, 0.7);
  CHECK(sig.model.phase1.sigma2 == 0.7);
  CHECK(sig.model.phase2.sigma2 == 0.7);

  const StudyConfig kk = apply_axis(cfg, SweepAxis::K, 0.5);
  CHECK(kk.model.phase1.sigma2 == doctest::Approx(0.5 * kk.model.phase1.mu));
  CHECK(kk.model.phase2.sigma2 == doctest::Approx(0.5 * kk.model.phase2.mu));

  StudyConfig prop(make_proportional_model(1.0, 2.0, 1.0, 10.0), Scenario::proportional(1.0));
  const StudyConfig pm2 = apply_axis(prop, SweepAxis::Mu2, 4.0);
  CHECK(pm2.model.phase2.sigma2 == doctest::Approx(4.0));  // k preserved
  CHECK_THROWS_AS(apply_axis(prop, SweepAxis::Sigma2, 0.4), std::invalid_argument);
  CHECK_THROWS_AS(apply_axis(cfg, SweepAxis::Mu1, -1.0), std::invalid_argument);

  CHECK(sweep_axis_from_string("mu2") == SweepAxis::Mu2);
  CHECK_THROWS_AS(sweep_axis_from_string("nope"), std::invalid_argument);
}

TEST_CASE("a single-value sweep equals the study at that value") {
  StudyConfig cfg = small_config();
  cfg.reps = 10;
  const auto swept = run_sweep(cfg, SweepAxis::Mu2, {0.25});
  REQUIRE(swept.size() == 1);
  const StudySummary direct = run_study(apply_axis(cfg, SweepAxis::Mu2, 0.25));
  CHECK(summary_json(swept[0]).dump() == summary_json(direct).dump());
}

TEST_CASE("log_spaced_grid shape") {
  const auto g = log_spaced_grid(0.1, 10.0, 20);
  REQUIRE(g.size() == 20);
  CHECK(g.front() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(g.back() == doctest::Approx(10.0).epsilon(1e-12));
  for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK_THROWS_AS(log_spaced_grid(-1.0, 10.0, 5), std::invalid_argument);
}
