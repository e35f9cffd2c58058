#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "pbm/inference.hpp"
#include "pbm/numerics.hpp"
#include "pbm/sampler.hpp"

using namespace pbm;

namespace {

const WienerPhase kPhase1{1.0, 0.4};
const WienerPhase kPhase2{0.1, 0.026};
const double kB = 10.0;
const Model kRow1{kB, kPhase1, kPhase2};

Sample draw_sample(const Model& model, int n, uint64_t seed, uint64_t stream = 0) {
  const PairSampler sampler(model);
  RngStream rng(seed, stream);
  std::vector<ObservationPair> pairs(n);
  for (auto& p : pairs) p = sampler.sample(rng);
  return Sample(std::move(pairs));
}

}  // namespace

TEST_CASE("Sample validation") {
  CHECK_THROWS_AS(Sample({}), std::invalid_argument);
  CHECK_THROWS_AS(Sample({{1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Sample({{-1.0, 2.0}}), std::invalid_argument);
  CHECK(Sample({{1.0, 2.0}, {3.0, 4.0}}).n() == 2);
}

TEST_CASE("loglik definition and additivity") {
  const Sample one({{4.0, 30.0}});
  const std::vector<double> phi = {1.0, 0.4, 0.1, 0.026};
  CHECK(loglik(one, phi, ParamSpace::Free4, kB) ==
        doctest::Approx(log_pdf_joint_sr(4.0, 30.0, kRow1)).epsilon(1e-14));

  const Sample a = draw_sample(kRow1, 30, 101);
  const Sample b = draw_sample(kRow1, 20, 102);
  std::vector<ObservationPair> merged = a.pairs();
  merged.insert(merged.end(), b.pairs().begin(), b.pairs().end());
  const Sample ab(merged);
  CHECK(loglik(ab, phi, ParamSpace::Free4, kB) ==
        doctest::Approx(loglik(a, phi, ParamSpace::Free4, kB) +
                        loglik(b, phi, ParamSpace::Free4, kB)).epsilon(1e-12));
}

TEST_CASE("loglik proportional route equals the unconstrained likelihood") {
  const Model prop = make_proportional_model(1.0, 2.0, 1.0, kB);
  const Sample sample = draw_sample(prop, 50, 103);
  for (double mu1 : {0.7, 1.0, 1.4}) {
    for (double k : {0.5, 1.0, 2.2}) {
      const double mu2 = 1.9;
      const double lp = loglik(sample, {mu1, mu2, k}, ParamSpace::PropVar3, kB);
      const double lf = loglik(sample, {mu1, k * mu1, mu2, k * mu2}, ParamSpace::Free4, kB);
      CHECK(lp == doctest::Approx(lf).epsilon(1e-10));
    }
  }
}

TEST_CASE("loglik error conditions") {
  const Sample s({{4.0, 30.0}});
  CHECK_THROWS_AS(loglik(s, {1.0, 0.4, 0.1}, ParamSpace::Free4, kB), std::invalid_argument);
  CHECK_THROWS_AS(loglik(s, {1.0, -0.4, 0.1, 0.026}, ParamSpace::Free4, kB),
                  std::invalid_argument);
  // A pair far outside the model's reach drives the density to zero.
  const Sample absurd({{1e7, 1e7}});
  CHECK_THROWS_AS(loglik(absurd, {1.0, 0.4, 0.1, 0.026}, ParamSpace::Free4, kB), NonFinite);
}

TEST_CASE("starting_values recover the truth scale at Table 1 row 1") {
  // Within 50% relative of (1, 0.4, 0.1, 0.026) in at least 90% of
  // replications of size n = 100.
  const std::vector<double> truth = {1.0, 0.4, 0.1, 0.026};
  int good = 0;
  const int reps = 100;
  for (int rep = 0; rep < reps; ++rep) {
    const Sample sample = draw_sample(kRow1, 100, 200, rep);
    const std::vector<double> sv = starting_values(sample, ParamSpace::Free4, kB);
    REQUIRE(sv.size() == 4);
    bool ok = true;
    for (size_t j = 0; j < 4; ++j) {
      CHECK(sv[j] > 0.0);
      ok = ok && std::abs(sv[j] - truth[j]) <= 0.5 * truth[j];
    }
    good += ok;
  }
  CHECK(good >= 90);
}

TEST_CASE("starting_values proportional moment estimator for mu2") {
  // mu2* = (B + k*) / (2 rbar) reproduces mu2 on a large sample.
  const Model prop = make_proportional_model(1.0, 2.0, 1.0, kB);
  const Sample sample = draw_sample(prop, 10000, 300);
  const std::vector<double> sv = starting_values(sample, ParamSpace::PropVar3, kB);
  REQUIRE(sv.size() == 3);
  CHECK(std::abs(sv[1] - 2.0) < 0.08);  // ~3 SE of the moment estimator
  CHECK(std::abs(sv[0] - 1.0) < 0.1);
  CHECK(std::abs(sv[2] - 1.0) < 0.25);
}

TEST_CASE("starting_values degenerate and undersized samples") {
  const Sample identical({{2.0, 3.0}, {2.0, 3.0}, {2.0, 3.0}, {2.0, 3.0}});
  CHECK_THROWS_AS(starting_values(identical, ParamSpace::Free4, kB), DegenerateSample);
  const Sample tiny({{2.0, 3.0}, {2.5, 3.5}});
  CHECK_THROWS_AS(starting_values(tiny, ParamSpace::Free4, kB), std::invalid_argument);
}

TEST_CASE("fit result invariants on one Table 1 sample") {
  const Sample sample = draw_sample(kRow1, 100, 400);
  const std::vector<double> phi0 = starting_values(sample, ParamSpace::Free4, kB);
  const FitResult fr = fit(sample, Scenario::unconstrained(), kB);
  REQUIRE(fr.converged);
  REQUIRE(fr.estimate.size() == 4);
  for (double e : fr.estimate) CHECK(e > 0.0);
  CHECK(std::isfinite(fr.loglik));
  CHECK(fr.restarts_used >= 1);
  CHECK(fr.loglik >= loglik(sample, phi0, ParamSpace::Free4, kB) - 1e-9);
  for (size_t j = 0; j < 4; ++j) {
    CHECK(fr.ci95[j].first == doctest::Approx(fr.estimate[j] - 1.96 * fr.se[j]).epsilon(1e-12));
    CHECK(fr.ci95[j].second == doctest::Approx(fr.estimate[j] + 1.96 * fr.se[j]).epsilon(1e-12));
  }
  // A sane fit lands within a few asymptotic SEs of the truth.
  const std::vector<double> truth = {1.0, 0.4, 0.1, 0.026};
  for (size_t j = 0; j < 4; ++j) CHECK(std::abs(fr.estimate[j] - truth[j]) < 4.0 * fr.se[j]);
}

TEST_CASE("fit requires enough observations") {
  const Sample tiny = draw_sample(kRow1, 4, 401);
  CHECK_THROWS_AS(fit(tiny, Scenario::unconstrained(), kB), std::invalid_argument);
}

TEST_CASE("equal-variance fit is unbiased for the shared variance") {
  const Model eq(kB, WienerPhase(1.0, 0.4), WienerPhase(0.5, 0.4));
  std::vector<double> sig_hat;
  for (int rep = 0; rep < 200; ++rep) {
    const Sample sample = draw_sample(eq, 100, 500, rep);
    const FitResult fr = fit(sample, Scenario::equal_variance(), kB);
    if (fr.converged) sig_hat.push_back(fr.estimate[2]);
  }
  REQUIRE(sig_hat.size() > 190);
  const double se_mean = testutil::sd(sig_hat) / std::sqrt(sig_hat.size());
  CHECK(std::abs(testutil::mean(sig_hat) - 0.4) < 3.0 * se_mean);
}

TEST_CASE("proportional fit expands to a consistent unconstrained likelihood") {
  const Model prop = make_proportional_model(1.0, 2.0, 1.0, kB);
  const Sample sample = draw_sample(prop, 100, 600);
  const FitResult fr = fit(sample, Scenario::proportional(1.0), kB);
  REQUIRE(fr.converged);
  const std::vector<double> expanded = {fr.estimate[0], fr.estimate[2] * fr.estimate[0],
                                        fr.estimate[1], fr.estimate[2] * fr.estimate[1]};
  CHECK(loglik(sample, expanded, ParamSpace::Free4, kB) ==
        doctest::Approx(fr.loglik).epsilon(1e-6));
}

TEST_CASE("observed information is positive definite at the truth") {
  // Cholesky success of the Hessian of the negative log-likelihood at
  // the true parameters, across simulated samples.
  const std::vector<double> truth = {1.0, 0.4, 0.1, 0.026};
  int spd = 0;
  const int reps = 100;
  for (int rep = 0; rep < reps; ++rep) {
    const Sample sample = draw_sample(kRow1, 100, 700, rep);
    auto nll = [&](const std::vector<double>& phi) {
      for (double p : phi)
        if (!(p > 0.0)) return std::numeric_limits<double>::quiet_NaN();
      try {
        return -loglik(sample, phi, ParamSpace::Free4, kB);
      } catch (const NonFinite&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    try {
      const SquareMatrix h = numeric_hessian(nll, truth, hessian_steps(truth));
      spd_inverse(h);
      ++spd;
    } catch (const Error&) {
    }
  }
  CHECK(spd >= 99);
}

TEST_CASE("confidence_report inverts a diagonal information matrix exactly") {
  FitResult fr;
  fr.space = ParamSpace::SharedDrift2;
  fr.estimate = {2.0, 3.0};
  fr.observed_info = SquareMatrix(2);
  fr.observed_info(0, 0) = 16.0;
  fr.observed_info(1, 1) = 25.0;
  const auto rows = confidence_report(fr);
  CHECK(rows[0].se == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(rows[1].se == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(rows[0].lo == doctest::Approx(2.0 - 1.96 * 0.25).epsilon(1e-14));
  CHECK(rows[1].hi == doctest::Approx(3.0 + 1.96 * 0.2).epsilon(1e-14));

  FitResult bad;
  bad.estimate = {1.0};
  CHECK_THROWS_AS(confidence_report(bad), std::invalid_argument);
}

TEST_CASE("asymptotic standard errors shrink like 1/sqrt(n)") {
  const Sample s100 = draw_sample(kRow1, 100, 800);
  const Sample s400 = draw_sample(kRow1, 400, 800);
  const FitResult f100 = fit(s100, Scenario::unconstrained(), kB);
  const FitResult f400 = fit(s400, Scenario::unconstrained(), kB);
  REQUIRE(f100.converged);
  REQUIRE(f400.converged);
  for (size_t j = 0; j < 4; ++j) {
    const double ratio = f100.se[j] / f400.se[j];
    CHECK(ratio > 2.0 * 0.8);
    CHECK(ratio < 2.0 * 1.2);
  }
}

TEST_CASE("likelihood ratio test statistic is nonnegative and calibrated") {
  const Model null_model(kB, WienerPhase(1.0, 0.4), WienerPhase(1.0, 0.4));
  int rejections = 0;
  const int reps = 40;
  for (int rep = 0; rep < reps; ++rep) {
    const Sample sample = draw_sample(null_model, 100, 900, rep);
    const LrtResult lrt = lrt_equal_drift(sample, kB);
    CHECK(lrt.statistic >= 0.0);
    CHECK(lrt.full_fit.loglik >= lrt.null_fit.loglik - 1e-8);
    CHECK(lrt.reject == (lrt.statistic > 3.84));
    rejections += lrt.reject;
  }
  // ~5% size: at most 7 rejections in 40 trials is far inside noise.
  CHECK(rejections <= 7);
}

TEST_CASE("likelihood ratio test detects a strong drift change") {
  const Model alt(kB, WienerPhase(1.0, 0.1), WienerPhase(10.0, 0.1));
  const Sample sample = draw_sample(alt, 100, 901);
  const LrtResult lrt = lrt_equal_drift(sample, kB);
  CHECK(lrt.reject);
  CHECK(lrt.statistic > 3.84);
}

TEST_CASE("lrt requires at least four pairs") {
  const Sample tiny({{1.0, 2.0}, {2.0, 1.0}, {1.5, 2.5}});
  CHECK_THROWS_AS(lrt_equal_drift(tiny, kB), std::invalid_argument);
}

TEST_CASE("fit_s_only ignores the r column entirely") {
  const Sample sample = draw_sample(kRow1, 100, 1000);
  std::vector<ObservationPair> shuffled = sample.pairs();
  for (auto& p : shuffled) p.r = 123.456;  // any positive placeholder
  const FitResult a = fit_s_only(sample, kB);
  const FitResult b = fit_s_only(Sample(shuffled), kB);
  REQUIRE(a.converged);
  CHECK(a.estimate[0] == b.estimate[0]);
  CHECK(a.estimate[1] == b.estimate[1]);
  CHECK(a.loglik == b.loglik);
}

TEST_CASE("joint fit beats the S-only fit for the phase-1 parameters") {
  // sigma2^2 = 0.1 configuration of the SE-comparison figure.
  const Model m(kB, kPhase1, WienerPhase(1.0, 0.1));
  const Sample sample = draw_sample(m, 100, 1001);
  const FitResult joint = fit(sample, Scenario::unconstrained(), kB);
  const FitResult sonly = fit_s_only(sample, kB);
  REQUIRE(joint.converged);
  REQUIRE(sonly.converged);
  CHECK(joint.se[0] < sonly.se[0]);  // mu1
  CHECK(joint.se[1] < sonly.se[1]);  // sigma1^2
}

TEST_CASE("fit_s_only is unbiased over replications") {
  std::vector<double> mu_hat, s2_hat;
  for (int rep = 0; rep < 200; ++rep) {
    const Sample sample = draw_sample(kRow1, 100, 1100, rep);
    const FitResult fr = fit_s_only(sample, kB);
    if (!fr.converged) continue;
    mu_hat.push_back(fr.estimate[0]);
    s2_hat.push_back(fr.estimate[1]);
  }
  REQUIRE(mu_hat.size() > 190);
  CHECK(std::abs(testutil::mean(mu_hat) - 1.0) <
        3.0 * testutil::sd(mu_hat) / std::sqrt(mu_hat.size()));
  CHECK(std::abs(testutil::mean(s2_hat) - 0.4) <
        3.0 * testutil::sd(s2_hat) / std::sqrt(s2_hat.size()));
}

TEST_CASE("a small lattice never beats the fitted optimum") {
  const Sample sample = draw_sample(kRow1, 10, 1200);
  const FitResult fr = fit(sample, Scenario::unconstrained(), kB);
  const std::vector<double> truth = {1.0, 0.4, 0.1, 0.026};
  const int g = 5;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> phi(4);
  for (int i0 = 0; i0 < g; ++i0)
    for (int i1 = 0; i1 < g; ++i1)
      for (int i2 = 0; i2 < g; ++i2)
        for (int i3 = 0; i3 < g; ++i3) {
          const int idx[4] = {i0, i1, i2, i3};
          for (int j = 0; j < 4; ++j)
            phi[j] = truth[j] * std::pow(2.0, -1.0 + 2.0 * idx[j] / (g - 1.0));
          try {
            best = std::max(best, loglik(sample, phi, ParamSpace::Free4, kB));
          } catch (const NonFinite&) {
          }
        }
  CHECK(best <= fr.loglik + 1e-4);
}
