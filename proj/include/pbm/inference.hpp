#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pbm/model.hpp"
#include "pbm/numerics.hpp"

namespace pbm {

// A collection of n i.i.d. (s, r) observations, validated strictly
// positive on construction.
class Sample {
 public:
  explicit Sample(std::vector<ObservationPair> pairs);

  const std::vector<ObservationPair>& pairs() const { return pairs_; }
  int n() const { return static_cast<int>(pairs_.size()); }

 private:
  std::vector<ObservationPair> pairs_;
};

// Parameter space of a fit.  The first three correspond to the public
// scenarios; SharedDrift2 is the null model (mu, sigma2) of the
// likelihood ratio test and SOnly2 the (mu1, sigma1^2) fit that uses
// only the S observations.
enum class ParamSpace { Free4, EqualVar3, PropVar3, SharedDrift2, SOnly2 };

int param_dim(ParamSpace space);
std::vector<std::string> param_names(ParamSpace space);
ParamSpace space_of(const Scenario& scenario);

// Expand a parameter vector of the given space into a concrete Model.
Model expand_model(ParamSpace space, const std::vector<double>& phi, double b);

struct FitResult {
  ParamSpace space = ParamSpace::Free4;
  std::vector<double> estimate;
  double loglik = 0.0;
  SquareMatrix observed_info;  // Hessian of the total negative log-likelihood
  std::vector<double> se;      // empty when the information matrix failed Cholesky
  std::vector<std::pair<double, double>> ci95;
  bool converged = false;
  int restarts_used = 0;
};

struct LrtResult {
  static constexpr double kThreshold = 3.84;  // chi-square(1), 5% level
  double statistic = 0.0;
  bool reject = false;
  FitResult null_fit;  // (mu, sigma2)
  FitResult full_fit;  // (mu1, mu2, sigma2)
};

// Sum over pairs of the log joint density (log f_S for SOnly2).  Throws
// NonFinite if any pair yields a zero or non-finite density.
double loglik(const Sample& sample, const std::vector<double>& phi, ParamSpace space, double b);

// Starting values per the moment-matching strategy: fit (mu1, sigma1^2)
// from the S observations alone (moment start, then S-only likelihood),
// estimate x-hat = E[X(0)] from those, and moment-match the phase-2
// parameters through the conditional IG law of R.  Throws
// DegenerateSample when the empirical variance of S (or of R, where
// needed) is zero.
std::vector<double> starting_values(const Sample& sample, ParamSpace space, double b);

// Maximum likelihood fit.  Optimization runs in log-parameter
// coordinates (positivity is structural); the converged optimum is
// re-launched until the objective changes by < 1e-6, up to 10 restarts
// (OptimFailure beyond that).  Standard errors come from the Cholesky
// inverse of the observed information; if that fails the fit is
// returned with converged = false and se unset.
FitResult fit_space(const Sample& sample, ParamSpace space, double b);
FitResult fit(const Sample& sample, const Scenario& scenario, double b);

// S-only fit (the comparator that ignores the R observations).
FitResult fit_s_only(const Sample& sample, double b);

struct CiRow {
  double se;
  double lo;
  double hi;
};

// Per-parameter asymptotic SE and 95% CI from the observed information
// of a fit.  The information matrix is the Hessian of the total
// negative log-likelihood, i.e. it already estimates n * I(phi), so no
// separate division by n appears here.  Throws NotPositiveDefinite.
std::vector<CiRow> confidence_report(const FitResult& fit);

// Likelihood ratio test of H0: mu1 = mu2 (shared variance nuisance).
LrtResult lrt_equal_drift(const Sample& sample, double b);

}  // namespace pbm
