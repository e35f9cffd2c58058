#include "pbm/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pbm/optim.hpp"

namespace pbm {

namespace {

constexpr double kRestartTol = 1e-6;  // |change of -loglik| that ends the restart loop
constexpr int kMaxRestarts = 10;

struct MeanVar {
  double mean;
  double var;
};

MeanVar mean_var(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, n > 1 ? ss / (n - 1.0) : 0.0};
}

// Invert the closed-form mean/variance of S for a moment start.
// mean = (B mu + s2) / (2 mu^2), sqrt(3 var) = (B mu + 3 s2) / (2 mu^2),
// hence mu = B / (3 mean - sqrt(3 var)) and s2 = mu^2 (sqrt(3 var) - mean).
void s_moment_start(double mean, double var, double b, double& mu0, double& s20) {
  const double q = std::sqrt(3.0 * var);
  const double denom = 3.0 * mean - q;
  mu0 = denom > 0.0 ? b / denom : b / (2.0 * mean);
  s20 = mu0 * mu0 * (q - mean);
  if (!(s20 > 0.0)) s20 = 0.04 * b * mu0;
}

// Same inversion under sigma2 = k mu: mean = (B+k)/(2 mu),
// sqrt(3 var) = (B+3k)/(2 mu).
void s_moment_start_proportional(double mean, double var, double b, double& mu0, double& k0) {
  const double q = std::sqrt(3.0 * var);
  const double denom = 3.0 * mean - q;
  mu0 = denom > 0.0 ? b / denom : b / (2.0 * mean);
  k0 = mu0 * (q - mean);
  if (!(k0 > 0.0)) k0 = 0.04 * b;
}

std::vector<double> log_vec(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::log(v[i]);
  return out;
}

std::vector<double> exp_vec(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i]);
  return out;
}

// Minimize the negative log-likelihood in log-parameter coordinates,
// re-launching from the optimum until the objective stabilizes.
struct MaximizedLik {
  std::vector<double> phi;
  double loglik;
  int restarts;
};

MaximizedLik maximize_loglik(const Sample& sample, ParamSpace space, double b,
                             const std::vector<double>& phi0) {
  auto obj = [&](const std::vector<double>& theta) {
    try {
      return -loglik(sample, exp_vec(theta), space, b);
    } catch (const NonFinite&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  NmOptions opts;
  std::vector<double> theta = log_vec(phi0);
  NmResult nm = nelder_mead(obj, theta, opts);
  double prev = nm.fmin;
  theta = nm.x;
  for (int restart = 1; restart <= kMaxRestarts; ++restart) {
    nm = nelder_mead(obj, theta, opts);
    const double change = std::abs(prev - nm.fmin);
    prev = nm.fmin;
    theta = nm.x;
    if (change < kRestartTol) return {exp_vec(theta), -prev, restart};
  }
  throw OptimFailure("fit: objective still moving after restart budget");
}

FitResult fit_from_start(const Sample& sample, ParamSpace space, double b,
                         const std::vector<double>& phi0) {
  const int d = param_dim(space);
  if (sample.n() < d + 1) throw std::invalid_argument("fit: need at least d+1 observations");

  MaximizedLik opt = maximize_loglik(sample, space, b, phi0);
  FitResult out;
  out.space = space;
  out.estimate = opt.phi;
  out.loglik = opt.loglik;
  out.restarts_used = opt.restarts;

  // Observed information: Hessian of the total negative log-likelihood
  // on the raw parameter scale.
  auto nll_raw = [&](const std::vector<double>& phi) {
    for (double p : phi)
      if (!(p > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    try {
      return -loglik(sample, phi, space, b);
    } catch (const NonFinite&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };
  try {
    out.observed_info = numeric_hessian(nll_raw, out.estimate, hessian_steps(out.estimate));
    const SquareMatrix cov = spd_inverse(out.observed_info);
    out.se.resize(d);
    out.ci95.resize(d);
    for (int i = 0; i < d; ++i) {
      out.se[i] = std::sqrt(cov(i, i));
      out.ci95[i] = {out.estimate[i] - 1.96 * out.se[i], out.estimate[i] + 1.96 * out.se[i]};
    }
    out.converged = true;
  } catch (const Error&) {  // NonFinite or NotPositiveDefinite
    out.se.clear();
    out.ci95.clear();
    out.converged = false;
  }
  return out;
}

}  // namespace

Sample::Sample(std::vector<ObservationPair> pairs) : pairs_(std::move(pairs)) {
  if (pairs_.empty()) throw std::invalid_argument("Sample: needs at least one pair");
  for (const auto& p : pairs_)
    if (!(p.s > 0.0) || !(p.r > 0.0))
      throw std::invalid_argument("Sample: all observations must be strictly positive");
}

int param_dim(ParamSpace space) {
  switch (space) {
    case ParamSpace::Free4: return 4;
    case ParamSpace::EqualVar3:
    case ParamSpace::PropVar3: return 3;
    case ParamSpace::SharedDrift2:
    case ParamSpace::SOnly2: return 2;
  }
  return 0;
}

std::vector<std::string> param_names(ParamSpace space) {
  switch (space) {
    case ParamSpace::Free4: return {"mu1", "sigma1_sq", "mu2", "sigma2_sq"};
    case ParamSpace::EqualVar3: return {"mu1", "mu2", "sigma_sq"};
    case ParamSpace::PropVar3: return {"mu1", "mu2", "k"};
    case ParamSpace::SharedDrift2: return {"mu", "sigma_sq"};
    case ParamSpace::SOnly2: return {"mu1", "sigma1_sq"};
  }
  return {};
}

ParamSpace space_of(const Scenario& scenario) {
  switch (scenario.kind) {
    case ScenarioKind::Unconstrained: return ParamSpace::Free4;
    case ScenarioKind::EqualVariance: return ParamSpace::EqualVar3;
    case ScenarioKind::ProportionalVariance: return ParamSpace::PropVar3;
  }
  return ParamSpace::Free4;
}

Model expand_model(ParamSpace space, const std::vector<double>& phi, double b) {
  switch (space) {
    case ParamSpace::Free4:
      return Model(b, WienerPhase(phi[0], phi[1]), WienerPhase(phi[2], phi[3]));
    case ParamSpace::EqualVar3:
      return Model(b, WienerPhase(phi[0], phi[2]), WienerPhase(phi[1], phi[2]));
    case ParamSpace::PropVar3:
      return make_proportional_model(phi[0], phi[1], phi[2], b);
    case ParamSpace::SharedDrift2:
      return Model(b, WienerPhase(phi[0], phi[1]), WienerPhase(phi[0], phi[1]));
    case ParamSpace::SOnly2:
      return Model(b, WienerPhase(phi[0], phi[1]), WienerPhase(phi[0], phi[1]));
  }
  throw std::invalid_argument("expand_model: unknown space");
}

double loglik(const Sample& sample, const std::vector<double>& phi, ParamSpace space, double b) {
  if (static_cast<int>(phi.size()) != param_dim(space))
    throw std::invalid_argument("loglik: parameter dimension mismatch");
  for (double p : phi)
    if (!(p > 0.0)) throw std::invalid_argument("loglik: parameters must be strictly positive");

  double total = 0.0;
  if (space == ParamSpace::SOnly2) {
    const WienerPhase phase(phi[0], phi[1]);
    for (const auto& p : sample.pairs()) {
      const double term = std::log(pdf_s(p.s, phase, b));
      if (!std::isfinite(term)) throw NonFinite("loglik: zero or non-finite f_S term");
      total += term;
    }
    return total;
  }
  if (space == ParamSpace::PropVar3) {
    for (const auto& p : sample.pairs()) {
      const double term = log_pdf_joint_sr_proportional(p.s, p.r, phi[0], phi[1], phi[2], b);
      if (!std::isfinite(term)) throw NonFinite("loglik: zero or non-finite joint density term");
      total += term;
    }
    return total;
  }
  const Model model = expand_model(space, phi, b);
  for (const auto& p : sample.pairs()) {
    const double term = log_pdf_joint_sr(p.s, p.r, model);
    if (!std::isfinite(term)) throw NonFinite("loglik: zero or non-finite joint density term");
    total += term;
  }
  return total;
}

std::vector<double> starting_values(const Sample& sample, ParamSpace space, double b) {
  if (sample.n() < 3) throw std::invalid_argument("starting_values: need at least 3 pairs");
  std::vector<double> s(sample.n()), r(sample.n());
  for (int i = 0; i < sample.n(); ++i) {
    s[i] = sample.pairs()[i].s;
    r[i] = sample.pairs()[i].r;
  }
  const MeanVar ms = mean_var(s);
  const MeanVar mr = mean_var(r);
  if (!(ms.var > 0.0)) throw DegenerateSample("starting_values: zero empirical variance of S");
  const bool needs_r = space != ParamSpace::SOnly2 && space != ParamSpace::SharedDrift2;
  if (needs_r && !(mr.var > 0.0))
    throw DegenerateSample("starting_values: zero empirical variance of R");

  if (space == ParamSpace::PropVar3) {
    double mu0, k0;
    s_moment_start_proportional(ms.mean, ms.var, b, mu0, k0);
    auto s_obj = [&](const std::vector<double>& theta) {
      const double mu = std::exp(theta[0]), k = std::exp(theta[1]);
      try {
        return -loglik(sample, {mu, k * mu}, ParamSpace::SOnly2, b);
      } catch (const NonFinite&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const NmResult nm = nelder_mead(s_obj, {std::log(mu0), std::log(k0)});
    const double mu1 = std::exp(nm.x[0]), k = std::exp(nm.x[1]);
    const double mu2 = (b + k) / (2.0 * mr.mean);
    return {mu1, mu2, k};
  }

  double mu0, s20;
  s_moment_start(ms.mean, ms.var, b, mu0, s20);
  std::vector<double> sfit = {mu0, s20};
  {
    auto s_obj = [&](const std::vector<double>& theta) {
      try {
        return -loglik(sample, exp_vec(theta), ParamSpace::SOnly2, b);
      } catch (const NonFinite&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    const NmResult nm = nelder_mead(s_obj, log_vec(sfit));
    sfit = exp_vec(nm.x);
  }
  if (space == ParamSpace::SOnly2 || space == ParamSpace::SharedDrift2) return sfit;

  double xhat = (b * sfit[0] - sfit[1]) / (2.0 * sfit[0]);
  if (xhat >= b) xhat = 0.5 * b;  // infeasible start; fall back to mid-range
  const double dist = b - xhat;
  const double mu2 = dist / mr.mean;
  const double s2sq = mr.var * mu2 * mu2 * mu2 / dist;
  if (space == ParamSpace::Free4) return {sfit[0], sfit[1], mu2, s2sq};
  return {sfit[0], mu2, sfit[1]};  // EqualVar3: (mu1, mu2, sigma_sq)
}

FitResult fit_space(const Sample& sample, ParamSpace space, double b) {
  return fit_from_start(sample, space, b, starting_values(sample, space, b));
}

FitResult fit(const Sample& sample, const Scenario& scenario, double b) {
  return fit_space(sample, space_of(scenario), b);
}

FitResult fit_s_only(const Sample& sample, double b) {
  return fit_space(sample, ParamSpace::SOnly2, b);
}

std::vector<CiRow> confidence_report(const FitResult& fit) {
  if (fit.observed_info.empty())
    throw std::invalid_argument("confidence_report: fit carries no information matrix");
  const SquareMatrix cov = spd_inverse(fit.observed_info);
  std::vector<CiRow> rows(fit.estimate.size());
  for (size_t i = 0; i < fit.estimate.size(); ++i) {
    const double se = std::sqrt(cov(static_cast<int>(i), static_cast<int>(i)));
    rows[i] = {se, fit.estimate[i] - 1.96 * se, fit.estimate[i] + 1.96 * se};
  }
  return rows;
}

LrtResult lrt_equal_drift(const Sample& sample, double b) {
  if (sample.n() < 4) throw std::invalid_argument("lrt_equal_drift: need at least 4 pairs");
  LrtResult out;
  out.full_fit = fit_space(sample, ParamSpace::EqualVar3, b);
  out.null_fit = fit_space(sample, ParamSpace::SharedDrift2, b);
  if (out.full_fit.loglik < out.null_fit.loglik) {
    // The models are nested; if the 3-parameter optimum fell short,
    // relaunch it from the expanded null optimum and keep the better fit.
    const std::vector<double> from_null = {out.null_fit.estimate[0], out.null_fit.estimate[0],
                                           out.null_fit.estimate[1]};
    FitResult retry = fit_from_start(sample, ParamSpace::EqualVar3, b, from_null);
    if (retry.loglik > out.full_fit.loglik) out.full_fit = retry;
  }
  out.statistic = std::max(0.0, 2.0 * (out.full_fit.loglik - out.null_fit.loglik));
  out.reject = out.statistic > LrtResult::kThreshold;
  return out;
}

}  // namespace pbm
