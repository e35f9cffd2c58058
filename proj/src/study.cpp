#include "pbm/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "pbm/sampler.hpp"

namespace pbm {

namespace {

void parallel_for(int count, unsigned threads, const std::function<void(int)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct RepOutcome {
  bool ok = false;
  std::vector<double> estimate;
  std::vector<double> se;
  std::vector<bool> covers;
  bool lrt_ok = false;
  bool lrt_reject = false;
  bool s_only_ok = false;
  std::vector<double> s_only_estimate;
  std::vector<double> s_only_se;
  std::vector<bool> s_only_covers;
};

std::vector<ParamStat> aggregate(const std::vector<std::string>& names,
                                 const std::vector<double>& truth,
                                 const std::vector<const RepOutcome*>& reps, bool s_only) {
  const size_t d = truth.size();
  std::vector<ParamStat> stats(d);
  for (size_t j = 0; j < d; ++j) {
    std::vector<double> est, se;
    int cover = 0;
    for (const RepOutcome* rep : reps) {
      const auto& e = s_only ? rep->s_only_estimate : rep->estimate;
      const auto& s = s_only ? rep->s_only_se : rep->se;
      const auto& c = s_only ? rep->s_only_covers : rep->covers;
      est.push_back(e[j]);
      se.push_back(s[j]);
      if (c[j]) ++cover;
    }
    const double m = std::accumulate(est.begin(), est.end(), 0.0) / est.size();
    double ss = 0.0;
    for (double x : est) ss += (x - m) * (x - m);
    const double emp = est.size() > 1 ? std::sqrt(ss / (est.size() - 1.0)) : 0.0;
    auto mid = se.begin() + se.size() / 2;
    std::nth_element(se.begin(), mid, se.end());
    double med = *mid;
    if (se.size() % 2 == 0) {
      const double hi = med;
      std::nth_element(se.begin(), mid - 1, mid);
      med = 0.5 * (*(mid - 1) + hi);
    }
    stats[j] = {names[j], truth[j], m, emp, med, 100.0 * cover / est.size()};
  }
  return stats;
}

}  // namespace

std::vector<double> truth_vector(const Model& model, const Scenario& scenario) {
  const double mu1 = model.phase1.mu, s1 = model.phase1.sigma2;
  const double mu2 = model.phase2.mu, s2 = model.phase2.sigma2;
  constexpr double kTol = 1e-9;
  switch (scenario.kind) {
    case ScenarioKind::Unconstrained:
      return {mu1, s1, mu2, s2};
    case ScenarioKind::EqualVariance:
      if (std::abs(s1 - s2) > kTol * std::max(s1, s2))
        throw std::invalid_argument("truth_vector: model variances are not equal");
      return {mu1, mu2, s1};
    case ScenarioKind::ProportionalVariance: {
      const double k = s1 / mu1;
      if (std::abs(s2 - k * mu2) > kTol * std::max(s2, k * mu2))
        throw std::invalid_argument("truth_vector: model variances are not proportional to drifts");
      return {mu1, mu2, k};
    }
  }
  throw std::invalid_argument("truth_vector: unknown scenario");
}

StudySummary run_study(const StudyConfig& cfg) {
  if (cfg.n < 5 || cfg.reps < 1) throw std::invalid_argument("run_study: need n >= 5 and reps >= 1");
  const ParamSpace space = space_of(cfg.scenario);
  const std::vector<double> truth = truth_vector(cfg.model, cfg.scenario);
  const std::vector<double> truth_s = {cfg.model.phase1.mu, cfg.model.phase1.sigma2};
  const PairSampler sampler(cfg.model);  // immutable, shared across workers

  std::vector<RepOutcome> outcomes(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](int rep) {
    RepOutcome& out = outcomes[rep];
    try {
      RngStream rng(cfg.seed, static_cast<uint64_t>(rep));
      std::vector<ObservationPair> pairs(cfg.n);
      for (auto& p : pairs) p = sampler.sample(rng);
      const Sample sample(std::move(pairs));

      FitResult fr = fit_space(sample, space, cfg.model.boundary);
      if (!fr.converged) return;
      out.estimate = fr.estimate;
      out.se = fr.se;
      out.covers.resize(truth.size());
      for (size_t j = 0; j < truth.size(); ++j)
        out.covers[j] = fr.ci95[j].first <= truth[j] && truth[j] <= fr.ci95[j].second;

      if (cfg.compute_lrt) {
        LrtResult lrt;
        if (space == ParamSpace::EqualVar3) {
          // The scenario fit already is the full model of the test.
          lrt.full_fit = fr;
          lrt.null_fit = fit_space(sample, ParamSpace::SharedDrift2, cfg.model.boundary);
          if (lrt.full_fit.loglik < lrt.null_fit.loglik) {
            lrt = lrt_equal_drift(sample, cfg.model.boundary);
          } else {
            lrt.statistic = std::max(0.0, 2.0 * (lrt.full_fit.loglik - lrt.null_fit.loglik));
            lrt.reject = lrt.statistic > LrtResult::kThreshold;
          }
        } else {
          lrt = lrt_equal_drift(sample, cfg.model.boundary);
        }
        out.lrt_ok = true;
        out.lrt_reject = lrt.reject;
      }
      if (cfg.compute_s_only) {
        FitResult sf = fit_s_only(sample, cfg.model.boundary);
        if (sf.converged) {
          out.s_only_ok = true;
          out.s_only_estimate = sf.estimate;
          out.s_only_se = sf.se;
          out.s_only_covers.resize(2);
          for (size_t j = 0; j < 2; ++j)
            out.s_only_covers[j] = sf.ci95[j].first <= truth_s[j] && truth_s[j] <= sf.ci95[j].second;
        }
      }
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
  });

  std::vector<const RepOutcome*> good;
  for (const auto& o : outcomes)
    if (o.ok) good.push_back(&o);

  StudySummary summary;
  summary.reps = cfg.reps;
  summary.n = cfg.n;
  summary.seed = cfg.seed;
  summary.failed_replications = cfg.reps - static_cast<int>(good.size());
  if (good.empty()) throw StudyFailure("run_study: every replication failed");
  summary.params = aggregate(param_names(space), truth, good, false);

  if (cfg.compute_lrt) {
    int n_lrt = 0, n_reject = 0;
    for (const RepOutcome* o : good) {
      if (!o->lrt_ok) continue;
      ++n_lrt;
      if (o->lrt_reject) ++n_reject;
    }
    if (n_lrt > 0) summary.lrt_rejection_percent = 100.0 * n_reject / n_lrt;
  }
  if (cfg.compute_s_only) {
    std::vector<const RepOutcome*> good_s;
    for (const RepOutcome* o : good)
      if (o->s_only_ok) good_s.push_back(o);
    if (!good_s.empty()) {
      summary.s_only_params =
          aggregate({"mu1_s_only", "sigma1_sq_s_only"}, truth_s, good_s, true);
    }
  }
  if (summary.failed_replications > 0.05 * cfg.reps)
    throw StudyFailure("run_study: more than 5% of replications failed (" +
                       std::to_string(summary.failed_replications) + " of " +
                       std::to_string(cfg.reps) + ")");
  return summary;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "mu1") return SweepAxis::Mu1;
  if (name == "mu2") return SweepAxis::Mu2;
  if (name == "sigma2") return SweepAxis::Sigma2;
  if (name == "k") return SweepAxis::K;
  throw std::invalid_argument("unknown sweep axis: " + name);
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Mu1: return "mu1";
    case SweepAxis::Mu2: return "mu2";
    case SweepAxis::Sigma2: return "sigma2";
    case SweepAxis::K: return "k";
  }
  return "?";
}

StudyConfig apply_axis(StudyConfig cfg, SweepAxis axis, double value) {
  if (!(value > 0.0)) throw std::invalid_argument("apply_axis: values must be positive");
  const bool proportional = cfg.scenario.kind == ScenarioKind::ProportionalVariance;
  const double k = proportional ? cfg.model.phase1.sigma2 / cfg.model.phase1.mu : 0.0;
  Model& m = cfg.model;
  switch (axis) {
    case SweepAxis::Mu1:
      m.phase1.mu = value;
      if (proportional) m.phase1.sigma2 = k * value;
      break;
    case SweepAxis::Mu2:
      m.phase2.mu = value;
      if (proportional) m.phase2.sigma2 = k * value;
      break;
    case SweepAxis::Sigma2:
      if (proportional)
        throw std::invalid_argument("apply_axis: sigma2 axis conflicts with proportional scenario");
      m.phase1.sigma2 = value;
      m.phase2.sigma2 = value;
      break;
    case SweepAxis::K:
      m.phase1.sigma2 = value * m.phase1.mu;
      m.phase2.sigma2 = value * m.phase2.mu;
      if (proportional) cfg.scenario.k = value;
      break;
  }
  return cfg;
}

std::vector<StudySummary> run_sweep(const StudyConfig& base, SweepAxis axis,
                                    const std::vector<double>& values) {
  std::vector<StudySummary> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(run_study(apply_axis(base, axis, v)));
  return out;
}

std::vector<double> log_spaced_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 1)
    throw std::invalid_argument("log_spaced_grid: need 0 < lo < hi and points >= 1");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = std::log(hi / lo) / (points - 1);
  for (int i = 0; i < points; ++i) grid[i] = lo * std::exp(step * i);
  return grid;
}

}  // namespace pbm
