#include "pbm/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbm/numerics.hpp"

namespace pbm {

namespace {

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(uint64_t seed, uint64_t stream_id) {
  uint64_t state = seed;
  (void)splitmix64(state);
  state ^= 0xD2B74407B1CE6E93ULL * (stream_id + 1);
  for (auto& word : s_) word = splitmix64(state);
}

uint64_t RngStream::next_u64() {
  const uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double sample_ig(double mean, double shape, RngStream& rng) {
  if (!(mean > 0.0) || !(shape > 0.0))
    throw std::invalid_argument("sample_ig: mean and shape must be positive");
  const double y = [&] {
    const double z = rng.normal();
    return z * z;
  }();
  const double w = mean * y / (2.0 * shape);
  // x = mean (1 + w - sqrt(w^2 + 2w)), computed via the conjugate to
  // avoid cancellation for large w.
  const double x = mean / (1.0 + w + std::sqrt(w * (w + 2.0)));
  if (rng.uniform() <= mean / (mean + x)) return x;
  return mean * mean / x;
}

SDistribution::SDistribution(const WienerPhase& phase1, double boundary)
    : phase_(phase1), b_(boundary) {
  const double hi = s_upper_cutoff(phase_, b_, 1e-14);
  constexpr int kSegments = 1024;
  nodes_.resize(kSegments + 1);
  cdf_.resize(kSegments + 1);
  nodes_[0] = 0.0;
  cdf_[0] = 0.0;
  auto f = [this](double s) { return pdf_s(s, phase_, b_); };
  for (int i = 1; i <= kSegments; ++i) {
    nodes_[i] = hi * i / kSegments;
    cdf_[i] = cdf_[i - 1] + integrate(f, nodes_[i - 1], nodes_[i], 1e-10);
  }
}

double SDistribution::cdf(double s) const {
  if (s <= 0.0) return 0.0;
  if (s >= nodes_.back()) return cdf_.back();
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), s);
  const size_t i = static_cast<size_t>(it - nodes_.begin()) - 1;
  auto f = [this](double t) { return pdf_s(t, phase_, b_); };
  return cdf_[i] + integrate(f, nodes_[i], s, 1e-10);
}

double SDistribution::quantile(double u) const {
  if (!(u > 0.0) || !(u < 1.0)) throw std::invalid_argument("quantile: u must lie in (0,1)");
  if (u >= cdf_.back()) return nodes_.back();  // tail mass beyond the grid is < 1e-13
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const size_t i = static_cast<size_t>(it - cdf_.begin());  // cdf_[i-1] < u <= cdf_[i]
  const double lo = nodes_[i - 1], hi = nodes_[i];
  auto f = [this](double t) { return pdf_s(t, phase_, b_); };
  auto g = [&](double s) {
    if (s <= lo) return cdf_[i - 1] - u;
    return cdf_[i - 1] + integrate(f, lo, s, 1e-10) - u;
  };
  const double s = find_root(g, lo, hi, 1e-12);
  return std::max(s, std::numeric_limits<double>::min());
}

double sample_x0_given_s(double s, const WienerPhase& phase1, double b, RngStream& rng) {
  if (!(s > 0.0)) throw std::invalid_argument("sample_x0_given_s: s must be positive");
  const double mu = phase1.mu, s2 = phase1.sigma2;
  const double sd = std::sqrt(s2 * s);
  const double a = 2.0 * mu * b / s2;
  // Absorbed CDF F^a(x, s) = Phi((x - mu s)/sd) - e^a Phi((x - 2b - mu s)/sd).
  auto absorbed_cdf = [&](double x) {
    const double l1 = log_normal_cdf((x - mu * s) / sd);
    const double l2 = a + log_normal_cdf((x - 2.0 * b - mu * s) / sd);
    return std::max(std::exp(l1) * (-std::expm1(l2 - l1)), 0.0);
  };
  const double target = rng.uniform() * survival_fpt(s, phase1, b);
  double lo = std::min(0.0, mu * s - 10.0 * sd);
  int guard = 0;
  while (absorbed_cdf(lo) > target && guard++ < 100) lo -= 5.0 * sd;
  const double x =
      find_root([&](double v) { return absorbed_cdf(v) - target; }, lo, b, 1e-12);
  return std::min(x, std::nextafter(b, -std::numeric_limits<double>::infinity()));
}

ObservationPair PairSampler::sample(RngStream& rng) const {
  const double s = sdist_.sample(rng);
  const double x = sample_x0_given_s(s, model_.phase1, model_.boundary, rng);
  const double d = model_.boundary - x;
  const double r =
      sample_ig(d / model_.phase2.mu, d * d / model_.phase2.sigma2, rng);
  return {s, r};
}

ObservationPair oracle_sample_pair(const Model& model, const OracleConfig& cfg, RngStream& rng) {
  const double b = model.boundary;
  const double et1 = b / model.phase1.mu;
  if (!(cfg.dt > 0.0) || cfg.dt > 1e-2 * et1)
    throw std::invalid_argument("oracle_sample_pair: dt must lie in (0, 1e-2 * E[T]]");
  if (cfg.horizon < 10) throw std::invalid_argument("oracle_sample_pair: horizon must be >= 10");

  constexpr uint64_t kMaxCycleSteps = 100000000ULL;
  const double drift1 = model.phase1.mu * cfg.dt;
  const double noise1 = std::sqrt(model.phase1.sigma2 * cfg.dt);

  // Phase-1 renewal cycles; snapshot the stream at each cycle start so
  // the inspected cycle can be replayed bit-exactly.
  std::vector<double> duration(cfg.horizon);
  std::vector<RngStream> start_state;
  start_state.reserve(cfg.horizon);
  double total = 0.0;
  for (int c = 0; c < cfg.horizon; ++c) {
    start_state.push_back(rng);
    double x = 0.0;
    uint64_t steps = 0;
    while (x < b) {
      x += drift1 + noise1 * rng.normal();
      if (++steps > kMaxCycleSteps)
        throw HorizonTooShort("oracle_sample_pair: renewal cycle did not complete");
    }
    duration[c] = static_cast<double>(steps) * cfg.dt;
    total += duration[c];
  }

  // Uniform inspection time over the simulated span (length-biased
  // cycle choice, uniform position within the cycle).
  const double tau = rng.uniform() * total;
  int cycle = 0;
  double before = 0.0;
  while (cycle + 1 < cfg.horizon && before + duration[cycle] <= tau) before += duration[cycle++];
  double offset = tau - before;
  if (offset >= duration[cycle]) offset = std::nextafter(duration[cycle], 0.0);
  const auto grid_index = static_cast<uint64_t>(offset / cfg.dt);

  // Replay the inspected cycle up to the inspection grid point.  The
  // replay consumes a copy of old draws; phase 2 below continues from
  // the main stream, whose upcoming draws are untouched by pass one.
  RngStream replay = start_state[static_cast<size_t>(cycle)];
  double x = 0.0;
  for (uint64_t k = 0; k < grid_index; ++k) x += drift1 + noise1 * replay.normal();

  const double drift2 = model.phase2.mu * cfg.dt;
  const double noise2 = std::sqrt(model.phase2.sigma2 * cfg.dt);
  uint64_t steps2 = 0;
  while (x < b) {
    x += drift2 + noise2 * rng.normal();
    if (++steps2 > kMaxCycleSteps)
      throw HorizonTooShort("oracle_sample_pair: post-intervention path did not cross");
  }
  const double s = std::max(offset, 0.5 * cfg.dt);
  const double r = static_cast<double>(steps2) * cfg.dt;
  return {s, r};
}

}  // namespace pbm
