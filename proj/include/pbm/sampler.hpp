#pragma once

#include <vector>

#include "pbm/model.hpp"
#include "pbm/rng.hpp"

namespace pbm {

// One draw from IG(mean, shape) by the Michael-Schucany-Haas
// transformation-with-rejection method (exact, constant cost).
double sample_ig(double mean, double shape, RngStream& rng);

// Distribution of S for a fixed (phase1, boundary): F_S is integrated
// once onto a monotone grid (quadrature rel_tol 1e-10) up to the point
// where the IG survival envelope drops below 1e-14, then draws invert
// the memoized CDF with bracketed root finding.  The object is immutable
// after construction and safe to share across threads.
class SDistribution {
 public:
  SDistribution(const WienerPhase& phase1, double boundary);

  double cdf(double s) const;
  double quantile(double u) const;
  double sample(RngStream& rng) const { return quantile(rng.uniform()); }
  double cutoff() const { return nodes_.back(); }

 private:
  WienerPhase phase_;
  double b_;
  std::vector<double> nodes_;
  std::vector<double> cdf_;
};

// Draw from the conditional law of X(0) given S = s (inverse transform
// on the closed-form absorbed CDF F^a(x, s) / survival(s)).
double sample_x0_given_s(double s, const WienerPhase& phase1, double b, RngStream& rng);

// Exact simulation of one (s, r) pair: S by CDF inversion, X(0) | S by
// CDF inversion, then R ~ IG((B - x)/mu2, (B - x)^2/sigma2^2).
class PairSampler {
 public:
  explicit PairSampler(const Model& model) : model_(model), sdist_(model.phase1, model.boundary) {}

  ObservationPair sample(RngStream& rng) const;
  const Model& model() const { return model_; }
  const SDistribution& s_distribution() const { return sdist_; }

 private:
  Model model_;
  SDistribution sdist_;
};

// Configuration of the discretized-path oracle.  dt must satisfy
// dt <= 1e-2 * E[T] for phase 1; horizon is the number of complete
// renewal cycles simulated before the inspection time is drawn.
struct OracleConfig {
  double dt = 1e-3;
  int horizon = 64;
};

// Brute-force (S, R) draw that shares no code with the closed forms:
// consecutive phase-1 first-passage cycles are simulated by
// Euler-Maruyama steps, a uniform inspection time over the simulated
// span picks the (length-biased) cycle, S is the time since that
// cycle's start, and the path continues from its current value under
// phase-2 parameters until it crosses the boundary, giving R.  Boundary
// crossing is detected at the first grid point >= B (no bridge
// correction), so first passage times carry a positive O(sqrt(dt)) bias.
ObservationPair oracle_sample_pair(const Model& model, const OracleConfig& cfg, RngStream& rng);

}  // namespace pbm
