#pragma once

#include <stdexcept>
#include <string>

#include "pbm/errors.hpp"

namespace pbm {

// One regime of the latent Wiener process: drift mu > 0 and squared
// diffusion coefficient sigma2 > 0.  Positive drift makes the first
// passage time through the boundary finite with probability 1, with
// T ~ IG(B/mu, B^2/sigma2).
struct WienerPhase {
  double mu;
  double sigma2;

  WienerPhase(double mu_, double sigma2_) : mu(mu_), sigma2(sigma2_) {
    if (!(mu > 0.0) || !(sigma2 > 0.0))
      throw std::invalid_argument("WienerPhase: mu and sigma2 must be positive");
  }
};

// Boundary level plus the pre-intervention (phase1) and
// post-intervention (phase2) regimes.  The process starts at 0; space
// homogeneity makes any other start redundant.  Parameter validation is
// centralized here: density code assumes a valid Model.
struct Model {
  double boundary;
  WienerPhase phase1;
  WienerPhase phase2;

  Model(double boundary_, WienerPhase phase1_, WienerPhase phase2_)
      : boundary(boundary_), phase1(phase1_), phase2(phase2_) {
    if (!(boundary > 0.0)) throw std::invalid_argument("Model: boundary must be positive");
  }
};

// Which parameter constraint is in force when fitting.
enum class ScenarioKind { Unconstrained, EqualVariance, ProportionalVariance };

struct Scenario {
  ScenarioKind kind = ScenarioKind::Unconstrained;
  double k = 0.0;  // sigma2_i = k * mu_i; meaningful only for ProportionalVariance

  static Scenario unconstrained() { return {ScenarioKind::Unconstrained, 0.0}; }
  static Scenario equal_variance() { return {ScenarioKind::EqualVariance, 0.0}; }
  static Scenario proportional(double k) {
    if (!(k > 0.0)) throw std::invalid_argument("Scenario: k must be positive");
    return {ScenarioKind::ProportionalVariance, k};
  }
};

// Model with sigma2_i = k * mu_i for both phases.
Model make_proportional_model(double mu1, double mu2, double k, double boundary);

// One measurement: time s from process start to the intervention and
// time r from the intervention to the boundary crossing.
struct ObservationPair {
  double s;
  double r;
};

// ---------------------------------------------------------------------------
// Inverse Gaussian helpers, parameterized by (mean, shape).

double ig_pdf(double t, double mean, double shape);
double ig_log_pdf(double t, double mean, double shape);
double ig_cdf(double t, double mean, double shape);

// P(T > s) for the first passage time T of the phase through level b.
double survival_fpt(double s, const WienerPhase& phase, double b);

// ---------------------------------------------------------------------------
// Closed-form densities and moments of the pre-intervention interval S,
// the position X(0) at the intervention, the post-intervention interval
// R, and the pair (S, R).

// f_S(s) = survival_fpt(s) * mu1 / b  (S is the backward recurrence time
// of T, hence length biased).
double pdf_s(double s, const WienerPhase& phase1, double b);

struct SMoments {
  double mean;
  double variance;
  double cv;
};
SMoments moments_s(const WienerPhase& phase1, double b);

// Sub-density of the process at time 0 in the presence of the absorbing
// boundary, started at 0 a time s earlier.  Integrates over x to
// survival_fpt(s).
double pdf_x0_absorbed(double x, double s, const WienerPhase& phase1, double b);

// Unconditional density of X(0) (two-piece exponential form).
double pdf_x0(double x, const WienerPhase& phase1, double b);

struct X0Moments {
  double mean;
  double variance;
};
X0Moments moments_x0(const WienerPhase& phase1, double b);

// Marginal density of R.
double pdf_r(double r, const Model& model);

// Joint density of (S, R) and its logarithm.  Values at s == 0 or
// r == 0 are continuous extensions so quadrature may touch the axes;
// elsewhere the log form is evaluated entirely in the log domain.
double pdf_joint_sr(double s, double r, const Model& model);
double log_pdf_joint_sr(double s, double r, const Model& model);

// Proportional special case sigma2_i = k mu_i:
// f(s,r) = (mu1 mu2 / b) f_{IG(b, b^2/k)}(mu1 s + mu2 r).
double pdf_joint_sr_proportional(double s, double r, double mu1, double mu2, double k, double b);
double log_pdf_joint_sr_proportional(double s, double r, double mu1, double mu2, double k,
                                     double b);

// Closed-form summaries in the proportional case.  cv_s and cv_r are the
// same expression (B+3k)/(sqrt(3)(B+k)), independent of the drifts, and
// are assigned from a single evaluation.
struct ProportionalSummaries {
  double mean_s, var_s, cv_s;
  double mean_r, var_r, cv_r;
  double cov_sr, corr_sr;
};
ProportionalSummaries special_case_summaries(double mu1, double mu2, double k, double b);

// ---------------------------------------------------------------------------
// Quadrature-based summaries for the general case, where no closed forms
// exist (CV(R), Cov, Corr).  rel_tol applies to each moment integral.

struct JointSummaries {
  double mean_s, sd_s;
  double mean_r, sd_r, cv_r;
  double cov_sr, corr_sr;
};
JointSummaries numeric_joint_summaries(const Model& model, double rel_tol = 1e-5);

// Truncation points for semi-infinite integrals: the point where the
// integrand's envelope has fallen below `tail` of its peak.
// For S the envelope is the IG survival function itself; for R the
// closed-form density is probed directly (its tail rate is not that of
// the phase-2 IG when mu2 sigma1^2 >> mu1 sigma2^2).
double s_upper_cutoff(const WienerPhase& phase1, double b, double tail = 1e-14);
double r_upper_cutoff(const Model& model, double tail = 1e-14);

}  // namespace pbm
