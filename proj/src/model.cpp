#include "pbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pbm/numerics.hpp"

namespace pbm {

namespace {

constexpr double kLog2Pi = 1.8378770664093455;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sq(double x) { return x * x; }

// exp(a) - exp(b) without overflow when both exponents are large in
// magnitude but close to each other.
double exp_diff(double a, double b) {
  if (a == -kInf && b == -kInf) return 0.0;
  if (a >= b) return std::exp(a) * (-std::expm1(b - a));
  return -std::exp(b) * (-std::expm1(a - b));
}

}  // namespace

Model make_proportional_model(double mu1, double mu2, double k, double boundary) {
  if (!(k > 0.0)) throw std::invalid_argument("make_proportional_model: k must be positive");
  return Model(boundary, WienerPhase(mu1, k * mu1), WienerPhase(mu2, k * mu2));
}

double ig_log_pdf(double t, double mean, double shape) {
  if (t <= 0.0) return -kInf;
  return 0.5 * (std::log(shape) - kLog2Pi - 3.0 * std::log(t)) -
         shape * sq(t - mean) / (2.0 * sq(mean) * t);
}

double ig_pdf(double t, double mean, double shape) { return std::exp(ig_log_pdf(t, mean, shape)); }

double ig_cdf(double t, double mean, double shape) {
  if (t <= 0.0) return 0.0;
  const double rs = std::sqrt(shape / t);
  const double z1 = rs * (t / mean - 1.0);
  const double l2 = 2.0 * shape / mean + log_normal_cdf(-rs * (t / mean + 1.0));
  const double v = normal_cdf(z1) + std::exp(l2);
  return std::clamp(v, 0.0, 1.0);
}

double survival_fpt(double s, const WienerPhase& phase, double b) {
  if (s <= 0.0) return 1.0;
  const double sd = std::sqrt(phase.sigma2 * s);
  const double l1 = log_normal_cdf((b - phase.mu * s) / sd);
  const double l2 = 2.0 * phase.mu * b / phase.sigma2 + log_normal_cdf((-b - phase.mu * s) / sd);
  const double v = exp_diff(l1, l2);
  return std::clamp(v, 0.0, 1.0);
}

double pdf_s(double s, const WienerPhase& phase1, double b) {
  if (s < 0.0) return 0.0;
  return survival_fpt(s, phase1, b) * phase1.mu / b;
}

SMoments moments_s(const WienerPhase& phase1, double b) {
  const double mu = phase1.mu, s2 = phase1.sigma2;
  SMoments m;
  m.mean = (b * mu + s2) / (2.0 * mu * mu);
  m.variance = sq((b * mu + 3.0 * s2) / (2.0 * mu * mu)) / 3.0;
  m.cv = (b * mu + 3.0 * s2) / (std::sqrt(3.0) * (b * mu + s2));
  return m;
}

double pdf_x0_absorbed(double x, double s, const WienerPhase& phase1, double b) {
  if (!(x < b) || s <= 0.0) return 0.0;
  const double v = phase1.sigma2 * s;
  const double e1 = -sq(x - phase1.mu * s) / (2.0 * v);
  const double e2 = 2.0 * phase1.mu * b / phase1.sigma2 - sq(x - 2.0 * b - phase1.mu * s) / (2.0 * v);
  // e2 - e1 = -(2 b / sigma2) (b - x) / s <= 0, so this never overflows.
  const double val = std::exp(e1) * (-std::expm1(e2 - e1)) / std::sqrt(2.0 * M_PI * v);
  return std::max(val, 0.0);
}

double pdf_x0(double x, const WienerPhase& phase1, double b) {
  if (!(x < b)) return 0.0;
  const double mu = phase1.mu, s2 = phase1.sigma2;
  if (x >= 0.0) return (-std::expm1(2.0 * mu * (x - b) / s2)) / b;
  return std::exp(2.0 * mu * x / s2) * (-std::expm1(-2.0 * mu * b / s2)) / b;
}

X0Moments moments_x0(const WienerPhase& phase1, double b) {
  const double mu = phase1.mu, s2 = phase1.sigma2;
  return {(b * mu - s2) / (2.0 * mu), (sq(b * mu) + 3.0 * sq(s2)) / (12.0 * mu * mu)};
}

double pdf_r(double r, const Model& model) {
  const double mu1 = model.phase1.mu, s1 = model.phase1.sigma2;
  const double mu2 = model.phase2.mu, s2 = model.phase2.sigma2;
  const double b = model.boundary;
  if (r < 0.0) return 0.0;
  if (r == 0.0) return mu1 * s2 / (b * s1);  // continuous extension
  const double sqr = std::sqrt(r);
  const double sd2 = std::sqrt(s2);
  const double term1 =
      (mu2 / b) * (normal_cdf((b - mu2 * r) / (sd2 * sqr)) - normal_cdf(-mu2 * sqr / sd2));
  const double c0 = (mu2 * s1 - 2.0 * mu1 * s2) / (b * s1);
  const double e = 2.0 * mu1 * r * (mu1 * s2 - mu2 * s1) / sq(s1);
  const double la = 2.0 * mu1 * b / s1 +
                    log_normal_cdf(-(b * s1 + 2.0 * r * mu1 * s2 - mu2 * r * s1) / (s1 * sd2 * sqr));
  const double lb = log_normal_cdf(-(2.0 * mu1 * r * s2 - mu2 * r * s1) / (s1 * sd2 * sqr));
  const double val = term1 + c0 * exp_diff(e + la, e + lb);
  return std::max(val, 0.0);
}

double log_pdf_joint_sr(double s, double r, const Model& model) {
  const double mu1 = model.phase1.mu, s1 = model.phase1.sigma2;
  const double mu2 = model.phase2.mu, s2 = model.phase2.sigma2;
  const double b = model.boundary;
  if (s < 0.0 || r < 0.0) return -kInf;
  if (s == 0.0 && r == 0.0) return -kInf;
  const double v = s1 * s + s2 * r;
  if (s == 0.0) {
    // The bracket below tends to b*s2 as s -> 0+.
    return std::log(mu1 * s2) - 0.5 * (kLog2Pi + 3.0 * std::log(v)) - sq(b - mu2 * r) / (2.0 * v);
  }
  const double base =
      std::log(mu1 / b) - 0.5 * (kLog2Pi + 3.0 * std::log(v)) - sq(b - mu1 * s - mu2 * r) / (2.0 * v);
  const double coef_a = (b - mu1 * s) * s2 + s * mu2 * s1;
  const double coef_c = (-b - mu1 * s) * s2 + mu2 * s1 * s;
  const double w = std::sqrt(r) / (std::sqrt(s1) * std::sqrt(s2) * std::sqrt(s * v));
  const double e = 2.0 * r * b * (mu1 * s2 - mu2 * s1) / (s1 * v);
  const double l1 =
      coef_a != 0.0 ? std::log(std::abs(coef_a)) + log_normal_cdf(coef_a * w) : -kInf;
  const double l2 =
      coef_c != 0.0 ? std::log(std::abs(coef_c)) + e + log_normal_cdf(coef_c * w) : -kInf;
  const double m = std::max(l1, l2);
  if (m == -kInf) return -kInf;
  const double sign1 = coef_a >= 0.0 ? 1.0 : -1.0;
  const double sign2 = coef_c >= 0.0 ? 1.0 : -1.0;
  const double bracket = sign1 * std::exp(l1 - m) - sign2 * std::exp(l2 - m);
  if (!(bracket > 0.0)) return -kInf;  // density underflow in a far tail
  return base + m + std::log(bracket);
}

double pdf_joint_sr(double s, double r, const Model& model) {
  return std::exp(log_pdf_joint_sr(s, r, model));
}

double log_pdf_joint_sr_proportional(double s, double r, double mu1, double mu2, double k,
                                     double b) {
  if (s < 0.0 || r < 0.0) return -kInf;
  const double w = mu1 * s + mu2 * r;
  if (w <= 0.0) return -kInf;
  return std::log(mu1 * mu2) - 0.5 * (kLog2Pi + std::log(k) + 3.0 * std::log(w)) -
         sq(b - w) / (2.0 * k * w);
}

double pdf_joint_sr_proportional(double s, double r, double mu1, double mu2, double k, double b) {
  return std::exp(log_pdf_joint_sr_proportional(s, r, mu1, mu2, k, b));
}

ProportionalSummaries special_case_summaries(double mu1, double mu2, double k, double b) {
  if (!(mu1 > 0.0) || !(mu2 > 0.0) || !(k > 0.0) || !(b > 0.0))
    throw std::invalid_argument("special_case_summaries: all arguments must be positive");
  ProportionalSummaries out;
  const double cv = (b + 3.0 * k) / (std::sqrt(3.0) * (b + k));
  out.mean_s = (b + k) / (2.0 * mu1);
  out.var_s = sq(b + 3.0 * k) / (12.0 * mu1 * mu1);
  out.mean_r = (b + k) / (2.0 * mu2);
  out.var_r = sq(b + 3.0 * k) / (12.0 * mu2 * mu2);
  out.cv_s = cv;
  out.cv_r = cv;
  out.cov_sr = (3.0 * k * k - b * b) / (12.0 * mu1 * mu2);
  out.corr_sr = (3.0 * k * k - b * b) / sq(b + 3.0 * k);
  return out;
}

double s_upper_cutoff(const WienerPhase& phase1, double b, double tail) {
  double lo = moments_s(phase1, b).mean;
  double hi = 2.0 * lo;
  while (survival_fpt(hi, phase1, b) > tail) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return hi;
  }
  if (survival_fpt(lo, phase1, b) <= tail) return lo;
  return find_root([&](double s) { return survival_fpt(s, phase1, b) - tail; }, lo, hi, 1e-6 * hi);
}

double r_upper_cutoff(const Model& model, double tail) {
  // Probe the closed form; include a polynomial factor so that moment
  // integrands r^2 f_R(r) are covered by the same cutoff.
  const double x0 = std::min(moments_x0(model.phase1, model.boundary).mean, 0.0);
  const double scale =
      (model.boundary - x0) / model.phase2.mu + moments_s(model.phase2, model.boundary).mean;
  double fmax = 0.0;
  for (int i = 0; i <= 64; ++i) {
    const double r = scale * std::pow(10.0, -3.0 + 3.0 * i / 64.0);
    fmax = std::max(fmax, pdf_r(r, model));
  }
  double r = scale;
  for (int iter = 0; iter < 400; ++iter) {
    if (pdf_r(r, model) * (1.0 + r * r) <= tail * fmax) return r;
    r *= 1.3;
  }
  return r;
}

JointSummaries numeric_joint_summaries(const Model& model, double rel_tol) {
  JointSummaries out;
  const SMoments sm = moments_s(model.phase1, model.boundary);
  out.mean_s = sm.mean;
  out.sd_s = std::sqrt(sm.variance);

  const double rcut = r_upper_cutoff(model);
  const double inner_tol = std::max(rel_tol / 8.0, 1e-10);
  auto fr = [&](double r) { return pdf_r(r, model); };
  const double er = integrate([&](double r) { return r * fr(r); }, 0.0, rcut, inner_tol);
  const double er2 = integrate([&](double r) { return r * r * fr(r); }, 0.0, rcut, inner_tol);
  out.mean_r = er;
  out.sd_r = std::sqrt(std::max(er2 - er * er, 0.0));
  out.cv_r = out.sd_r / out.mean_r;

  const double scut = s_upper_cutoff(model.phase1, model.boundary);
  auto inner = [&](double s) {
    return integrate([&](double r) { return r * pdf_joint_sr(s, r, model); }, 0.0, rcut, inner_tol);
  };
  const double esr = integrate([&](double s) { return s * inner(s); }, 0.0, scut, rel_tol);
  out.cov_sr = esr - out.mean_s * out.mean_r;
  out.corr_sr = out.cov_sr / (out.sd_s * out.sd_r);
  return out;
}

}  // namespace pbm
