#pragma once

// Shared test machinery: summary statistics, Kolmogorov-Smirnov and
// chi-square helpers, and independent sampling oracles that must not
// share code paths with the library routines they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "pbm/rng.hpp"

namespace testutil {

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / (v.size() - 1.0);
}

inline double sd(const std::vector<double>& v) { return std::sqrt(variance(v)); }

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double covariance(const std::vector<double>& a, const std::vector<double>& b) {
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sab += (a[i] - ma) * (b[i] - mb);
  return sab / (a.size() - 1.0);
}

// One-sample KS statistic against a CDF.
inline double ks_statistic(std::vector<double> draws, const std::function<double(double)>& cdf) {
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    d = std::max(d, std::abs(f - (i + 1) / n));
    d = std::max(d, std::abs(f - i / n));
  }
  return d;
}

// Two-sample KS statistic.
inline double ks_statistic_two(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

// Asymptotic KS critical values at level 0.01.
inline double ks_crit_01(size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }
inline double ks_crit_01_two(size_t n, size_t m) {
  return 1.6276 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

// chi-square upper 1% critical value (Wilson-Hilferty approximation).
inline double chi2_crit_01(int df) {
  const double z = 2.3263478740408408;  // Phi^{-1}(0.99)
  const double a = 2.0 / (9.0 * df);
  const double c = 1.0 - a + z * std::sqrt(a);
  return df * c * c * c;
}

// Two-sample chi-square homogeneity test on a 2-D quantile grid built
// from the pooled sample.  Returns the statistic; df = cells - 1.
struct Chi2Result {
  double statistic;
  int df;
};

inline Chi2Result chi2_two_sample_2d(const std::vector<std::pair<double, double>>& a,
                                     const std::vector<std::pair<double, double>>& b,
                                     int bins_per_axis) {
  std::vector<double> xs, ys;
  xs.reserve(a.size() + b.size());
  ys.reserve(a.size() + b.size());
  for (const auto& p : a) { xs.push_back(p.first); ys.push_back(p.second); }
  for (const auto& p : b) { xs.push_back(p.first); ys.push_back(p.second); }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  auto edges = [&](const std::vector<double>& v) {
    std::vector<double> e(bins_per_axis - 1);
    for (int k = 1; k < bins_per_axis; ++k) e[k - 1] = v[v.size() * k / bins_per_axis];
    return e;
  };
  const std::vector<double> ex = edges(xs), ey = edges(ys);
  auto cell = [&](const std::pair<double, double>& p) {
    const int i = static_cast<int>(std::upper_bound(ex.begin(), ex.end(), p.first) - ex.begin());
    const int j = static_cast<int>(std::upper_bound(ey.begin(), ey.end(), p.second) - ey.begin());
    return i * bins_per_axis + j;
  };
  const int cells = bins_per_axis * bins_per_axis;
  std::vector<double> ca(cells, 0.0), cb(cells, 0.0);
  for (const auto& p : a) ca[cell(p)] += 1.0;
  for (const auto& p : b) cb[cell(p)] += 1.0;
  const double ra = std::sqrt(static_cast<double>(b.size()) / a.size());
  const double rb = 1.0 / ra;
  double stat = 0.0;
  int used = 0;
  for (int c = 0; c < cells; ++c) {
    const double tot = ca[c] + cb[c];
    if (tot == 0.0) continue;
    ++used;
    const double d = ca[c] * ra - cb[c] * rb;
    stat += d * d / tot;
  }
  return {stat, used - 1};
}

// Independent oracle for S: the length-biased first passage interval is
// the reciprocal of an IG variable (if T ~ IG(m, lam), the length-biased
// T~ has 1/T~ ~ IG(1/m, lam/m^2)), and S is uniform inside it.  Uses its
// own IG transform so it shares nothing with the library's CDF-inversion
// path.
inline double oracle_ig_draw(double mean, double shape, pbm::RngStream& rng) {
  const double z = rng.normal();
  const double y = z * z;
  const double w = mean * y / (2.0 * shape);
  const double x = mean / (1.0 + w + std::sqrt(w * (w + 2.0)));
  return rng.uniform() <= mean / (mean + x) ? x : mean * mean / x;
}

inline double oracle_length_biased_fpt(double b, double mu, double sigma2, pbm::RngStream& rng) {
  const double m = b / mu;
  const double lam = b * b / sigma2;
  return 1.0 / oracle_ig_draw(1.0 / m, lam / (m * m), rng);
}

inline double oracle_s_draw(double b, double mu, double sigma2, pbm::RngStream& rng) {
  return rng.uniform() * oracle_length_biased_fpt(b, mu, sigma2, rng);
}

}  // namespace testutil
