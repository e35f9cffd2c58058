#include "pbm/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pbm {

namespace {
constexpr double kPenalty = 1e300;
}

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, const NmOptions& opts) {
  const int n = static_cast<int>(x0.size());
  NmResult res;
  int evals = 0;
  auto eval = [&](const std::vector<double>& p) {
    ++evals;
    const double v = f(p);
    return std::isfinite(v) ? v : kPenalty;
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fx(n + 1);
  for (int j = 1; j <= n; ++j) {
    double step = opts.init_step * std::max(std::abs(x0[j - 1]), 1.0);
    if (step == 0.0) step = opts.init_step;
    simplex[j][j - 1] += step;
  }
  for (int j = 0; j <= n; ++j) fx[j] = eval(simplex[j]);

  std::vector<int> order(n + 1);
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
  };

  std::vector<double> centroid(n), xr(n), xe(n), xc(n);
  while (evals < opts.max_evals) {
    sort_vertices();
    const int best = order[0], worst = order[n], second_worst = order[n - 1];
    if (std::abs(fx[worst] - fx[best]) <= opts.f_tol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (int j = 0; j <= n; ++j) {
      if (j == worst) continue;
      for (int i = 0; i < n; ++i) centroid[i] += simplex[j][i];
    }
    for (int i = 0; i < n; ++i) centroid[i] /= n;

    for (int i = 0; i < n; ++i) xr[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
    const double fr = eval(xr);
    if (fr < fx[best]) {
      for (int i = 0; i < n; ++i) xe[i] = centroid[i] + 2.0 * (xr[i] - centroid[i]);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        fx[worst] = fe;
      } else {
        simplex[worst] = xr;
        fx[worst] = fr;
      }
    } else if (fr < fx[second_worst]) {
      simplex[worst] = xr;
      fx[worst] = fr;
    } else {
      const bool outside = fr < fx[worst];
      const auto& base = outside ? xr : simplex[worst];
      for (int i = 0; i < n; ++i) xc[i] = centroid[i] + 0.5 * (base[i] - centroid[i]);
      const double fc = eval(xc);
      if (fc < (outside ? fr : fx[worst])) {
        simplex[worst] = xc;
        fx[worst] = fc;
      } else {
        for (int j = 0; j <= n; ++j) {
          if (j == best) continue;
          for (int i = 0; i < n; ++i)
            simplex[j][i] = simplex[best][i] + 0.5 * (simplex[j][i] - simplex[best][i]);
          fx[j] = eval(simplex[j]);
        }
      }
    }
  }

  sort_vertices();
  res.x = simplex[order[0]];
  res.fmin = fx[order[0]];
  res.evals = evals;
  return res;
}

}  // namespace pbm
