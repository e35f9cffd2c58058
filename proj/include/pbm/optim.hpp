#pragma once

#include <functional>
#include <vector>

namespace pbm {

struct NmOptions {
  double f_tol = 1e-8;      // absolute spread of simplex values at convergence
  int max_evals = 20000;
  double init_step = 0.05;  // initial simplex displacement per coordinate
};

struct NmResult {
  std::vector<double> x;
  double fmin = 0.0;
  int evals = 0;
  bool converged = false;
};

// Derivative-free simplex minimization (Nelder-Mead, standard
// reflection/expansion/contraction/shrink coefficients).  Non-finite
// objective values are treated as +inf so the simplex backs away from
// them.
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                     const std::vector<double>& x0, const NmOptions& opts = {});

}  // namespace pbm
