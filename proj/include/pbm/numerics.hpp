#pragma once

#include <functional>
#include <vector>

#include "pbm/errors.hpp"

namespace pbm {

// Small dense square matrix, row-major.  Sized for the observed
// information matrices of this project (dim <= 4), not a general
// linear algebra type.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim, 0.0) {}

  double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
  double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

  int dim() const { return dim_; }
  bool empty() const { return dim_ == 0; }

  static SquareMatrix identity(int dim);

 private:
  int dim_ = 0;
  std::vector<double> a_;
};

// Standard normal CDF, accurate to ~1 ulp of erfc (abs error < 1e-14).
double normal_cdf(double z);

// log(normal_cdf(z)) without underflow.  Direct for z >= -8, asymptotic
// tail expansion below; finite for any finite z (e.g. z = -40 gives
// about -804.6), so terms exp(a) * Phi(-b) can be evaluated as
// exp(a + log_normal_cdf(-b)) even when a is large.
double log_normal_cdf(double z);

// Adaptive Gauss-Kronrod 15(7) quadrature of f over [lower, upper].
// An infinite upper limit is allowed only together with a finite
// truncation bound supplied by the caller (callers pick it from the
// decay of their integrand's envelope).  Throws NonConvergence when the
// error estimate cannot be brought below rel_tol within the subdivision
// budget.
double integrate(const std::function<double(double)>& f, double lower, double upper,
                 double rel_tol, double truncation = 0.0);

// Bracketed root finding (Brent: bisection + secant + inverse quadratic
// interpolation).  Requires g(lo) and g(hi) of opposite sign, otherwise
// throws BadBracket.  Returns the root located to a bracket width <= tol.
double find_root(const std::function<double(double)>& g, double lo, double hi,
                 double tol = 1e-12);

// Central second-difference Hessian of f at x, symmetrized as
// (H + H^T)/2.  Throws NonFinite if any evaluation of f is not finite.
SquareMatrix numeric_hessian(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x, const std::vector<double>& steps);

// Step sizes used for information-matrix Hessians: max(1e-4 |x_i|, 1e-6).
std::vector<double> hessian_steps(const std::vector<double>& x);

// Inverse of a symmetric positive definite matrix via its Cholesky
// factor.  Throws NotPositiveDefinite on a non-positive pivot or if M is
// not symmetric to within 1e-8 (scaled by the largest entry magnitude).
SquareMatrix spd_inverse(const SquareMatrix& m);

}  // namespace pbm
