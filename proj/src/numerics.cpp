#include "pbm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace pbm {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2*pi))

// 15-point Kronrod nodes/weights with embedded 7-point Gauss rule
// (QUADPACK dqk15 constants), on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
  double integral;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double gauss = 0.0;
  for (int i = 0; i < 3; ++i) gauss += kWg[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
  gauss += kWg[3] * fv[7];
  double kronrod = 0.0;
  for (int i = 0; i < 7; ++i) kronrod += kWgk[i] * (fv[i] + fv[14 - i]);
  kronrod += kWgk[7] * fv[7];
  const double ik = kronrod * h;
  double err = std::abs((kronrod - gauss) * h);
  // QUADPACK-style sharpening of the raw difference.
  if (err > 0.0) {
    double resabs = 0.0;
    for (int i = 0; i < 7; ++i) resabs += kWgk[i] * (std::abs(fv[i]) + std::abs(fv[14 - i]));
    resabs += kWgk[7] * std::abs(fv[7]);
    resabs *= std::abs(h);
    if (resabs > 0.0) err = std::min(err, resabs * std::pow(200.0 * err / resabs, 1.5));
  }
  return {ik, err};
}

struct Segment {
  double a, b, integral, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

}  // namespace

SquareMatrix SquareMatrix::identity(int dim) {
  SquareMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double log_normal_cdf(double z) {
  if (z >= -8.0) {
    if (z > 8.0) return std::log1p(-normal_cdf(-z));
    return std::log(0.5 * std::erfc(-z / kSqrt2));
  }
  // Tail expansion: Phi(z) = phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - ...).
  const double zz = z * z;
  double sum = 1.0, term = 1.0;
  for (int n = 1; n < 40; ++n) {
    const double next = term * (-(2.0 * n - 1.0) / zz);
    if (std::abs(next) >= std::abs(term)) break;  // past optimal truncation
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * sum) break;
  }
  return -0.5 * zz - std::log(-z) - kLogSqrt2Pi + std::log(sum);
}

double integrate(const std::function<double(double)>& f, double lower, double upper,
                 double rel_tol, double truncation) {
  if (std::isinf(upper)) {
    if (!(truncation > lower) || std::isinf(truncation))
      throw std::invalid_argument("integrate: infinite upper limit requires a finite truncation bound");
    upper = truncation;
  }
  if (!(rel_tol > 0.0) || rel_tol > 1e-3)
    throw std::invalid_argument("integrate: rel_tol must lie in (0, 1e-3]");
  if (lower == upper) return 0.0;

  constexpr int kMaxSubdivisions = 10000;
  std::priority_queue<Segment> heap;
  PanelResult first = gk15(f, lower, upper);
  if (!std::isfinite(first.integral)) throw NonConvergence("integrate: non-finite integrand");
  heap.push({lower, upper, first.integral, first.error});
  double total = first.integral;
  double total_err = first.error;

  for (int iter = 0; iter < kMaxSubdivisions; ++iter) {
    if (total_err <= rel_tol * std::abs(total) || total_err < 1e-300) return total;
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval at machine resolution; keep its estimate and stop refining it.
      total_err -= worst.error;
      continue;
    }
    PanelResult left = gk15(f, worst.a, mid);
    PanelResult right = gk15(f, mid, worst.b);
    if (!std::isfinite(left.integral) || !std::isfinite(right.integral))
      throw NonConvergence("integrate: non-finite integrand");
    total += left.integral + right.integral - worst.integral;
    total_err += left.error + right.error - worst.error;
    heap.push({worst.a, mid, left.integral, left.error});
    heap.push({mid, worst.b, right.integral, right.error});
  }
  if (total_err <= rel_tol * std::abs(total) || total_err < 1e-300) return total;
  throw NonConvergence("integrate: subdivision budget exhausted");
}

double find_root(const std::function<double(double)>& g, double lo, double hi, double tol) {
  double a = lo, b = hi;
  double fa = g(a), fb = g(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw BadBracket("find_root: g(lo) and g(hi) have the same sign");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if (std::abs(fc) < std::abs(fb)) {
      a = b; b = c; c = a;
      fa = fb; fb = fc; fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;
    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {  // secant
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {  // inverse quadratic interpolation
        const double qq = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
        q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = g(b);
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
  }
  return b;
}

std::vector<double> hessian_steps(const std::vector<double>& x) {
  std::vector<double> h(x.size());
  for (size_t i = 0; i < x.size(); ++i) h[i] = std::max(1e-4 * std::abs(x[i]), 1e-6);
  return h;
}

SquareMatrix numeric_hessian(const std::function<double(const std::vector<double>&)>& f,
                             const std::vector<double>& x, const std::vector<double>& steps) {
  const int d = static_cast<int>(x.size());
  if (steps.size() != x.size()) throw std::invalid_argument("numeric_hessian: steps size mismatch");
  auto eval = [&](const std::vector<double>& p) {
    const double v = f(p);
    if (!std::isfinite(v)) throw NonFinite("numeric_hessian: non-finite objective value");
    return v;
  };
  const double f0 = eval(x);
  SquareMatrix h(d);
  std::vector<double> p(x);
  for (int i = 0; i < d; ++i) {
    p[i] = x[i] + steps[i];
    const double fp = eval(p);
    p[i] = x[i] - steps[i];
    const double fm = eval(p);
    p[i] = x[i];
    h(i, i) = (fp - 2.0 * f0 + fm) / (steps[i] * steps[i]);
  }
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      p[i] = x[i] + steps[i]; p[j] = x[j] + steps[j];
      const double fpp = eval(p);
      p[j] = x[j] - steps[j];
      const double fpm = eval(p);
      p[i] = x[i] - steps[i]; p[j] = x[j] + steps[j];
      const double fmp = eval(p);
      p[j] = x[j] - steps[j];
      const double fmm = eval(p);
      p[i] = x[i]; p[j] = x[j];
      const double v = (fpp - fpm - fmp + fmm) / (4.0 * steps[i] * steps[j]);
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

SquareMatrix spd_inverse(const SquareMatrix& m) {
  const int d = m.dim();
  if (d == 0) throw std::invalid_argument("spd_inverse: empty matrix");
  double scale = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) scale = std::max(scale, std::abs(m(i, j)));
  const double sym_tol = 1e-8 * std::max(1.0, scale);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(m(i, j) - m(j, i)) > sym_tol)
        throw NotPositiveDefinite("spd_inverse: matrix not symmetric");

  // Cholesky: m = L L^T.
  SquareMatrix l(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = m(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      if (i == j) {
        if (!(s > 0.0)) throw NotPositiveDefinite("spd_inverse: non-positive Cholesky pivot");
        l(i, i) = std::sqrt(s);
      } else {
        l(i, j) = s / l(j, j);
      }
    }
  }
  // Invert L in place, then m^{-1} = L^{-T} L^{-1}.
  SquareMatrix li(d);
  for (int i = 0; i < d; ++i) {
    li(i, i) = 1.0 / l(i, i);
    for (int j = 0; j < i; ++j) {
      double s = 0.0;
      for (int k = j; k < i; ++k) s += l(i, k) * li(k, j);
      li(i, j) = -s / l(i, i);
    }
  }
  SquareMatrix inv(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = 0.0;
      for (int k = i; k < d; ++k) s += li(k, i) * li(k, j);
      inv(i, j) = s;
      inv(j, i) = s;
    }
  }
  return inv;
}

}  // namespace pbm
