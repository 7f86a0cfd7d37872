#include "radscat/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "radscat/error.hpp"

namespace radscat {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
  double p0 = 1.0, p1 = x;
  if (n == 0) {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  GaussLegendre g;
  g.x.resize(n);
  g.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, p, dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.x[i] = -x;
    g.x[n - 1 - i] = x;
    g.w[i] = w;
    g.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.x[n / 2] = 0.0;
  return g;
}

QuadResult gk_adaptive(const RealFn& f, double a, double b, double tol) {
  QuadResult q;
  if (a == b) return q;
  q.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 18, tol, &q.error, &q.l1);
  if (!std::isfinite(q.value)) throw QuadratureError("gauss-kronrod: non-finite integral");
  return q;
}

namespace {

void check_accuracy(const QuadResult& q, double tol, const char* what, double a, double b) {
  // estimates below ~1e-15 of the L1 norm are round-off, not truncation
  if (q.error > std::max(100.0 * tol, 1e-15) * q.l1 && q.error > 1e-300) {
    std::ostringstream os;
    os << what << ": error estimate " << q.error << " on [" << a << ", " << b << "] exceeds tolerance " << tol;
    throw QuadratureError(os.str());
  }
}

}  // namespace

double integrate_interval(const RealFn& f, double a, double b, double tol) {
  QuadResult q = gk_adaptive(f, a, b, tol);
  check_accuracy(q, tol, "integrate_interval", a, b);
  return q.value;
}

QuadResult exp_sinh_tail(const RealFn& f, double a, double tol) {
  boost::math::quadrature::exp_sinh<double> es;
  QuadResult q;
  auto g = [&](double x) { return f(a + x); };
  q.value = es.integrate(g, tol, &q.error, &q.l1);
  if (!std::isfinite(q.value)) throw QuadratureError("exp-sinh: non-finite integral");
  return q;
}

double integrate_half_line(const RealFn& f, double a, double tol) {
  QuadResult q = exp_sinh_tail(f, a, tol);
  if (q.error > std::max(1e3 * tol, 1e-14) * q.l1 && q.error > 1e-300) {
    std::ostringstream os;
    os << "integrate_half_line: tail from " << a << " not converged (error " << q.error << ")";
    throw QuadratureError(os.str());
  }
  return q.value;
}

namespace {

// Adaptive GK over consecutive panels against a shared absolute target. A
// panel-relative tolerance never converges where the integrand underflows, so
// a non-adaptive pass first estimates the global L1 and each panel then gets
// a relative tolerance matched to its share of that target.
QuadResult panel_sum(const RealFn& f, const std::vector<double>& br, double tol) {
  const std::size_t n = br.size() - 1;
  std::vector<double> rough(n);
  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = 0.0;
    boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, br[i], br[i + 1], 0, 0.0, &e, &rough[i]);
    l1 += rough[i];
  }
  std::vector<double> vals(n);
  QuadResult tot;
  for (std::size_t i = 0; i < n; ++i) {
    if (rough[i] == 0.0 && l1 > 0.0) {
      // a 31-point rule saw nothing here; trust it only if the neighbours agree
      bool quiet = (i == 0 || rough[i - 1] == 0.0) && (i + 1 == n || rough[i + 1] == 0.0);
      if (quiet) continue;
    }
    double ptol = tol;
    if (rough[i] > 0.0) ptol = std::min(0.5, std::max(tol, tol * l1 / (rough[i] * n)));
    QuadResult q = gk_adaptive(f, br[i], br[i + 1], ptol);
    vals[i] = q.value;
    tot.error += q.error;
    tot.l1 += q.l1;
  }
  tot.value = pairwise_sum(vals);
  return tot;
}

}  // namespace

double integrate_panels(const RealFn& f, const std::vector<double>& breaks, double tol) {
  QuadResult tot = panel_sum(f, breaks, tol);
  check_accuracy(tot, tol, "integrate_panels", breaks.front(), breaks.back());
  return tot.value;
}

double integrate_line(const RealFn& f, double center, double half_width, double tol) {
  const double lo = center - half_width, hi = center + half_width;
  // panels of unit width keep narrow features resolved
  const int panels = std::max(1, static_cast<int>(std::ceil(2.0 * half_width)));
  std::vector<double> br(panels + 1);
  for (int i = 0; i <= panels; ++i) br[i] = lo + (hi - lo) * i / panels;
  QuadResult tot = panel_sum(f, br, tol);
  QuadResult right = exp_sinh_tail(f, hi, tol);
  QuadResult left = exp_sinh_tail([&](double x) { return f(2.0 * lo - x); }, lo, tol);
  tot.value += right.value + left.value;
  tot.l1 += right.l1 + left.l1;
  tot.error += right.error + left.error;
  check_accuracy(tot, 10.0 * tol, "integrate_line", -INFINITY, INFINITY);
  return tot.value;
}

double pairwise_sum(const double* x, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

}  // namespace radscat
