#pragma once

#include <functional>
#include <vector>

namespace radscat {

// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussLegendre {
  std::vector<double> x;
  std::vector<double> w;
};
GaussLegendre gauss_legendre(int n);

using RealFn = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;  // integral of |f|
};

// Raw adaptive Gauss-Kronrod (31 points) on a finite interval; never throws
// on accuracy, callers combine panels and check the total.
QuadResult gk_adaptive(const RealFn& f, double a, double b, double tol);
// Raw exponential-sinh integral over [a, inf).
QuadResult exp_sinh_tail(const RealFn& f, double a, double tol);

// Adaptive Gauss-Kronrod on a finite interval. Throws QuadratureError when
// the error estimate stays above the relative tolerance (measured against the
// integral of |f|).
double integrate_interval(const RealFn& f, double a, double b, double tol = 1e-12);

// Sum over consecutive panels [breaks[i], breaks[i+1]] with one accuracy check.
double integrate_panels(const RealFn& f, const std::vector<double>& breaks, double tol = 1e-12);

// Integral over the real line, split into a finite core [c - L, c + L] and two
// exponential-sinh tails. Requires integrable tails.
double integrate_line(const RealFn& f, double center, double half_width, double tol = 1e-12);

// Integral over [a, inf).
double integrate_half_line(const RealFn& f, double a, double tol = 1e-12);

// Pairwise (tree) sum with a fixed association order, independent of threads.
double pairwise_sum(const double* x, std::size_t n);
inline double pairwise_sum(const std::vector<double>& x) { return pairwise_sum(x.data(), x.size()); }

}  // namespace radscat
