#pragma once

#include "radscat/jet.hpp"

namespace radscat {

// Smooth step sigma(x) = B(x) / (B(x) + B(1 - x)) with B(x) = exp(-1/x) for
// x > 0 and 0 otherwise. Equal to 0 for x <= 0 and 1 for x >= 1.
double smooth_step(double x);
Jet smooth_step(const Jet& x);

// Monotone smooth transition on [lower, upper].
class Cutoff {
 public:
  enum class Orientation { decreasing, increasing };

  Cutoff(double lower, double upper, Orientation o);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  Orientation orientation() const { return orient_; }

  double operator()(double s) const;
  // Jet in s about s0 of the given order.
  Jet jet(double s0, int order) const;
  // value, first and second derivative
  void eval2(double s, double& c0, double& c1, double& c2) const;

 private:
  double lower_, upper_;
  Orientation orient_;
};

// chi: 1 for s <= 1/8, 0 for s >= 1/4.
const Cutoff& chi_cutoff();
// chi_e: 0 for s <= 1, 1 for s >= 2.
const Cutoff& chi_e_cutoff();

}  // namespace radscat
