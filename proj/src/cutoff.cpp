#include "radscat/cutoff.hpp"

#include <cmath>

#include "radscat/error.hpp"

namespace radscat {

namespace {

Jet bump_b(const Jet& x) {
  if (x[0] <= 0.0) return Jet(x.order(), 0.0);
  return exp(-(1.0 / x));
}

}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

Jet smooth_step(const Jet& x) {
  if (x[0] <= 0.0) return Jet(x.order(), 0.0);
  if (x[0] >= 1.0) return Jet(x.order(), 1.0);
  Jet a = bump_b(x), b = bump_b(1.0 - x);
  return a / (a + b);
}

Cutoff::Cutoff(double lower, double upper, Orientation o)
    : lower_(lower), upper_(upper), orient_(o) {
  if (!(upper > lower)) throw DomainError("Cutoff: upper must exceed lower");
}

double Cutoff::operator()(double s) const {
  const double w = upper_ - lower_;
  return orient_ == Orientation::decreasing ? smooth_step((upper_ - s) / w)
                                             : smooth_step((s - lower_) / w);
}

Jet Cutoff::jet(double s0, int order) const {
  const double w = upper_ - lower_;
  Jet s = Jet::variable(order, s0);
  return orient_ == Orientation::decreasing ? smooth_step((upper_ - s) * (1.0 / w))
                                             : smooth_step((s - lower_) * (1.0 / w));
}

void Cutoff::eval2(double s, double& c0, double& c1, double& c2) const {
  if (s <= lower_ || s >= upper_) {
    c0 = (*this)(s);
    c1 = 0.0;
    c2 = 0.0;
    return;
  }
  Jet j = jet(s, 2);
  c0 = j[0];
  c1 = j[1];
  c2 = 2.0 * j[2];
}

const Cutoff& chi_cutoff() {
  static const Cutoff c(0.125, 0.25, Cutoff::Orientation::decreasing);
  return c;
}

const Cutoff& chi_e_cutoff() {
  static const Cutoff c(1.0, 2.0, Cutoff::Orientation::increasing);
  return c;
}

}  // namespace radscat
