#pragma once

#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "radscat/jet.hpp"

namespace radscat {

// One-dimensional profile F(q) of the retarded coordinate q = r - t.
class Profile {
 public:
  virtual ~Profile() = default;

  // Taylor jet about q of the given order (order <= max_derivative_order()).
  virtual Jet jet(double q, int order) const = 0;
  virtual double value(double q) const { return jet(q, 0)[0]; }
  virtual int max_derivative_order() const { return Jet::kMaxOrder; }
  // |(<q> d/dq)^k F(q)| = O(|q|^-e) as |q| -> inf; +inf for faster than any power.
  virtual double tail_exponent() const = 0;
  // Location and scale of the main feature, used to place quadrature panels.
  virtual double center() const = 0;
  virtual double scale() const = 0;
  // |F| and all derivatives vanish (to double precision) outside this interval.
  virtual std::pair<double, double> negligible_outside() const {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  // Canonical descriptor, e.g. "gaussian A=1 w=1 c=0".
  virtual std::string describe() const = 0;
};

using ProfilePtr = std::shared_ptr<const Profile>;

// A exp(-((q - c) / w)^2)
class GaussianProfile final : public Profile {
 public:
  GaussianProfile(double amplitude, double width, double center);
  Jet jet(double q, int order) const override;
  double value(double q) const override;
  double tail_exponent() const override { return std::numeric_limits<double>::infinity(); }
  double center() const override { return c_; }
  double scale() const override { return w_; }
  std::pair<double, double> negligible_outside() const override;
  std::string describe() const override;

 private:
  double a_, w_, c_;
};

// A (1 + ((q - c) / w)^2)^(-p/2)
class PolyTailProfile final : public Profile {
 public:
  PolyTailProfile(double amplitude, double exponent, double center, double width = 1.0);
  Jet jet(double q, int order) const override;
  double value(double q) const override;
  double tail_exponent() const override { return p_; }
  double center() const override { return c_; }
  double scale() const override { return w_; }
  std::string describe() const override;

 private:
  double a_, p_, c_, w_;
};

// A exp(1 - 1 / (1 - x^2)), x = (q - c) / w, zero for |x| >= 1.
class CompactBumpProfile final : public Profile {
 public:
  CompactBumpProfile(double amplitude, double width, double center);
  Jet jet(double q, int order) const override;
  double tail_exponent() const override { return std::numeric_limits<double>::infinity(); }
  double center() const override { return c_; }
  double scale() const override { return w_; }
  std::pair<double, double> negligible_outside() const override { return {c_ - w_, c_ + w_}; }
  std::string describe() const override;

 private:
  double a_, w_, c_;
};

// Natural cubic spline through (q_i, f_i); zero outside [q_0, q_n].
class SampledProfile final : public Profile {
 public:
  SampledProfile(std::vector<double> q, std::vector<double> f);
  Jet jet(double q, int order) const override;
  int max_derivative_order() const override { return 2; }
  double tail_exponent() const override { return std::numeric_limits<double>::infinity(); }
  double center() const override { return 0.5 * (q_.front() + q_.back()); }
  double scale() const override;
  std::pair<double, double> negligible_outside() const override { return {q_.front(), q_.back()}; }
  std::string describe() const override;
  const std::vector<double>& nodes() const { return q_; }
  const std::vector<double>& values() const { return f_; }

 private:
  std::vector<double> q_, f_, m_;  // m_: second derivatives at nodes
};

// coef * int_{q_ref}^{q} base(q') dq'. The integral is tabulated as a Taylor
// expansion at nodes of spacing dq, so evaluation costs one short Horner sum.
class AntiderivativeProfile final : public Profile {
 public:
  AntiderivativeProfile(ProfilePtr base, double coef, double q_ref = 0.0, double dq = 1.0 / 64.0);
  Jet jet(double q, int order) const override;
  double value(double q) const override;
  int max_derivative_order() const override;
  double tail_exponent() const override;
  double center() const override { return base_->center(); }
  double scale() const override { return base_->scale(); }
  std::string describe() const override;
  const Profile& base() const { return *base_; }
  double coefficient() const { return coef_; }

 private:
  static constexpr int kTableOrder = 10;
  double integral_from_table_end(double q) const;
  ProfilePtr base_;
  double coef_, q_ref_, dq_;
  double lo_, hi_;                        // table range
  int table_order_;                       // min(kTableOrder, base order + 1)
  std::vector<double> taylor_;            // per node, table_order_+1 coefficients of the integral
  double left_const_ = 0, right_const_ = 0;  // values of the raw integral at lo_, hi_
  bool left_flat_ = false, right_flat_ = false;
};

// sum_i c_i P_i
class CombinationProfile final : public Profile {
 public:
  CombinationProfile(std::vector<double> coefs, std::vector<ProfilePtr> parts);
  Jet jet(double q, int order) const override;
  int max_derivative_order() const override;
  double tail_exponent() const override;
  double center() const override;
  double scale() const override;
  std::pair<double, double> negligible_outside() const override;
  std::string describe() const override;

 private:
  std::vector<double> c_;
  std::vector<ProfilePtr> p_;
};

// coef * d/dq base
class DerivativeProfile final : public Profile {
 public:
  explicit DerivativeProfile(ProfilePtr base, double coef = 1.0);
  Jet jet(double q, int order) const override;
  int max_derivative_order() const override { return base_->max_derivative_order() - 1; }
  double tail_exponent() const override { return base_->tail_exponent(); }
  double center() const override { return base_->center(); }
  double scale() const override { return base_->scale(); }
  std::pair<double, double> negligible_outside() const override { return base_->negligible_outside(); }
  std::string describe() const override;

 private:
  ProfilePtr base_;
  double coef_;
};

// A chi_e'(q): derivative of the exterior mass step, supported in [1, 2].
class MassStepDerivativeProfile final : public Profile {
 public:
  explicit MassStepDerivativeProfile(double amplitude);
  Jet jet(double q, int order) const override;
  double tail_exponent() const override { return std::numeric_limits<double>::infinity(); }
  double center() const override { return 1.5; }
  double scale() const override { return 0.5; }
  std::pair<double, double> negligible_outside() const override { return {1.0, 2.0}; }
  std::string describe() const override;

 private:
  double a_;
};

// sum_i c_i A_i B_i
class ProductProfile final : public Profile {
 public:
  struct Term {
    double coef;
    ProfilePtr a, b;
  };
  explicit ProductProfile(std::vector<Term> terms);
  Jet jet(double q, int order) const override;
  int max_derivative_order() const override;
  double tail_exponent() const override;
  double center() const override;
  double scale() const override;
  std::pair<double, double> negligible_outside() const override;
  std::string describe() const override;

 private:
  std::vector<Term> t_;
};

// Parsed profile descriptor.
struct ProfileSpec {
  std::string kind;  // gaussian | poly-tail | compact-bump | sampled
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  double exponent = 0.0;  // poly-tail p
  std::vector<double> q, values;
};

// Parses "gaussian A=1 w=1 c=0", "poly-tail A=1 p=1.2 c=0",
// "compact-bump A=1 w=2 c=0", "sampled q=0,1,2 f=0,1,0".
ProfileSpec parse_profile_spec(const std::string& text);

// Builds and validates. gamma is the decay parameter of the owning field;
// poly-tail exponents p <= gamma are rejected.
ProfilePtr make_profile(const ProfileSpec& spec, double gamma);

}  // namespace radscat
