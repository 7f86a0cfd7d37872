#pragma once

#include <vector>

#include "radscat/angular.hpp"
#include "radscat/profile.hpp"

namespace radscat {

// Band-limited map (l, m) -> profile of q = r - t. Missing modes are zero.
// Coefficients are in the real harmonic basis, so every choice of real
// profiles describes a real field.
class RadiationField {
 public:
  RadiationField() = default;
  RadiationField(int band_limit, double gamma);

  int band_limit() const { return L_; }
  double gamma() const { return gamma_; }

  void set_mode(int l, int m, ProfilePtr p);
  const Profile* mode(int l, int m) const { return modes_[mode_index(l, m)].get(); }
  const Profile* mode(int idx) const { return modes_[idx].get(); }
  ProfilePtr mode_ptr(int idx) const { return modes_[idx]; }
  // Indices of nonzero modes, ascending.
  std::vector<int> active() const;
  bool empty() const { return active().empty(); }

  // Mode coefficients at q (zeros for missing modes).
  ModeVector values(double q) const;
  // Field with every profile multiplied by c.
  RadiationField scaled(double c) const;

 private:
  int L_ = 0;
  double gamma_ = 0.75;
  std::vector<ProfilePtr> modes_ = std::vector<ProfilePtr>(1);
};

// F1_lm(q) = -(l(l+1)/2) int_0^q F0_lm, so 2 F1' = Lap_omega F0 and F1(0) = 0.
RadiationField derive_F1(const RadiationField& F0);

// coef * d_q F, mode by mode.
RadiationField field_derivative(const RadiationField& F, double coef = 1.0);
// Pointwise product coef * A(q, w) B(q, w) as a field of band La + Lb (exact).
RadiationField field_product(const RadiationField& A, const RadiationField& B, double coef = 1.0);
// Sum of fields with a common gamma (taken from the first); empty inputs are skipped.
RadiationField field_sum(const std::vector<RadiationField>& parts);

// sum_{k+j<=N} sum_lm (1 + l(l+1))^j int |(<q>d_q)^k F_lm|^2 <q>^{2 weight_exponent} dq.
double norm_data_L2(const RadiationField& F, int N, double weight_exponent);

// sum_{k+j<=N'} sup_{q, omega} <q>^gamma |(<q>d_q)^k (1+l(l+1))^{j/2} F|.
double norm_data_sup(const RadiationField& F, int Nprime, double gamma);

// Same with an explicit q sample (used by tests and the sup-norm audits).
double norm_data_sup(const RadiationField& F, int Nprime, double gamma, const std::vector<double>& qs);

// Default dense q sample for sup norms.
std::vector<double> default_q_sample();

}  // namespace radscat
