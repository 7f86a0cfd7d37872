#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "radscat/engine.hpp"

namespace radscat {

enum class WeightKind { constant, w0, w_gamma, conformal };

struct WeightSpec {
  WeightKind kind = WeightKind::constant;
  double mu = 0.0;
  double gamma = -0.5;
  double s = 1.0;

  static WeightSpec constant() { return {}; }
  static WeightSpec w0(double mu) { return {WeightKind::w0, mu, -0.5, 1.0}; }
  static WeightSpec w_gamma(double gamma, double mu) { return {WeightKind::w_gamma, mu, gamma, 1.0}; }
  static WeightSpec conformal(double s) { return {WeightKind::conformal, 0.0, -0.5, s}; }
};

// w0, w_gamma take q = r - t; conformal takes v and returns <v>^{2s}.
double weight_eval(const WeightSpec& w, double x);
double weight_derivative(const WeightSpec& w, double x);

struct FunctionalReport {
  double t = 0.0;
  std::map<std::string, double> values;
};

// Restrict a reduction to one field tag; -1 takes every entry.
constexpr int kAllFields = -1;

// int |d phi|^2 w(r - t) dx, |d phi|^2 = phi_t^2 + |grad phi|^2.
double energy_weighted(const FieldState& s, const WeightSpec& w, int field = kAllFields);

// ||phi||_{1,+,s-1}: weighted null-frame norm of r phi (returns the norm, not its square).
double conformal_norm_plus(const FieldState& st, double s, int field = kAllFields);

// E_R^s(t), radial integral truncated at R.
double conformal_energy_ER(const FieldState& st, double s, double R, int field = kAllFields);

// F_R^s over the cone t - r = c restricted to [t1, t2].
double cone_flux_FR(const ConeTrack& cone, double s, double t1, double t2);

// Integrand of the space-time term at one slice: int_0^Rt r X(u) S + deform * l(l+1) u^2 / r^2 dr.
// S holds the mode coefficients of box phi (may be null for free waves).
double morawetz_bulk_slice(const FieldState& st, const std::vector<std::vector<double>>* S, double s, double Rt,
                           int field = kAllFields);

struct IdentityAudit {
  double e1 = 0.0, e2 = 0.0, flux = 0.0, bulk = 0.0;
  double lhs = 0.0, rhs = 0.0;
  double residual = 0.0;  // (lhs - rhs) / max(|lhs|, |rhs|), 0 when both vanish
};

// Balance 1/2 E_{R-(t2-t1)}(t1) + F_R = 1/2 E_R(t2) + bulk over a trajectory recorded at
// every step (with sources when the solve had one) that tracked the cone t - r = t2 - R.
IdentityAudit morawetz_identity_audit(const Trajectory& tr, double s, double R, int field = kAllFields);

// (f(t+r) - f(t-r))/r - f'(t+r) - f'(t-r) for f = (1+v^2)^{a/2}/a, in 50-digit arithmetic.
double bulk_deform(double a, double t, double r);

struct BulkSignResult {
  double max_slack = 0.0;
  double t_at = 0.0, r_at = 0.0;
  bool conforming = true;  // false when a < 2
};
BulkSignResult bulk_sign_check(double a, const std::vector<double>& ts, const std::vector<double>& rs);

struct HardyReport {
  double lhs_weighted = 0.0, rhs_weighted = 0.0, ratio_weighted = 0.0;  // f'' phi^2 versus null frame
  double lhs_origin = 0.0, rhs_origin = 0.0, ratio_origin = 0.0;        // <t-r>^{2s} phi^2 / r^2
  bool within_budget = true;
};
HardyReport hardy_checks(const FieldState& st, double s, double budget = 10.0, int field = kAllFields);

// sum over Z in {1, d_t, d_x, S, rotations} of ||<t-r>^{s-1} Z phi|| plus the boost majorant
// ||<t-r>^{s-1}((t+r)|L phi| + |t-r||Lbar phi| + (t/r)|grad_S (r phi)|)||.
// S, when given, is box phi at this slice (needed for second-order terms only).
double norm_Z_weighted(const FieldState& st, double s, int field = kAllFields);

// Same family applied twice (|I| <= 2), boosts split into radial and angular parts.
double norm_Z_weighted2(const FieldState& st, double s, const std::vector<std::vector<double>>* S = nullptr,
                        int field = kAllFields);

// sup over grid and sphere of <t+r><t-r>^{s-1/2}|phi|.
double sup_envelope(const FieldState& st, double s, int field = kAllFields, double r_min = 0.0);

struct KSCheck {
  double numerator = 0.0, denominator = 0.0, constant = 0.0;
};
KSCheck ks_pointwise_check(const FieldState& st, double s, const std::vector<std::vector<double>>* S = nullptr,
                           int field = kAllFields);

struct OriginSample {
  double t = 0.0;
  double scaled = 0.0;  // t^{1+gamma} |phi(t, 0)|
  double bound = 0.0;   // (1+t)^{1/2+gamma} (flux on t - r = t)^{1/2}
  double ratio = 0.0;
};
// Needs record_origin and one cone per sample time c = t1 (t1 in the solve range).
std::vector<OriginSample> origin_decay_check(const Trajectory& tr, double gamma, int field = kAllFields);

struct FitResult {
  double exponent = 0.0;
  double amplitude = 0.0;
  double r_squared = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  int samples = 0;
};
// Least squares of log value against log t on samples with t in [t_lo, t_hi].
FitResult fit_decay(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi);
// Default window: [10 t0, 100 t0] when the series reaches it, else the last factor-4 span.
FitResult fit_decay(const std::vector<std::pair<double, double>>& series);
std::pair<double, double> default_fit_window(const std::vector<std::pair<double, double>>& series);

// ||<t+r>^s S||_{L^2}, S given per mode on the grid.
double weighted_source_norm(const RadialGrid& g, double t, const std::vector<std::vector<double>>& S, double s);

}  // namespace radscat
