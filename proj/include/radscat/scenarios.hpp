#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "radscat/backscatter.hpp"
#include "radscat/engine.hpp"
#include "radscat/functionals.hpp"
#include "radscat/radiation_field.hpp"

namespace radscat {

// Everything a scenario needs. Defaults describe the reference runs.
struct RunSpec {
  std::string scenario = "homogeneous";
  RadiationField F0{2, 0.8};
  RadiationField G0{2, 0.8};
  std::vector<std::string> F0_text, G0_text;  // descriptors as configured, "l m <profile>"
  double gamma = 0.8;
  double s = 1.2;
  double M = 0.0;
  double mu = 0.1;
  double a = 1.0;            // decay parameter of the backscatter source norm
  double T = 80.0;
  double t0 = 2.0;
  std::vector<double> T_list{40.0, 80.0, 160.0};
  int n_records = 48;        // log-spaced record times in [t0, T]
  double h = 0.1;
  double dt_factor = 0.5;    // dt = dt_factor * h
  int L_max = 2;

  // scenario-specific knobs
  double delta = 0.3;                     // null radial: required decay exponent
  double amplitude_scale = 0.5;           // null radial: second run at this amplitude factor
  double check_h = 0.05;                  // weak null cross-check grid
  double check_T = 64.0, check_t0 = 40.0, check_t = 48.0;
  std::vector<double> check_radii{42.0, 45.0, 47.0, 49.0, 51.0};
  double envelope_t_lo = 4.0, envelope_t_hi = 40.0;
  double sweep_offset = 5.0;
  std::vector<double> sweep_radii{20.0, 40.0, 80.0, 160.0};
  double hardy_budget = 10.0;

  // acceptance thresholds
  double exponent_tol = 0.15;
  double order_target = 2.0, order_tol = 0.1;
  double order_min = 1.9;
  double nonincrease_tol = 0.2;
  double tlimit_ratio = 1.5;
  double envelope_ratio = 5.0;
  double crosscheck_tol = 1e-2;
  double scaling_tol = 0.2;
  double oracle_tol = 1e-4;
  double backscatter_bound = 2.0, backscatter_ratio = 2.0, remainder_bound = 5.0;
  double bulk_slack = 1e-12;
  double drift_ratio = 2.0;

  int threads = 1;
  std::uint64_t seed = 0;
};

// Range checks on the physical parameters; throws ConfigError naming the key.
void validate_run_spec(const RunSpec& spec);

// A claimed exponent with its target. kind: "two_sided" passes when
// |fitted - target| <= tol; "upper" when fitted <= target + tol; "nonincrease"
// is the boundedness fallback (value(t2) <= (1 + tol) value(t1) for t1 < t2).
struct ExponentCheck {
  std::string name;
  std::string kind = "two_sided";
  double fitted = 0.0, target = 0.0, tol = 0.0;
  FitResult fit;
  bool pass = false;
};

// A scalar compared against a limit: relation "<=" or ">=".
struct ScalarCheck {
  std::string name;
  double value = 0.0, limit = 0.0;
  std::string relation = "<=";
  bool pass = false;
};

struct ScenarioReport {
  std::string scenario;
  std::string status = "ok";  // "ok" or "error"
  std::string error_stage, error_message;
  std::vector<FunctionalReport> series;
  std::vector<ExponentCheck> exponents;
  std::vector<ScalarCheck> checks;
  std::map<std::string, std::string> provenance;
  bool all_pass() const;
};

// Check constructors; pass/fail is plain arithmetic on the stored numbers.
ExponentCheck exponent_check(const std::string& name, const FitResult& fit, double target, double tol,
                             const std::string& kind = "two_sided");
ScalarCheck scalar_check(const std::string& name, double value, double limit, const std::string& relation);

// l = 0 d'Alembert data against the closed form at h, h/2, h/4; energy drift
// of a free multi-mode run; forward-backward round trip.
ScenarioReport run_free_wave_validation(const RunSpec& spec);

// v + psi01 + psi_e with box v = -box psi01 and v = 0 at T.
ScenarioReport run_homogeneous_scattering(const RunSpec& spec);

// v_T for each T in spec.T_list on a shared grid; differences at t0.
ScenarioReport run_T_limit_study(const RunSpec& spec);

// box psi = 0, box phi = (d_t psi)^2 with phi = w + varphi01 + phi01.
ScenarioReport run_weak_null(const RunSpec& spec);

// box v = Q0(d(v + u0)), u0 the l = 0 free wave with radiation field F0_00.
ScenarioReport run_null_radial(const RunSpec& spec);

// Kernel oracle, envelopes and remainder for n = F0'^2.
ScenarioReport run_backscatter_audit(const RunSpec& spec);

// Bulk sign, Hardy and weighted Klainerman-Sobolev ratios under refinement.
ScenarioReport run_functional_audit(const RunSpec& spec);

// Exact-solution residual orders and identity-audit residual orders.
ScenarioReport run_convergence_study(const RunSpec& spec);

// Dispatch on spec.scenario; failures become status "error" with a stage tag.
ScenarioReport run_scenario(const RunSpec& spec);

// Pieces of the weak-null construction, exposed for tests.
struct WeakNullSources {
  RadiationField n2, n3, n4;  // strata of (psi0' + psi_e' + psi1')^2 with r^-2, r^-3, r^-4
};
WeakNullSources weak_null_sources(const RadiationField& F0, const RadiationField& F1, double M);
// varphi01 = -(Phi^2[n2] + 2 Phi^3[n3] + 4 Phi^4[n4]), kernels at cutoff power 2.
ModeVector varphi01_modes(const WeakNullSources& n, double t, double r, const KernelQuadratureSpec& spec = {});
// The strata as they enter the equation: sum_k n_k(r - t) r^-k chi^2.
ModeVector varphi01_box_source(const WeakNullSources& n, double t, double r);

// Log-spaced times in [t0, T] (both ends included).
std::vector<double> log_record_times(double t0, double T, int n);

}  // namespace radscat
