#pragma once

#include <string>
#include <vector>

#include "radscat/angular.hpp"
#include "radscat/radiation_field.hpp"

namespace radscat {

// n(q, omega) in the real harmonic basis, with the decay parameter a of its norm.
struct SourceProfile {
  RadiationField n;
  double a = 0.0;
};

struct KernelQuadratureSpec {
  int n_mu = 48;            // Gauss-Legendre nodes per plateau panel in the relative angle
  int n_az = 16;            // azimuth nodes (direct route only)
  double q_tol = 1e-11;     // relative tolerance of the q integral
  double subst_width = 1.0; // q within this distance of r - t is integrated in log(q - (r - t))
  int cutoff_power = 1;     // power of chi(<q>/rho) inside the kernel
};

struct Direction {
  double theta = 0.0;
  double phi = 0.0;
};

// The kernel solutions satisfy (d_t^2 - Lap) Phi^k = c_k n(r-t, omega) r^-k chi(<r-t>/r)^p
// with c_2 = 1, c_3 = 1/2, c_4 = 1/4.
double kernel_source_constant(int k);

// Mode coefficients Phi^k_lm(t, r) of Phi^k[n](t, r omega), by Funk-Hecke in the relative angle.
ModeVector phi_k_modes(const SourceProfile& n, int k, double t, double r, const KernelQuadratureSpec& spec = {});
double phi_k(const SourceProfile& n, int k, double t, double r, Direction w, const KernelQuadratureSpec& spec = {});

// Same integral on a dense product grid over (q, sigma) in fixed coordinates: n evaluated
// pointwise, <omega, sigma> formed from Cartesian components. Grids are doubled until two
// successive values agree to rel_tol. Compactly supported n only.
double phi_k_direct(const SourceProfile& n, int k, double t, double r, Direction w, double rel_tol = 1e-8);

// (1/2r) ln(<t+r>/<t-r>) int_{r-t}^inf n(q, omega) dq; requires r >= t/2.
double phi2_asymptotic(const SourceProfile& n, double t, double r, Direction w);

// sum_{k+j<=N} int sup_omega |(<q>d_q)^k (1+l(l+1))^{j/2} n| <q_+>^a dq.
double n_norm(const SourceProfile& n, int N, double a);

struct ResidualPoint {
  double t = 0.0, r = 0.0;
};

struct SourceResidual {
  double max_relative = 0.0;  // max |(-box_h Phi)/c_k - source| / max |source|
  double noise_bound = 0.0;   // quadrature noise propagated through the stencil, same scale
  bool conclusive = true;
};

// Five-point differences in t and r of r Phi_lm, per mode.
SourceResidual source_residual_check(const SourceProfile& n, int k, const std::vector<ResidualPoint>& pts, double h,
                                     const KernelQuadratureSpec& spec = {});

struct SweepRow {
  double t = 0.0, r = 0.0;
  int k = 2;
  double sup_value = 0.0;     // sup over directions of |Phi^k|
  double asymptotic = 0.0;    // sup over directions of |Phi^2_0| (k = 2 only)
  double remainder = 0.0;     // sup |Phi^2 - Phi^2_0| <t+r> <(r-t)_+>^a (k = 2 only)
  double envelope = 0.0;      // sup |Phi^k| / profile of the decay bound, divided by ||n||
};

// Rows along t = r + offset for each radius.
std::vector<SweepRow> backscatter_sweep(const SourceProfile& n, int k, const std::vector<double>& radii,
                                        double offset, const KernelQuadratureSpec& spec = {});

}  // namespace radscat
