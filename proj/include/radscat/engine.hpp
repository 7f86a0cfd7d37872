#pragma once

#include <functional>
#include <string>
#include <vector>

namespace radscat {

// Uniform radial grid r_j = j h, j = 0..J.
struct RadialGrid {
  double h = 0.1;
  int J = 0;
  RadialGrid() = default;
  RadialGrid(double h_, int J_);
  double r(int j) const { return j * h; }
  double r_max() const { return J * h; }
  // Smallest grid containing 2T + (T - t0) plus margin_cells points.
  static RadialGrid for_run(double h, double T, double t0, int margin_cells = 10);
};

struct ModeKey {
  int field = 0;  // which unknown in a coupled system
  int l = 0;
  int m = 0;
  bool operator==(const ModeKey&) const = default;
};

// One time slice. u = r * (mode of the field), v = d_t u.
struct FieldState {
  double t = 0.0;
  RadialGrid grid;
  std::vector<ModeKey> keys;
  std::vector<std::vector<double>> u, v;

  static FieldState zeros(const RadialGrid& g, std::vector<ModeKey> keys, double t);
  int entries() const { return static_cast<int>(keys.size()); }
  int find(int field, int l, int m) const;
  // d_r u at grid point j (centered; parity ghost at r = 0, one-sided at J)
  double ur(int i, int j) const;
  // u / r with the r -> 0 limit d_r u(0)
  double u_over_r(int i, int j) const;
};

// Fills S[i][j], the mode-i coefficient of the right-hand side of box phi = S
// at r_j, for the given (substage) state. Entries at j = 0 and j = J are ignored.
using SourceFn = std::function<void(const FieldState& stage, std::vector<std::vector<double>>& S)>;

// Per-step samples on the outgoing cone t - r = c, at the interpolated foot.
struct ConeTrack {
  double c = 0.0;
  int field = -1;                // restrict to one field tag, -1 for all
  std::vector<double> t;
  std::vector<double> Lsq;       // sum (v + u_r)^2            = |L(r phi)|^2 integrated over S^2
  std::vector<double> angsq;     // sum l(l+1) u^2 / r^2       = |r grad_S phi|^2 integrated
  std::vector<double> Lphisq;    // sum (v + u_r - u/r)^2      = r^2 |L phi|^2 integrated
};

struct SolveOptions {
  double dt = 0.0;                     // magnitude of the step; adjusted down to land on t0
  std::vector<double> record_times;    // snapped to the nearest step
  bool record_every_step = false;
  bool record_sources = false;         // store S at recorded states
  bool record_origin = false;          // store d_r u(t, 0) per step
  std::vector<ConeTrack> cones;        // c and field set by caller
  bool check_containment = true;
  double containment_tol = 1e-8;       // relative amplitude allowed in the last 10 points
  double cfl_limit = 2.8;              // dt sqrt(4 + l(l+1)) / h
  std::function<void(const FieldState&)> observer;  // called after every step
};

struct Trajectory {
  std::vector<FieldState> states;                             // decreasing t for backward solves
  std::vector<std::vector<std::vector<double>>> sources;       // parallel to states when recorded
  std::vector<ConeTrack> cones;
  std::vector<double> origin_t;
  std::vector<std::vector<double>> origin_ur;                 // [step][entry]
  double dt = 0.0;
  int steps = 0;
};

// RK4 method of lines for d_t u = v, d_t v = u_rr - l(l+1) u / r^2 - r S from
// data.t to t_end (either direction). u(0) = u(R_max) = 0.
Trajectory evolve(const FieldState& data, const SourceFn& source, double t_end, const SolveOptions& opt);

// evolve() with t_end = t0 < data.t.
Trajectory solve_backward(const FieldState& data_at_T, const SourceFn& source, double t0, const SolveOptions& opt);

// Centered discretisation of -d_t^2 + d_r^2 - l(l+1)/r^2 applied to u at the
// middle slice; interior points only (endpoints set to 0).
std::vector<double> discrete_box(const std::vector<double>& u_prev, const std::vector<double>& u_mid,
                                 const std::vector<double>& u_next, double dt, const RadialGrid& g, int l);
// Same with an analytic second time derivative.
std::vector<double> discrete_box(const std::vector<double>& u, const std::vector<double>& utt,
                                 const RadialGrid& g, int l);

struct OrderEstimate {
  double order = 0.0;
  bool monotone = true;
  std::string warning;
};

// Errors at h, h/2, h/4 -> observed order.
OrderEstimate convergence_order(double e_h, double e_h2, double e_h4);
// Oracle-free: values at h, h/2, h/4 -> log2(|f_h - f_h2| / |f_h2 - f_h4|).
OrderEstimate richardson_order(double f_h, double f_h2, double f_h4);

}  // namespace radscat
