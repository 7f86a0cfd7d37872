#pragma once

#include <memory>
#include <vector>

namespace radscat {

// Real spherical harmonics, unit L2(S^2) norm, no Condon-Shortley phase.
// m > 0 carries cos(m phi), m < 0 carries sin(|m| phi).
inline int mode_index(int l, int m) { return l * l + l + m; }
inline int mode_count(int L) { return (L + 1) * (L + 1); }
inline int mode_l(int idx) {
  int l = 0;
  while ((l + 1) * (l + 1) <= idx) ++l;
  return l;
}
inline int mode_m(int idx) {
  int l = mode_l(idx);
  return idx - l * l - l;
}

// Coefficients indexed by mode_index(l, m) for 0 <= l <= L.
using ModeVector = std::vector<double>;
inline int band_limit_of(const ModeVector& mv) {
  int L = 0;
  while (mode_count(L) < static_cast<int>(mv.size())) ++L;
  return L;
}

// Normalized associated Legendre values pbar[mode_index(l, m)] for m >= 0, so
// that Y_l0 = pbar_l0 and Y_lm = sqrt(2) pbar_lm cos(m phi) for m > 0.
void normalized_legendre(int L, double x, std::vector<double>& pbar);

double real_sh(int l, int m, double theta, double phi);

// Gauss-Legendre nodes in cos(theta) times a uniform azimuth grid.
class AngularGrid {
 public:
  AngularGrid(int L, int n_theta = 0, int n_phi = 0);

  int band_limit() const { return L_; }
  int n_theta() const { return nt_; }
  int n_phi() const { return np_; }
  int size() const { return nt_ * np_; }
  double cos_theta(int i) const { return x_[i]; }
  double phi(int j) const;
  // point index i * n_phi + j
  double weight(int p) const { return w_[p]; }
  const std::vector<double>& weights() const { return w_; }

  // values[p] = sum c_lm Y_lm(point p); coefficients with l > L rejected.
  void synthesize(const double* coeffs, int L_in, double* values) const;
  // coeffs[idx] = sum_p w_p values[p] Y_idx(p) for modes l <= L_out <= L.
  void analyze(const double* values, double* coeffs, int L_out) const;
  // Y value of mode idx at point p.
  double y(int p, int idx) const { return Y_[static_cast<std::size_t>(p) * nm_ + idx]; }

 private:
  int L_, nt_, np_, nm_;
  std::vector<double> x_, w_, Y_;
};

std::vector<double> synthesize(const ModeVector& mv, const AngularGrid& grid);
ModeVector analyze(const std::vector<double>& values, const AngularGrid& grid);
ModeVector laplace_beltrami(const ModeVector& mv);

// Shared immutable grid for band limit L (n_theta = L+1, n_phi = 2L+1).
std::shared_ptr<const AngularGrid> shared_grid(int L);
// Shared grid for dealiased quadratic products of band-L fields.
std::shared_ptr<const AngularGrid> dealias_grid(int L);

// Real harmonics tabulated on a uniform (theta, phi) lattice that includes both
// poles, (4L+9) x (8L+8) points; used for sup norms over the sphere.
class SphereSampler {
 public:
  explicit SphereSampler(int L);
  int band_limit() const { return L_; }
  int size() const { return npts_; }
  double sup_abs(const ModeVector& c) const;

 private:
  int L_, nm_, npts_;
  std::vector<double> Y_;  // [point][mode]
};

// Product of two band-limited fields, truncated to band L (default: the
// larger input band limit). Exact for the retained modes.
ModeVector pointwise_product(const ModeVector& a, const ModeVector& b, int L = -1);

// Nonzero coupling coefficients g = int Y_i Y_j Y_k over S^2 for i in active_a,
// j in active_b and k <= mode_count(L_out) - 1, so that (ab)_k = sum g a_i b_j.
struct GauntTriple {
  int i, j, k;
  double g;
};
std::vector<GauntTriple> gaunt_table(const std::vector<int>& active_a, const std::vector<int>& active_b, int L_out);

}  // namespace radscat
