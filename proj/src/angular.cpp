#include "radscat/angular.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "radscat/error.hpp"
#include "radscat/quadrature.hpp"

namespace radscat {

void normalized_legendre(int L, double x, std::vector<double>& p) {
  p.assign(mode_count(L), 0.0);
  const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  for (int m = 0; m <= L; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx;
    p[mode_index(m, m)] = pmm;
    if (m + 1 > L) break;
    double p1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
    p[mode_index(m + 1, m)] = p1;
    double p0 = pmm;
    for (int l = m + 2; l <= L; ++l) {
      double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
      double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
      double p2 = a * (x * p1 - b * p0);
      p[mode_index(l, m)] = p2;
      p0 = p1;
      p1 = p2;
    }
  }
}

double real_sh(int l, int m, double theta, double phi) {
  std::vector<double> p;
  normalized_legendre(l, std::cos(theta), p);
  const int am = std::abs(m);
  const double v = p[mode_index(l, am)];
  if (m == 0) return v;
  return std::numbers::sqrt2 * v * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

AngularGrid::AngularGrid(int L, int n_theta, int n_phi)
    : L_(L), nt_(n_theta > 0 ? n_theta : L + 1), np_(n_phi > 0 ? n_phi : 2 * L + 1), nm_(mode_count(L)) {
  if (L < 0) throw DomainError("AngularGrid: negative band limit");
  if (nt_ < L + 1 || np_ < 2 * L + 1)
    throw DomainError("AngularGrid: need n_theta >= L+1 and n_phi >= 2L+1 for exact quadrature");
  GaussLegendre gl = gauss_legendre(nt_);
  x_ = gl.x;
  w_.resize(size());
  Y_.resize(static_cast<std::size_t>(size()) * nm_);
  std::vector<double> p;
  for (int i = 0; i < nt_; ++i) {
    normalized_legendre(L_, x_[i], p);
    for (int j = 0; j < np_; ++j) {
      const int pt = i * np_ + j;
      w_[pt] = gl.w[i] * 2.0 * std::numbers::pi / np_;
      const double ph = phi(j);
      double* row = &Y_[static_cast<std::size_t>(pt) * nm_];
      for (int l = 0; l <= L_; ++l) {
        row[mode_index(l, 0)] = p[mode_index(l, 0)];
        for (int m = 1; m <= l; ++m) {
          const double v = std::numbers::sqrt2 * p[mode_index(l, m)];
          row[mode_index(l, m)] = v * std::cos(m * ph);
          row[mode_index(l, -m)] = v * std::sin(m * ph);
        }
      }
    }
  }
}

double AngularGrid::phi(int j) const { return 2.0 * std::numbers::pi * j / np_; }

void AngularGrid::synthesize(const double* c, int L_in, double* values) const {
  if (L_in > L_) throw DomainError("synthesize: mode band limit exceeds grid band limit");
  const int nm = mode_count(L_in);
  for (int p = 0; p < size(); ++p) {
    const double* row = &Y_[static_cast<std::size_t>(p) * nm_];
    double s = 0.0;
    for (int k = 0; k < nm; ++k) s += c[k] * row[k];
    values[p] = s;
  }
}

void AngularGrid::analyze(const double* values, double* c, int L_out) const {
  if (L_out > L_) throw DomainError("analyze: requested band limit exceeds grid band limit");
  const int nm = mode_count(L_out);
  for (int k = 0; k < nm; ++k) c[k] = 0.0;
  for (int p = 0; p < size(); ++p) {
    const double wv = w_[p] * values[p];
    if (wv == 0.0) continue;
    const double* row = &Y_[static_cast<std::size_t>(p) * nm_];
    for (int k = 0; k < nm; ++k) c[k] += wv * row[k];
  }
}

std::vector<double> synthesize(const ModeVector& mv, const AngularGrid& grid) {
  std::vector<double> v(grid.size());
  grid.synthesize(mv.data(), band_limit_of(mv), v.data());
  return v;
}

ModeVector analyze(const std::vector<double>& values, const AngularGrid& grid) {
  if (static_cast<int>(values.size()) != grid.size()) throw DomainError("analyze: value count does not match grid");
  ModeVector c(mode_count(grid.band_limit()));
  grid.analyze(values.data(), c.data(), grid.band_limit());
  return c;
}

ModeVector laplace_beltrami(const ModeVector& mv) {
  ModeVector out(mv.size());
  for (std::size_t k = 0; k < mv.size(); ++k) {
    const int l = mode_l(static_cast<int>(k));
    out[k] = -double(l) * (l + 1) * mv[k];
  }
  return out;
}

namespace {

std::shared_ptr<const AngularGrid> cached(std::map<int, std::shared_ptr<const AngularGrid>>& cache, int key,
                                          int L, int nt, int np) {
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto g = std::make_shared<const AngularGrid>(L, nt, np);
  cache[key] = g;
  return g;
}

}  // namespace

std::shared_ptr<const AngularGrid> shared_grid(int L) {
  static std::map<int, std::shared_ptr<const AngularGrid>> cache;
  return cached(cache, L, L, L + 1, 2 * L + 1);
}

std::shared_ptr<const AngularGrid> dealias_grid(int L) {
  static std::map<int, std::shared_ptr<const AngularGrid>> cache;
  const int Lp = (3 * L + 1) / 2;
  return cached(cache, L, Lp, Lp + 1, 2 * Lp + 1);
}

ModeVector pointwise_product(const ModeVector& a, const ModeVector& b, int L) {
  const int La = band_limit_of(a), Lb = band_limit_of(b);
  if (L < 0) L = std::max(La, Lb);
  const int Lg = std::max({L, La, Lb});
  auto g = dealias_grid(Lg);
  std::vector<double> va(g->size()), vb(g->size());
  g->synthesize(a.data(), La, va.data());
  g->synthesize(b.data(), Lb, vb.data());
  for (int p = 0; p < g->size(); ++p) va[p] *= vb[p];
  ModeVector c(mode_count(L));
  g->analyze(va.data(), c.data(), L);
  return c;
}

SphereSampler::SphereSampler(int L) : L_(L), nm_(mode_count(L)) {
  if (L < 0) throw DomainError("SphereSampler: negative band limit");
  const int nt = 4 * L + 9, np = 8 * L + 8;
  npts_ = nt * np;
  Y_.assign(static_cast<std::size_t>(npts_) * nm_, 0.0);
  std::vector<double> pbar;
  for (int a = 0; a < nt; ++a) {
    normalized_legendre(L, std::cos(std::numbers::pi * a / (nt - 1)), pbar);
    for (int b = 0; b < np; ++b) {
      const double ph = 2.0 * std::numbers::pi * b / np;
      double* y = &Y_[static_cast<std::size_t>(a * np + b) * nm_];
      for (int l = 0; l <= L; ++l) {
        y[mode_index(l, 0)] = pbar[mode_index(l, 0)];
        for (int m = 1; m <= l; ++m) {
          y[mode_index(l, m)] = std::numbers::sqrt2 * pbar[mode_index(l, m)] * std::cos(m * ph);
          y[mode_index(l, -m)] = std::numbers::sqrt2 * pbar[mode_index(l, m)] * std::sin(m * ph);
        }
      }
    }
  }
}

double SphereSampler::sup_abs(const ModeVector& c) const {
  const int n = std::min(nm_, static_cast<int>(c.size()));
  for (std::size_t k = n; k < c.size(); ++k)
    if (c[k] != 0.0) throw DomainError("SphereSampler: coefficients above the band limit");
  double best = 0.0;
  for (int p = 0; p < npts_; ++p) {
    const double* y = &Y_[static_cast<std::size_t>(p) * nm_];
    double v = 0.0;
    for (int k = 0; k < n; ++k) v += c[k] * y[k];
    best = std::max(best, std::abs(v));
  }
  return best;
}

std::vector<GauntTriple> gaunt_table(const std::vector<int>& active_a, const std::vector<int>& active_b, int L_out) {
  if (L_out < 0) throw DomainError("gaunt_table: negative band limit");
  std::vector<GauntTriple> out;
  for (int i : active_a)
    for (int j : active_b) {
      if (i < 0 || j < 0) throw DomainError("gaunt_table: negative mode index");
      ModeVector ei(i + 1, 0.0), ej(j + 1, 0.0);
      ei.resize(mode_count(band_limit_of(ei)), 0.0);
      ej.resize(mode_count(band_limit_of(ej)), 0.0);
      ei[i] = 1.0;
      ej[j] = 1.0;
      const ModeVector c = pointwise_product(ei, ej, L_out);
      for (int k = 0; k < static_cast<int>(c.size()); ++k)
        if (std::abs(c[k]) > 1e-13) out.push_back({i, j, k, c[k]});
    }
  return out;
}

}  // namespace radscat

