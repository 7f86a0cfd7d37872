#include "radscat/functionals.hpp"

#include <algorithm>
#include <array>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "radscat/angular.hpp"
#include "radscat/error.hpp"
#include "radscat/parallel.hpp"
#include "radscat/quadrature.hpp"

namespace radscat {

namespace {

inline double jap(double x) { return std::sqrt(1.0 + x * x); }
inline double conf(double v, double s) { return std::pow(1.0 + v * v, s); }
inline double conf_d1(double v, double s) { return 2.0 * s * v * std::pow(1.0 + v * v, s - 1.0); }
inline double conf_d2(double v, double s) {
  return 2.0 * s * std::pow(1.0 + v * v, s - 2.0) * (1.0 + (2.0 * s - 1.0) * v * v);
}

bool selected(const FieldState& st, int i, int field) { return field < 0 || st.keys[i].field == field; }

// Integral over [0, R] of the piecewise linear interpolant of g_j = g(r_j).
double radial_trapz(const std::vector<double>& g, double h, double R) {
  const int J = static_cast<int>(g.size()) - 1;
  if (R <= 0.0 || J < 1) return 0.0;
  R = std::min(R, J * h);
  int n = std::min(static_cast<int>(std::floor(R / h)), J);
  std::vector<double> cells;
  cells.reserve(n + 1);
  for (int j = 0; j < n; ++j) cells.push_back(0.5 * h * (g[j] + g[j + 1]));
  const double rem = R - n * h;
  if (n < J && rem > 0.0) {
    const double th = rem / h;
    const double gR = (1.0 - th) * g[n] + th * g[n + 1];
    cells.push_back(0.5 * rem * (g[n] + gR));
  }
  return pairwise_sum(cells);
}

// Per-entry radial integrals summed in a fixed order.
template <class F>
double mode_sum(const FieldState& st, int field, double R, F&& integrand) {
  const int n = st.entries();
  std::vector<double> part(n, 0.0);
  parallel_for(n, [&](int i) {
    if (!selected(st, i, field)) return;
    std::vector<double> g(st.grid.J + 1);
    for (int j = 0; j <= st.grid.J; ++j) g[j] = integrand(i, j);
    part[i] = radial_trapz(g, st.grid.h, R);
  });
  return pairwise_sum(part);
}

double lambda_of(const FieldState& st, int i) { return st.keys[i].l * (st.keys[i].l + 1.0); }

double trapz_time(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> cells;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) cells.push_back(0.5 * (t[k + 1] - t[k]) * (y[k] + y[k + 1]));
  return pairwise_sum(cells);
}

}  // namespace

double weight_eval(const WeightSpec& w, double x) {
  switch (w.kind) {
    case WeightKind::constant:
      return 1.0;
    case WeightKind::w0:
      // q < 0: 2 + 2 mu int_q^0 (1+|s|)^{-1-2mu} ds in closed form
      return x > 0.0 ? 1.0 + std::pow(1.0 + x, -2.0 * w.mu) : 3.0 - std::pow(1.0 - x, -2.0 * w.mu);
    case WeightKind::w_gamma:
      return x > 0.0 ? 1.0 + std::pow(1.0 + x, -2.0 * w.mu) : 1.0 + std::pow(1.0 - x, 1.0 + 2.0 * w.gamma);
    case WeightKind::conformal:
      return conf(x, w.s);
  }
  return 1.0;
}

double weight_derivative(const WeightSpec& w, double x) {
  switch (w.kind) {
    case WeightKind::constant:
      return 0.0;
    case WeightKind::w0:
      return -2.0 * w.mu * std::pow(1.0 + std::abs(x), -1.0 - 2.0 * w.mu);
    case WeightKind::w_gamma:
      return x > 0.0 ? -2.0 * w.mu * std::pow(1.0 + x, -1.0 - 2.0 * w.mu)
                     : -(1.0 + 2.0 * w.gamma) * std::pow(1.0 - x, 2.0 * w.gamma);
    case WeightKind::conformal:
      return conf_d1(x, w.s);
  }
  return 0.0;
}

double energy_weighted(const FieldState& st, const WeightSpec& w, int field) {
  // |d phi|^2 r^2 = v^2 + (u_r - u/r)^2 + l(l+1) u^2 / r^2 per mode
  return mode_sum(st, field, st.grid.r_max(), [&](int i, int j) {
    const double v = st.v[i][j], uor = st.u_over_r(i, j), d = st.ur(i, j) - uor;
    return weight_eval(w, st.grid.r(j) - st.t) * (v * v + d * d + lambda_of(st, i) * uor * uor);
  });
}

double conformal_norm_plus(const FieldState& st, double s, int field) {
  const double t = st.t;
  const double sq = mode_sum(st, field, st.grid.r_max(), [&](int i, int j) {
    const double r = st.grid.r(j);
    const double fp = conf(t + r, s), fm = conf(t - r, s);
    const double v = st.v[i][j], ur = st.ur(i, j), uor = st.u_over_r(i, j);
    const double a = v + ur, b = v - ur, p = jap(t - r);
    const double u = st.u[i][j];
    return fp * (a * a + lambda_of(st, i) * uor * uor) + fm * (b * b + uor * uor + u * u / (p * p));
  });
  return std::sqrt(sq);
}

double conformal_energy_ER(const FieldState& st, double s, double R, int field) {
  const double t = st.t;
  return mode_sum(st, field, R, [&](int i, int j) {
    const double r = st.grid.r(j);
    const double fp = conf(t + r, s), fm = conf(t - r, s);
    const double v = st.v[i][j], ur = st.ur(i, j), uor = st.u_over_r(i, j);
    const double a = v + ur, b = v - ur;
    return fp * a * a + (fp + fm) * lambda_of(st, i) * uor * uor + fm * b * b;
  });
}

double cone_flux_FR(const ConeTrack& cone, double s, double t1, double t2) {
  std::vector<double> tt, yy;
  for (std::size_t k = 0; k < cone.t.size(); ++k) {
    const double t = cone.t[k];
    if (t < t1 - 1e-12 || t > t2 + 1e-12) continue;
    const double r = t - cone.c;
    tt.push_back(t);
    yy.push_back(conf(t + r, s) * cone.Lsq[k] + conf(t - r, s) * cone.angsq[k]);
  }
  if (tt.size() > 1 && tt.front() > tt.back()) {
    std::reverse(tt.begin(), tt.end());
    std::reverse(yy.begin(), yy.end());
  }
  return trapz_time(tt, yy);
}

double morawetz_bulk_slice(const FieldState& st, const std::vector<std::vector<double>>* S, double s, double Rt,
                           int field) {
  const double t = st.t;
  return mode_sum(st, field, Rt, [&](int i, int j) {
    const double r = st.grid.r(j);
    const double fp = conf(t + r, s), fm = conf(t - r, s);
    const double v = st.v[i][j], ur = st.ur(i, j), uor = st.u_over_r(i, j);
    double val = 0.0;
    if (S) val += r * (fp * (v + ur) + fm * (v - ur)) * (*S)[i][j];
    // -r d_r of the multiplier coefficient; 0 in the r -> 0 limit
    const double deform = r > 0.0 ? (fp - fm) / r - conf_d1(t + r, s) - conf_d1(t - r, s) : 0.0;
    val += deform * lambda_of(st, i) * uor * uor;
    return val;
  });
}

IdentityAudit morawetz_identity_audit(const Trajectory& tr, double s, double R, int field) {
  if (tr.states.size() < 2 || static_cast<int>(tr.states.size()) != tr.steps + 1)
    throw DomainError("identity audit needs a trajectory recorded at every step");
  const bool have_S = !tr.sources.empty();
  if (have_S && tr.sources.size() != tr.states.size())
    throw DomainError("identity audit: sources not recorded at every state");
  const FieldState* a = &tr.states.front();
  const FieldState* b = &tr.states.back();
  if (a->t > b->t) std::swap(a, b);
  const double t1 = a->t, t2 = b->t;
  if (R < t2 - t1) throw DomainError("identity audit: R must be at least t2 - t1");
  if (R > a->grid.r_max()) throw DomainError("identity audit: R beyond the radial grid");
  const double c = t2 - R;
  const ConeTrack* cone = nullptr;
  for (auto& ct : tr.cones)
    if (std::abs(ct.c - c) <= 1e-9 * std::max(1.0, std::abs(c))) cone = &ct;
  if (!cone) {
    std::ostringstream os;
    os << "identity audit: no cone track at t - r = " << c;
    throw DomainError(os.str());
  }

  IdentityAudit out;
  out.e1 = conformal_energy_ER(*a, s, R - (t2 - t1), field);
  out.e2 = conformal_energy_ER(*b, s, R, field);
  out.flux = cone_flux_FR(*cone, s, t1, t2);

  std::vector<double> tt(tr.states.size()), yy(tr.states.size());
  parallel_for(static_cast<int>(tr.states.size()), [&](int k) {
    const auto& st = tr.states[k];
    tt[k] = st.t;
    yy[k] = morawetz_bulk_slice(st, have_S ? &tr.sources[k] : nullptr, s, st.t - c, field);
  });
  if (tt.front() > tt.back()) {
    std::reverse(tt.begin(), tt.end());
    std::reverse(yy.begin(), yy.end());
  }
  out.bulk = trapz_time(tt, yy);
  out.lhs = 0.5 * out.e1 + out.flux;
  out.rhs = 0.5 * out.e2 + out.bulk;
  const double den = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.residual = den > 0.0 ? (out.lhs - out.rhs) / den : 0.0;
  return out;
}

double bulk_deform(double a, double t, double r) {
  using F = boost::multiprecision::cpp_bin_float_50;
  if (r == 0.0) return 0.0;
  const F A(a), T(t), Rr(r);
  auto f = [&](const F& v) { return pow(1 + v * v, A / 2) / A; };
  auto fp = [&](const F& v) { return v * pow(1 + v * v, A / 2 - 1); };
  const F res = (f(T + Rr) - f(T - Rr)) / Rr - fp(T + Rr) - fp(T - Rr);
  return static_cast<double>(res);
}

BulkSignResult bulk_sign_check(double a, const std::vector<double>& ts, const std::vector<double>& rs) {
  if (!(a > 0.0)) throw DomainError("bulk sign check: exponent must be positive");
  BulkSignResult out;
  out.conforming = a >= 2.0;
  out.max_slack = -std::numeric_limits<double>::infinity();
  for (double t : ts)
    for (double r : rs) {
      if (r < 0.0) throw DomainError("bulk sign check: negative radius");
      const double d = bulk_deform(a, t, r);
      if (d > out.max_slack) {
        out.max_slack = d;
        out.t_at = t;
        out.r_at = r;
      }
    }
  return out;
}

HardyReport hardy_checks(const FieldState& st, double s, double budget, int field) {
  const double t = st.t, Rm = st.grid.r_max();
  HardyReport rep;
  rep.lhs_weighted = mode_sum(st, field, Rm, [&](int i, int j) {
    const double u = st.u[i][j];
    return conf_d2(t - st.grid.r(j), s) * u * u;
  });
  double boundary = 0.0;
  for (int i = 0; i < st.entries(); ++i)
    if (selected(st, i, field)) boundary += st.u[i][st.grid.J] * st.u[i][st.grid.J];
  rep.rhs_weighted = mode_sum(st, field, Rm, [&](int i, int j) {
    const double r = st.grid.r(j);
    const double v = st.v[i][j], ur = st.ur(i, j);
    return conf(t + r, s) * (v + ur) * (v + ur) + conf(t - r, s) * (v - ur) * (v - ur);
  }) + std::abs(conf_d1(t - Rm, s)) * boundary;

  rep.lhs_origin = mode_sum(st, field, Rm, [&](int i, int j) {
    const double uor = st.u_over_r(i, j);
    return conf(t - st.grid.r(j), s) * uor * uor;
  });
  rep.rhs_origin = mode_sum(st, field, Rm, [&](int i, int j) {
    const double p2 = 1.0 + std::pow(t - st.grid.r(j), 2);
    const double u = st.u[i][j], ur = st.ur(i, j);
    return std::pow(p2, s - 1.0) * u * u + std::pow(p2, s) * ur * ur;
  });
  auto ratio = [](double l, double r) {
    if (r > 0.0) return l / r;
    return l > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  rep.ratio_weighted = ratio(rep.lhs_weighted, rep.rhs_weighted);
  rep.ratio_origin = ratio(rep.lhs_origin, rep.rhs_origin);
  rep.within_budget = rep.ratio_weighted <= budget && rep.ratio_origin <= budget;
  return rep;
}

namespace {

// Radial derivative of samples on the grid, second order everywhere.
std::vector<double> d_r(const std::vector<double>& f, double h) {
  const int J = static_cast<int>(f.size()) - 1;
  std::vector<double> d(J + 1);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[J] = (3.0 * f[J] - 4.0 * f[J - 1] + f[J - 2]) / (2.0 * h);
  for (int j = 1; j < J; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  return d;
}

// f / r with the linear limit at the origin.
std::vector<double> over_r(const std::vector<double>& f, double h) {
  std::vector<double> o(f.size());
  for (std::size_t j = 1; j < f.size(); ++j) o[j] = f[j] / (j * h);
  o[0] = (f.size() > 1) ? (f[1] - f[0]) / h : 0.0;
  return o;
}

// Mode coefficient of phi and d_t phi from the u-variables.
void phi_pair(const FieldState& st, int i, std::vector<double>& f, std::vector<double>& ft) {
  const int J = st.grid.J;
  f.resize(J + 1);
  ft.resize(J + 1);
  for (int j = 0; j <= J; ++j) {
    f[j] = st.u_over_r(i, j);
    ft[j] = j > 0 ? st.v[i][j] / st.grid.r(j) : (st.keys[i].l % 2 == 0 ? st.v[i][1] / st.grid.h : 0.0);
  }
}

double weighted_l2sq(const std::vector<double>& g, const FieldState& st, double s) {
  std::vector<double> y(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double r = st.grid.r(static_cast<int>(j));
    y[j] = std::pow(1.0 + (st.t - r) * (st.t - r), s - 1.0) * g[j] * g[j] * r * r;
  }
  return radial_trapz(y, st.grid.h, st.grid.r_max());
}

// First-order family used for |I| <= 2: each maps (f, f_t) to Z f.
enum Zop { kId, kDt, kDr, kAng, kScale, kRot, kBoostR, kBoostA, kZcount };

std::vector<double> apply_z(Zop z, const std::vector<double>& f, const std::vector<double>& ft, double t, double h,
                            double lam) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  const double sl = std::sqrt(lam);
  switch (z) {
    case kId:
      return f;
    case kDt:
      return ft;
    case kDr:
      return d_r(f, h);
    case kAng: {
      auto o = over_r(f, h);
      for (auto& x : o) x *= sl;
      return o;
    }
    case kScale: {
      auto fr = d_r(f, h);
      for (std::size_t j = 0; j < n; ++j) out[j] = t * ft[j] + j * h * fr[j];
      return out;
    }
    case kRot:
      for (std::size_t j = 0; j < n; ++j) out[j] = sl * f[j];
      return out;
    case kBoostR: {
      auto fr = d_r(f, h);
      for (std::size_t j = 0; j < n; ++j) out[j] = t * fr[j] + j * h * ft[j];
      return out;
    }
    case kBoostA: {
      auto o = over_r(f, h);
      for (auto& x : o) x *= t * sl;
      return o;
    }
    default:
      break;
  }
  return out;
}

// d_t (Z f) given f, f_t, f_tt.
std::vector<double> apply_z_dt(Zop z, const std::vector<double>& f, const std::vector<double>& ft,
                               const std::vector<double>& ftt, double t, double h, double lam) {
  const std::size_t n = f.size();
  std::vector<double> out(n);
  switch (z) {
    case kId:
      return ft;
    case kDt:
      return ftt;
    case kDr:
    case kAng:
    case kRot:
      return apply_z(z, ft, ftt, t, h, lam);
    case kScale: {
      auto frt = d_r(ft, h);
      for (std::size_t j = 0; j < n; ++j) out[j] = ft[j] + t * ftt[j] + j * h * frt[j];
      return out;
    }
    case kBoostR: {
      auto fr = d_r(f, h), frt = d_r(ft, h);
      for (std::size_t j = 0; j < n; ++j) out[j] = fr[j] + t * frt[j] + j * h * ftt[j];
      return out;
    }
    case kBoostA: {
      auto o = over_r(f, h), ot = over_r(ft, h);
      const double sl = std::sqrt(lam);
      for (std::size_t j = 0; j < n; ++j) out[j] = sl * (o[j] + t * ot[j]);
      return out;
    }
    default:
      break;
  }
  return out;
}

}  // namespace

double norm_Z_weighted(const FieldState& st, double s, int field) {
  const int n = st.entries();
  const double t = st.t;
  // squares per (entry, component)
  enum { cId, cDt, cTrans, cScale, cRot, cBp, cBm, cBa, cN };
  std::vector<std::array<double, cN>> sq(n);
  parallel_for(n, [&](int i) {
    sq[i].fill(0.0);
    if (!selected(st, i, field)) return;
    const int J = st.grid.J;
    const double lam = lambda_of(st, i);
    std::array<std::vector<double>, cN> g;
    for (auto& x : g) x.assign(J + 1, 0.0);
    for (int j = 0; j <= J; ++j) {
      const double r = st.grid.r(j);
      const double v = st.v[i][j], ur = st.ur(i, j), uor = st.u_over_r(i, j);
      const double w = std::pow(1.0 + (t - r) * (t - r), s - 1.0);
      // all integrands are r^2 |.|^2 in u-variables
      const double phi_r_r = ur - uor;  // r d_r phi
      g[cId][j] = w * st.u[i][j] * st.u[i][j];
      g[cDt][j] = w * v * v;
      g[cTrans][j] = w * (phi_r_r * phi_r_r + lam * uor * uor);
      const double sc = t * v + r * phi_r_r;
      g[cScale][j] = w * sc * sc;
      g[cRot][j] = w * lam * st.u[i][j] * st.u[i][j];
      const double Lp = v + ur - uor, Lm = v - ur + uor;  // r L phi, r Lbar phi
      g[cBp][j] = w * (t + r) * (t + r) * Lp * Lp;
      g[cBm][j] = w * (t - r) * (t - r) * Lm * Lm;
      g[cBa][j] = w * t * t * lam * uor * uor;
    }
    for (int c = 0; c < cN; ++c) sq[i][c] = radial_trapz(g[c], st.grid.h, st.grid.r_max());
  });
  double total = 0.0;
  for (int c = 0; c < cN; ++c) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = sq[i][c];
    total += std::sqrt(pairwise_sum(col));
  }
  return total;
}

double norm_Z_weighted2(const FieldState& st, double s, const std::vector<std::vector<double>>* S, int field) {
  const int n = st.entries();
  const int J = st.grid.J;
  const double h = st.grid.h, t = st.t;
  constexpr int n1 = kZcount, n2 = kZcount * kZcount;
  // slot 0..n1-1: first order (kId is |I| = 0), then pairs
  std::vector<std::vector<double>> sq(n, std::vector<double>(n1 + n2, 0.0));
  parallel_for(n, [&](int i) {
    if (!selected(st, i, field)) return;
    const double lam = lambda_of(st, i);
    std::vector<double> f, ft;
    phi_pair(st, i, f, ft);
    // phi_tt from the equation: (u_rr - l(l+1) u / r^2 - r S) / r
    std::vector<double> ftt(J + 1, 0.0);
    const auto& u = st.u[i];
    for (int j = 1; j < J; ++j) {
      const double r = st.grid.r(j);
      const double urr = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
      ftt[j] = (urr - lam * u[j] / (r * r) - r * (S ? (*S)[i][j] : 0.0)) / r;
    }
    ftt[0] = 2.0 * ftt[1] - ftt[2];
    ftt[J] = 2.0 * ftt[J - 1] - ftt[J - 2];
    for (int a = 0; a < n1; ++a) {
      const auto za = apply_z(static_cast<Zop>(a), f, ft, t, h, lam);
      sq[i][a] = weighted_l2sq(za, st, s);
      if (a == kId) continue;
      const auto zat = apply_z_dt(static_cast<Zop>(a), f, ft, ftt, t, h, lam);
      for (int b = 1; b < n1; ++b)
        sq[i][n1 + a * n1 + b] = weighted_l2sq(apply_z(static_cast<Zop>(b), za, zat, t, h, lam), st, s);
    }
  });
  double total = 0.0;
  for (int c = 0; c < n1 + n2; ++c) {
    std::vector<double> col(n);
    for (int i = 0; i < n; ++i) col[i] = sq[i][c];
    total += std::sqrt(pairwise_sum(col));
  }
  return total;
}

double sup_envelope(const FieldState& st, double s, int field, double r_min) {
  int L = 0;
  for (int i = 0; i < st.entries(); ++i)
    if (selected(st, i, field)) L = std::max(L, st.keys[i].l);
  const SphereSampler sphere(L);
  const int J = st.grid.J;
  std::vector<double> best(J + 1, 0.0);
  parallel_for(J + 1, [&](int j) {
    const double r = st.grid.r(j);
    if (r < r_min) return;
    ModeVector c(mode_count(L), 0.0);
    bool any = false;
    for (int i = 0; i < st.entries(); ++i)
      if (selected(st, i, field)) {
        const double x = st.u_over_r(i, j);
        c[mode_index(st.keys[i].l, st.keys[i].m)] += x;
        any = any || x != 0.0;
      }
    if (!any) return;
    best[j] = jap(st.t + r) * std::pow(jap(st.t - r), s - 0.5) * sphere.sup_abs(c);
  });
  return *std::max_element(best.begin(), best.end());
}

KSCheck ks_pointwise_check(const FieldState& st, double s, const std::vector<std::vector<double>>* S, int field) {
  KSCheck k;
  k.numerator = sup_envelope(st, s, field);
  k.denominator = norm_Z_weighted2(st, s, S, field);
  k.constant = k.denominator > 0.0 ? k.numerator / k.denominator : 0.0;
  return k;
}

std::vector<OriginSample> origin_decay_check(const Trajectory& tr, double gamma, int field) {
  if (tr.origin_t.empty()) throw DomainError("origin check needs record_origin");
  if (tr.states.empty()) throw DomainError("origin check needs a recorded state");
  int i0 = -1;
  const FieldState& ref = tr.states[0];
  for (int i = 0; i < ref.entries(); ++i)
    if (ref.keys[i].l == 0 && (field < 0 || ref.keys[i].field == field)) i0 = i;
  const double y00 = 1.0 / std::sqrt(4.0 * std::numbers::pi);
  std::vector<OriginSample> out;
  for (const auto& cone : tr.cones) {
    const double t1 = cone.c;
    // origin value at the step nearest t1
    std::size_t kb = 0;
    for (std::size_t k = 0; k < tr.origin_t.size(); ++k)
      if (std::abs(tr.origin_t[k] - t1) < std::abs(tr.origin_t[kb] - t1)) kb = k;
    if (std::abs(tr.origin_t[kb] - t1) > 0.5 * std::abs(tr.dt) + 1e-12) continue;
    std::vector<double> tt, yy;
    for (std::size_t k = 0; k < cone.t.size(); ++k) {
      tt.push_back(cone.t[k]);
      yy.push_back(cone.Lphisq[k] + cone.angsq[k]);
    }
    if (tt.size() > 1 && tt.front() > tt.back()) {
      std::reverse(tt.begin(), tt.end());
      std::reverse(yy.begin(), yy.end());
    }
    OriginSample o;
    o.t = t1;
    const double val = i0 >= 0 ? std::abs(tr.origin_ur[kb][i0]) * y00 : 0.0;
    o.scaled = std::pow(t1, 1.0 + gamma) * val;
    o.bound = std::pow(1.0 + t1, 0.5 + gamma) * std::sqrt(std::max(0.0, trapz_time(tt, yy)));
    o.ratio = o.bound > 0.0 ? o.scaled / o.bound : (o.scaled > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    out.push_back(o);
  }
  std::sort(out.begin(), out.end(), [](const OriginSample& a, const OriginSample& b) { return a.t < b.t; });
  return out;
}

FitResult fit_decay(const std::vector<std::pair<double, double>>& series, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (auto& [t, v] : series) {
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    if (!(t > 0.0) || !(v > 0.0)) {
      std::ostringstream os;
      os << "fit_decay: non-positive sample (t=" << t << ", value=" << v << ")";
      throw DomainError(os.str());
    }
    x.push_back(std::log(t));
    y.push_back(std::log(v));
  }
  const int n = static_cast<int>(x.size());
  if (n < 5) {
    std::ostringstream os;
    os << "fit_decay: " << n << " samples in [" << t_lo << ", " << t_hi << "], need at least 5";
    throw DomainError(os.str());
  }
  const double mx = pairwise_sum(x) / n, my = pairwise_sum(y) / n;
  std::vector<double> sxx(n), sxy(n), syy(n);
  for (int k = 0; k < n; ++k) {
    sxx[k] = (x[k] - mx) * (x[k] - mx);
    sxy[k] = (x[k] - mx) * (y[k] - my);
    syy[k] = (y[k] - my) * (y[k] - my);
  }
  const double Sxx = pairwise_sum(sxx), Sxy = pairwise_sum(sxy), Syy = pairwise_sum(syy);
  if (!(Sxx > 0.0)) throw DomainError("fit_decay: window spans a single time");
  FitResult f;
  f.exponent = Sxy / Sxx;
  f.amplitude = std::exp(my - f.exponent * mx);
  f.r_squared = Syy > 0.0 ? Sxy * Sxy / (Sxx * Syy) : 1.0;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.samples = n;
  return f;
}

std::pair<double, double> default_fit_window(const std::vector<std::pair<double, double>>& series) {
  if (series.empty()) throw DomainError("fit_decay: empty series");
  double t0 = series.front().first, tmax = series.front().first;
  for (auto& p : series) {
    t0 = std::min(t0, p.first);
    tmax = std::max(tmax, p.first);
  }
  if (t0 > 0.0 && tmax >= 100.0 * t0 * (1.0 - 1e-12)) return {10.0 * t0, 100.0 * t0};
  return {tmax / 4.0, tmax};
}

FitResult fit_decay(const std::vector<std::pair<double, double>>& series) {
  auto [lo, hi] = default_fit_window(series);
  return fit_decay(series, lo, hi);
}

double weighted_source_norm(const RadialGrid& g, double t, const std::vector<std::vector<double>>& S, double s) {
  std::vector<double> part(S.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    std::vector<double> y(g.J + 1);
    for (int j = 0; j <= g.J; ++j) {
      const double r = g.r(j);
      y[j] = std::pow(1.0 + (t + r) * (t + r), s) * S[i][j] * S[i][j] * r * r;
    }
    part[i] = radial_trapz(y, g.h, g.r_max());
  }
  return std::sqrt(pairwise_sum(part));
}

}  // namespace radscat
