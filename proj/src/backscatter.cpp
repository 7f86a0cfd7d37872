#include "radscat/backscatter.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "radscat/cutoff.hpp"
#include "radscat/error.hpp"
#include "radscat/jet.hpp"
#include "radscat/parallel.hpp"
#include "radscat/quadrature.hpp"

namespace radscat {

namespace {

inline double jap(double x) { return std::sqrt(1.0 + x * x); }

void check_k(int k) {
  if (k < 2 || k > 4) throw DomainError("backscatter: k must be 2, 3 or 4");
}

// Interval of q where t + r + q > 8 <q>, outside of which chi(<q>/rho) = 0 for every angle.
bool cutoff_window(double t, double r, double& lo, double& hi) {
  const double tr = t + r;
  auto g = [tr](double q) { return tr + q - 8.0 * jap(q); };
  const double qs = 1.0 / std::sqrt(63.0);
  if (g(qs) <= 0.0) return false;
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t it = 200;
  auto a = boost::math::tools::toms748_solve(g, qs - tr - 1.0, qs, tol, it);
  it = 200;
  auto b = boost::math::tools::toms748_solve(g, qs, tr + 1.0, tol, it);
  lo = 0.5 * (a.first + a.second);
  hi = 0.5 * (b.first + b.second);
  return true;
}

struct KernelCtx {
  int k;
  int p;
  double t, r;
  const GaussLegendre* gl;
};

double chi_pow(double s, int p) {
  const double c = chi_cutoff()(s);
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= c;
  return out;
}

// (1/4 pi) int_{S^2} kernel(q, <omega, sigma>) Y_l(sigma) dS = Y_l(omega) * K_l(q), with
// K_l(q) = (1/2) int_{-1}^{1} kernel(mu) P_l(mu) d mu, written in x = r (1 - mu).
double angular_kernel(const KernelCtx& c, int l, double q) {
  const double A = c.t - c.r + q, B = c.t + c.r + q;
  if (!(A > 0.0)) return 0.0;
  const double jq = jap(q);
  const double xmax = 2.0 * c.r;
  const double x1 = std::min(A * B / (16.0 * jq) - A, xmax);  // chi = 1 below
  const double x2 = std::min(A * B / (8.0 * jq) - A, xmax);   // chi = 0 above
  if (x2 <= 0.0) return 0.0;
  auto base = [&](double x) {
    const double mu = 1.0 - x / c.r;
    const double P = boost::math::legendre_p(l, std::clamp(mu, -1.0, 1.0));
    switch (c.k) {
      case 2:
        return P / (A + x);
      case 3:
        return P / (A * B);
      default:
        return P * (A + x) / (A * A * B * B);
    }
  };
  double sum = 0.0;
  const auto& gl = *c.gl;
  if (x1 > 0.0) {
    if (c.k == 2) {
      // y = log(A + x); the 1/(A + x) factor cancels
      const double y0 = std::log(A), y1 = std::log(A + x1);
      const double half = 0.5 * (y1 - y0), mid = 0.5 * (y1 + y0);
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double y = mid + half * gl.x[i];
        const double x = std::exp(y) - A;
        sum += gl.w[i] * half * boost::math::legendre_p(l, std::clamp(1.0 - x / c.r, -1.0, 1.0));
      }
    } else {
      const double half = 0.5 * x1;
      for (std::size_t i = 0; i < gl.x.size(); ++i) sum += gl.w[i] * half * base(half + half * gl.x[i]);
    }
  }
  const double xa = std::max(x1, 0.0);
  if (x2 > xa) {
    // fixed composite rule so that K_l stays a smooth function of q
    const int panels = 8;
    const double w = (x2 - xa) / panels;
    for (int pn = 0; pn < panels; ++pn) {
      const double mid = xa + (pn + 0.5) * w;
      for (std::size_t i = 0; i < gl.x.size(); ++i) {
        const double x = mid + 0.5 * w * gl.x[i];
        sum += 0.5 * w * gl.w[i] * base(x) * chi_pow(2.0 * jq * (A + x) / (A * B), c.p);
      }
    }
  }
  return 0.5 * sum / c.r;
}

// Breaks of width at most w covering [a, b].
std::vector<double> uniform_breaks(double a, double b, double w) {
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / w)));
  std::vector<double> br(n + 1);
  for (int i = 0; i <= n; ++i) br[i] = a + (b - a) * i / n;
  return br;
}

double phi_k_mode(const Profile& prof, int l, const KernelCtx& c, const KernelQuadratureSpec& spec) {
  double wlo, whi;
  if (!cutoff_window(c.t, c.r, wlo, whi)) return 0.0;
  auto [sa, sb] = prof.negligible_outside();
  const double lower = c.r - c.t;
  const double lo = std::max({lower, wlo, sa}), hi = std::min(whi, sb);
  if (!(hi > lo)) return 0.0;
  auto integrand = [&](double q) { return prof.value(q) * angular_kernel(c, l, q); };
  const double pw = std::max(0.25, 0.5 * prof.scale());
  double total = 0.0;
  double start = lo;
  if (lo == lower) {
    // q = lower + e^s near the light-cone limit
    const double d = std::min(spec.subst_width, 0.5 * (hi - lo));
    const double s_hi = std::log(d), s_lo = std::log(d) - 36.0;
    auto g = [&](double s) {
      const double e = std::exp(s);
      return integrand(lower + e) * e;
    };
    total += integrate_panels(g, uniform_breaks(s_lo, s_hi, 2.0), spec.q_tol);
    start = lo + d;
  }
  if (hi > start) total += integrate_panels(integrand, uniform_breaks(start, hi, pw), spec.q_tol);
  return total;
}

ModeVector directions_to_y(int L, Direction w) {
  ModeVector y(mode_count(L));
  for (int idx = 0; idx < mode_count(L); ++idx) y[idx] = real_sh(mode_l(idx), mode_m(idx), w.theta, w.phi);
  return y;
}

// int_{lo}^{inf} g over the support of a profile
double profile_integral_from(const Profile& p, double lo, const RealFn& g, double tol) {
  auto [a, b] = p.negligible_outside();
  const double s = std::max(lo, a);
  if (std::isfinite(b)) {
    if (b <= s) return 0.0;
    return integrate_panels(g, uniform_breaks(s, b, std::max(1e-3, 0.5 * p.scale())), tol);
  }
  const double core_end = std::max(s, p.center() + 40.0 * std::max(1.0, p.scale()));
  double v = 0.0;
  if (core_end > s) v += integrate_panels(g, uniform_breaks(s, core_end, std::max(1e-3, 0.5 * p.scale())), tol);
  return v + integrate_half_line(g, core_end, tol);
}

}  // namespace

double kernel_source_constant(int k) {
  check_k(k);
  return k == 2 ? 1.0 : (k == 3 ? 0.5 : 0.25);
}

ModeVector phi_k_modes(const SourceProfile& n, int k, double t, double r, const KernelQuadratureSpec& spec) {
  check_k(k);
  if (!(r > 0.0)) throw DomainError("phi_k: r must be positive");
  if (spec.n_mu < 8 || spec.n_az < 8) throw DomainError("phi_k: node counts must be at least 8");
  if (!(spec.q_tol > 0.0)) throw DomainError("phi_k: tolerance must be positive");
  if (spec.cutoff_power < 1) throw DomainError("phi_k: cutoff power must be at least 1");
  const int L = n.n.band_limit();
  ModeVector out(mode_count(L), 0.0);
  const auto act = n.n.active();
  const GaussLegendre gl = gauss_legendre(spec.n_mu);
  const KernelCtx ctx{k, spec.cutoff_power, t, r, &gl};
  std::vector<double> vals(act.size(), 0.0);
  parallel_for(static_cast<int>(act.size()), [&](int i) {
    vals[i] = phi_k_mode(*n.n.mode(act[i]), mode_l(act[i]), ctx, spec);
  });
  for (std::size_t i = 0; i < act.size(); ++i) out[act[i]] = vals[i];
  return out;
}

double phi_k(const SourceProfile& n, int k, double t, double r, Direction w, const KernelQuadratureSpec& spec) {
  const auto modes = phi_k_modes(n, k, t, r, spec);
  const auto y = directions_to_y(n.n.band_limit(), w);
  double v = 0.0;
  for (std::size_t i = 0; i < modes.size(); ++i) v += modes[i] * y[i];
  return v;
}

double phi_k_direct(const SourceProfile& n, int k, double t, double r, Direction w, double rel_tol) {
  check_k(k);
  if (!(r > 0.0)) throw DomainError("phi_k_direct: r must be positive");
  const auto act = n.n.active();
  if (act.empty()) return 0.0;
  double sa = std::numeric_limits<double>::infinity(), sb = -sa;
  for (int idx : act) {
    auto [a, b] = n.n.mode(idx)->negligible_outside();
    sa = std::min(sa, a);
    sb = std::max(sb, b);
  }
  if (!std::isfinite(sa) || !std::isfinite(sb)) throw DomainError("phi_k_direct: n must have compact support");
  const double qa = std::max(sa, r - t), qb = sb;
  if (!(qb > qa)) return 0.0;
  const int L = n.n.band_limit();
  const double ox = std::sin(w.theta) * std::cos(w.phi), oy = std::sin(w.theta) * std::sin(w.phi),
               oz = std::cos(w.theta);
  const double c_k = kernel_source_constant(k);

  auto evaluate = [&](int q_panels, int q_nodes, int n_th, int n_ph) {
    const GaussLegendre gq = gauss_legendre(q_nodes), gth = gauss_legendre(n_th);
    // sphere grid: Gauss in cos(theta'), uniform in phi'
    const int G = n_th * n_ph;
    std::vector<double> mu(G), Y(static_cast<std::size_t>(G) * mode_count(L)), wS(G);
    for (int a = 0; a < n_th; ++a) {
      const double ct = gth.x[a], st = std::sqrt(std::max(0.0, 1.0 - ct * ct)), th = std::acos(ct);
      for (int b = 0; b < n_ph; ++b) {
        const double ph = 2.0 * std::numbers::pi * b / n_ph;
        const int g = a * n_ph + b;
        mu[g] = ox * st * std::cos(ph) + oy * st * std::sin(ph) + oz * ct;
        wS[g] = gth.w[a] * 2.0 * std::numbers::pi / n_ph;
        for (int idx : act) Y[static_cast<std::size_t>(g) * mode_count(L) + idx] = real_sh(mode_l(idx), mode_m(idx), th, ph);
      }
    }
    std::vector<double> panel_sums;
    const double dq = (qb - qa) / q_panels;
    for (int pnl = 0; pnl < q_panels; ++pnl) {
      double acc = 0.0;
      for (std::size_t iq = 0; iq < gq.x.size(); ++iq) {
        const double q = qa + dq * (pnl + 0.5 + 0.5 * gq.x[iq]);
        const double A = t - r + q, B = t + r + q;
        if (!(A > 0.0)) continue;
        const ModeVector nq = n.n.values(q);
        double sph = 0.0;
        for (int g = 0; g < G; ++g) {
          double nv = 0.0;
          for (int idx : act) nv += nq[idx] * Y[static_cast<std::size_t>(g) * mode_count(L) + idx];
          const double D = A + r * (1.0 - mu[g]);
          const double rho = 0.5 * A * B / D;
          // the printed kernels are c_k times rho^{2-k} / D
          const double ker = std::pow(rho, 2.0 - k) / D * c_k;
          sph += wS[g] * nv * ker * chi_cutoff()(jap(q) / rho);
        }
        acc += 0.5 * dq * gq.w[iq] * sph / (4.0 * std::numbers::pi);
      }
      panel_sums.push_back(acc);
    }
    return pairwise_sum(panel_sums);
  };

  int qp = 8, qn = 16, nt = 32, np = 32;
  double prev = evaluate(qp, qn, nt, np);
  for (int it = 0; it < 5; ++it) {
    qp *= 2;
    nt *= 2;
    np *= 2;
    const double cur = evaluate(qp, qn, nt, np);
    if (std::abs(cur - prev) <= rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "phi_k_direct: product grid did not settle to " << rel_tol << " at t=" << t << ", r=" << r;
  throw QuadratureError(os.str());
}

double phi2_asymptotic(const SourceProfile& n, double t, double r, Direction w) {
  if (!(r > 0.0) || r < 0.5 * t) {
    std::ostringstream os;
    os << "phi2_asymptotic: needs r >= t/2 (t=" << t << ", r=" << r << ")";
    throw DomainError(os.str());
  }
  double v = 0.0;
  for (int idx : n.n.active()) {
    const Profile& p = *n.n.mode(idx);
    const double I = profile_integral_from(p, r - t, [&](double q) { return p.value(q); }, 1e-12);
    v += I * real_sh(mode_l(idx), mode_m(idx), w.theta, w.phi);
  }
  return v * std::log(jap(t + r) / jap(t - r)) / (2.0 * r);
}

double n_norm(const SourceProfile& n, int N, double a) {
  if (N < 0) throw DomainError("n_norm: N must be nonnegative");
  if (a < 0.0) throw DomainError("n_norm: a must be nonnegative");
  const auto act = n.n.active();
  if (act.empty()) return 0.0;
  const int L = n.n.band_limit();
  const SphereSampler sphere(L);
  double sa = std::numeric_limits<double>::infinity(), sb = -sa, center = 0.0, scale = 0.0;
  for (int idx : act) {
    const Profile& p = *n.n.mode(idx);
    if (p.max_derivative_order() < N) throw DomainError("n_norm: profile does not support N derivatives");
    if (p.tail_exponent() - a <= 1.0) {
      std::ostringstream os;
      os << "n_norm: q-integral diverges (tail exponent " << p.tail_exponent() << ", a=" << a << ")";
      throw QuadratureError(os.str());
    }
    auto [lo, hi] = p.negligible_outside();
    sa = std::min(sa, lo);
    sb = std::max(sb, hi);
    center += p.center() / act.size();
    scale = std::max(scale, p.scale());
  }
  std::vector<ModeVector> G(N + 1, ModeVector(mode_count(L), 0.0));
  auto integrand = [&](double q) {
    for (auto& g : G) std::fill(g.begin(), g.end(), 0.0);
    for (int idx : act) weighted_derivatives(n.n.mode(idx)->jet(q, N), q, [&](int k, double v) { G[k][idx] = v; });
    double s = 0.0;
    ModeVector c(mode_count(L));
    for (int k = 0; k <= N; ++k)
      for (int j = 0; j + k <= N; ++j) {
        for (int idx = 0; idx < mode_count(L); ++idx) {
          const int l = mode_l(idx);
          c[idx] = G[k][idx] * std::pow(1.0 + l * (l + 1.0), 0.5 * j);
        }
        s += sphere.sup_abs(c);
      }
    return s * std::pow(jap(std::max(q, 0.0)), a);
  };
  if (std::isfinite(sa) && std::isfinite(sb))
    return integrate_panels(integrand, uniform_breaks(sa, sb, std::max(1e-3, 0.5 * scale)), 1e-10);
  return integrate_line(integrand, center, 8.0 * std::max(1.0, scale), 1e-10);
}

SourceResidual source_residual_check(const SourceProfile& n, int k, const std::vector<ResidualPoint>& pts, double h,
                                     const KernelQuadratureSpec& spec) {
  check_k(k);
  if (!(h > 0.0)) throw DomainError("source_residual_check: h must be positive");
  const int L = n.n.band_limit();
  const double ck = kernel_source_constant(k);
  SourceResidual out;
  double smax = 0.0, dmax = 0.0, umax = 0.0;
  for (auto& p : pts) {
    if (p.r - h <= 0.0) throw DomainError("source_residual_check: sample point too close to r = 0");
    const double dt[5] = {0, h, -h, 0, 0}, dr[5] = {0, 0, 0, h, -h};
    std::vector<ModeVector> u(5);
    for (int s = 0; s < 5; ++s) {
      const double rr = p.r + dr[s];
      u[s] = phi_k_modes(n, k, p.t + dt[s], rr, spec);
      for (double& x : u[s]) x *= rr;
    }
    const double q = p.r - p.t;
    const ModeVector nq = n.n.values(q);
    double cut = 1.0;
    for (int i = 0; i < spec.cutoff_power; ++i) cut *= chi_cutoff()(jap(q) / p.r);
    for (int idx = 0; idx < mode_count(L); ++idx) {
      const double lam = mode_l(idx) * (mode_l(idx) + 1.0);
      const double utt = (u[1][idx] - 2 * u[0][idx] + u[2][idx]) / (h * h);
      const double urr = (u[3][idx] - 2 * u[0][idx] + u[4][idx]) / (h * h);
      // (d_t^2 - Lap) Phi = (u_tt - u_rr + lam u / r^2) / r
      const double lhs = (utt - urr + lam * u[0][idx] / (p.r * p.r)) / p.r / ck;
      const double src = nq[idx] * std::pow(p.r, -k) * cut;
      dmax = std::max(dmax, std::abs(lhs - src));
      smax = std::max(smax, std::abs(src));
      for (int s = 0; s < 5; ++s) umax = std::max(umax, std::abs(u[s][idx]));
    }
  }
  if (smax == 0.0) {
    out.max_relative = dmax;
    out.noise_bound = 0.0;
    out.conclusive = true;
    return out;
  }
  out.max_relative = dmax / smax;
  double rmin = std::numeric_limits<double>::infinity();
  for (auto& p : pts) rmin = std::min(rmin, p.r);
  out.noise_bound = spec.q_tol * umax * 8.0 / (h * h) / rmin / ck / smax;
  out.conclusive = out.noise_bound <= out.max_relative;
  return out;
}

std::vector<SweepRow> backscatter_sweep(const SourceProfile& n, int k, const std::vector<double>& radii,
                                        double offset, const KernelQuadratureSpec& spec) {
  check_k(k);
  const double norm = n_norm(n, 0, n.a);
  const int L = n.n.band_limit();
  const SphereSampler sphere(L);
  std::vector<SweepRow> rows(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i], t = r + offset;
    SweepRow row;
    row.t = t;
    row.r = r;
    row.k = k;
    const auto m = phi_k_modes(n, k, t, r, spec);
    row.sup_value = sphere.sup_abs(m);
    const double qplus = std::pow(jap(std::max(r - t, 0.0)), n.a);
    if (k == 2) {
      const double lg = std::log(jap(t + r) / jap(t - r));
      row.envelope = norm > 0.0 ? row.sup_value * 2.0 * r / lg * qplus / norm : 0.0;
      if (r >= 0.5 * t) {
        // Phi^2_0 per mode, then sup of the difference
        ModeVector a0(mode_count(L), 0.0), diff(mode_count(L), 0.0);
        for (int idx : n.n.active()) {
          const Profile& p = *n.n.mode(idx);
          a0[idx] = profile_integral_from(p, r - t, [&](double q) { return p.value(q); }, 1e-12) * lg / (2.0 * r);
        }
        for (int idx = 0; idx < mode_count(L); ++idx) diff[idx] = m[idx] - a0[idx];
        row.asymptotic = sphere.sup_abs(a0);
        row.remainder = sphere.sup_abs(diff) * jap(t + r) * qplus;
      }
    } else {
      row.envelope = norm > 0.0 ? row.sup_value * jap(t + r) * std::pow(jap(t - r), k - 2) * qplus / norm : 0.0;
    }
    rows[i] = row;
  }
  return rows;
}

}  // namespace radscat
