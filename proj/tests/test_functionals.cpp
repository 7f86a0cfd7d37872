#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "radscat/engine.hpp"
#include "radscat/error.hpp"
#include "radscat/functionals.hpp"

using namespace radscat;

namespace {

const double kPi = std::numbers::pi;

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

// l = 0 free wave u = G(t - r) - G(t + r), G a gaussian centred at x = 5.
double G(double x) { return std::exp(-(x - 5) * (x - 5)); }
double Gp(double x) { return -2.0 * (x - 5) * G(x); }

FieldState free_l0(const RadialGrid& grid, double t) {
  auto s = FieldState::zeros(grid, {{0, 0, 0}}, t);
  for (int j = 0; j <= grid.J; ++j) {
    const double r = grid.r(j);
    s.u[0][j] = G(t - r) - G(t + r);
    s.v[0][j] = Gp(t - r) - Gp(t + r);
  }
  return s;
}

double bump(double r, double c) { return std::exp(-(r - c) * (r - c)); }

// Data at T = 12 in modes l = 0 and l = 2, optional smooth source; solved back to t = 4
// with the cone t - r = 2, so R = 10.
IdentityAudit audit_run(double h, double s, bool sourced) {
  const double T = 12, t1 = 4, R = 10;
  auto grid = RadialGrid::for_run(h, T, t1);
  auto st = FieldState::zeros(grid, {{0, 0, 0}, {0, 2, 1}}, T);
  for (int j = 1; j < grid.J; ++j) {
    const double r = grid.r(j);
    st.u[0][j] = bump(r, 5);
    st.v[0][j] = (r - 4) * bump(r, 4);
    st.u[1][j] = 0.7 * bump(r, 6);
    st.v[1][j] = -0.3 * bump(r, 5.5);
  }
  SourceFn src;
  if (sourced)
    src = [](const FieldState& x, std::vector<std::vector<double>>& S) {
      for (int i = 0; i < x.entries(); ++i)
        for (int j = 0; j <= x.grid.J; ++j)
          S[i][j] = (i + 1) * 0.5 * std::exp(-std::pow(x.grid.r(j) - 3, 2) - std::pow(x.t - 8, 2));
    };
  SolveOptions opt;
  opt.dt = 0.5 * h;
  opt.record_every_step = true;
  opt.record_sources = sourced;
  ConeTrack c;
  c.c = T - R;
  opt.cones = {c};
  auto tr = solve_backward(st, src, t1, opt);
  return morawetz_identity_audit(tr, s, R);
}

}  // namespace

TEST_CASE("weights") {
  const auto w0 = WeightSpec::w0(0.25);
  CHECK(weight_eval(w0, 0.0) == doctest::Approx(2.0));
  CHECK(weight_eval(w0, -1e-9) == doctest::Approx(2.0));
  CHECK(weight_eval(w0, 1e12) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(weight_eval(w0, -1e12) == doctest::Approx(3.0).epsilon(1e-5));
  // closed form against the defining integral
  const double q = -7.5;
  const double ref = 2.0 + 2 * 0.25 * gk([](double x) { return std::pow(1 + std::abs(x), -1.5); }, q, 0.0);
  CHECK(weight_eval(w0, q) == doctest::Approx(ref).epsilon(1e-12));
  for (double x : {-3.0, -0.5, 0.5, 4.0}) {
    const double d = (weight_eval(w0, x + 1e-6) - weight_eval(w0, x - 1e-6)) / 2e-6;
    CHECK(weight_derivative(w0, x) == doctest::Approx(d).epsilon(1e-6));
    CHECK(weight_eval(w0, x) >= 1.0);
    CHECK(weight_eval(w0, x) <= 3.0);
  }

  const auto wg = WeightSpec::w_gamma(-0.5, 0.25);
  CHECK(weight_eval(wg, -1e-12) == doctest::Approx(2.0));
  CHECK(weight_eval(wg, -50.0) == doctest::Approx(2.0));
  const auto wg8 = WeightSpec::w_gamma(0.8, 0.1);
  CHECK(weight_eval(wg8, -3.0) == doctest::Approx(1 + std::pow(4.0, 2.6)));
  for (double x : {-3.0, 2.0}) {
    const double d = (weight_eval(wg8, x + 1e-6) - weight_eval(wg8, x - 1e-6)) / 2e-6;
    CHECK(weight_derivative(wg8, x) == doctest::Approx(d).epsilon(1e-6));
  }

  const auto f = WeightSpec::conformal(1.2);
  CHECK(weight_eval(f, 0.0) == 1.0);
  CHECK(weight_eval(f, 3.0) == doctest::Approx(std::pow(10.0, 1.2)));
  CHECK(weight_eval(WeightSpec::constant(), -4.0) == 1.0);
}

TEST_CASE("gaussian energy against quadrature") {
  // phi = exp(-r^2) Y00 and d_t phi = r exp(-r^2) Y00 ... in u-variables
  auto grid = RadialGrid(0.01, 800);
  auto s = FieldState::zeros(grid, {{0, 0, 0}}, 0.0);
  for (int j = 0; j <= grid.J; ++j) {
    const double r = grid.r(j);
    s.u[0][j] = r * std::exp(-r * r);
    s.v[0][j] = r * r * std::exp(-r * r);
  }
  // int (phi_t^2 + phi_r^2) r^2 dr with phi_t = r e^{-r^2}, phi_r = -2 r e^{-r^2}
  const double ref = gk([](double r) { return 5.0 * r * r * r * r * std::exp(-2 * r * r); }, 0.0, 8.0);
  CHECK(energy_weighted(s, WeightSpec::constant()) == doctest::Approx(ref).epsilon(1e-4));

  // w0 energy at t = 0 weights every point with q = r > 0
  const auto w0 = WeightSpec::w0(0.25);
  const double ref0 = gk(
      [](double r) { return (1 + std::pow(1 + r, -0.5)) * 5.0 * r * r * r * r * std::exp(-2 * r * r); }, 0.0, 8.0);
  CHECK(energy_weighted(s, w0) == doctest::Approx(ref0).epsilon(1e-4));
}

TEST_CASE("l = 2 energy includes the angular term") {
  auto grid = RadialGrid(0.01, 1000);
  auto s = FieldState::zeros(grid, {{0, 2, -1}}, 3.0);
  for (int j = 0; j <= grid.J; ++j) {
    const double r = grid.r(j);
    s.u[0][j] = r * r * r * std::exp(-r * r);
  }
  // phi = r^2 e^{-r^2}: phi_r^2 + 6 phi^2 / r^2
  const double ref = gk(
      [](double r) {
        const double e = std::exp(-r * r), pr = (2 * r - 2 * r * r * r) * e, p = r * r * e;
        return (pr * pr + 6 * p * p / (r * r + 1e-300)) * r * r;
      },
      0.0, 10.0);
  CHECK(energy_weighted(s, WeightSpec::constant()) == doctest::Approx(ref).epsilon(1e-4));
}

TEST_CASE("homogeneity") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  auto grid = RadialGrid(0.05, 400);
  auto s = FieldState::zeros(grid, {{0, 0, 0}, {0, 1, 1}, {0, 3, -2}}, 6.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 1; j < grid.J; ++j) {
      const double r = grid.r(j), env = std::exp(-(r - 6) * (r - 6) / 4);
      s.u[i][j] = env * U(rng) * 0.1 + env;
      s.v[i][j] = env * U(rng);
    }
  for (double c : {2.0, 10.0}) {
    auto sc = s;
    for (auto& row : sc.u)
      for (auto& x : row) x *= c;
    for (auto& row : sc.v)
      for (auto& x : row) x *= c;
    CHECK(energy_weighted(sc, WeightSpec::w0(0.1)) == doctest::Approx(c * c * energy_weighted(s, WeightSpec::w0(0.1))));
    CHECK(conformal_norm_plus(sc, 1.2) == doctest::Approx(c * conformal_norm_plus(s, 1.2)));
    CHECK(conformal_energy_ER(sc, 1.2, 12) == doctest::Approx(c * c * conformal_energy_ER(s, 1.2, 12)));
    CHECK(norm_Z_weighted(sc, 1.1) == doctest::Approx(c * norm_Z_weighted(s, 1.1)));
    CHECK(norm_Z_weighted2(sc, 1.1) == doctest::Approx(c * norm_Z_weighted2(s, 1.1)));
    CHECK(sup_envelope(sc, 1.1) == doctest::Approx(c * sup_envelope(s, 1.1)));
  }
  // w0 energy lies between the plain energy and three times it
  const double e = energy_weighted(s, WeightSpec::constant()), e0 = energy_weighted(s, WeightSpec::w0(0.3));
  CHECK(e0 >= e);
  CHECK(e0 <= 3 * e);
  // field filter
  CHECK(energy_weighted(s, WeightSpec::constant(), 1) == 0.0);
}

TEST_CASE("identity audit converges at second order") {
  for (bool sourced : {false, true})
    for (double s : {1.0, 1.2}) {
      CAPTURE(sourced);
      CAPTURE(s);
      const auto a = audit_run(0.1, s, sourced), b = audit_run(0.05, s, sourced), c = audit_run(0.025, s, sourced);
      CHECK(a.flux > 0.0);
      if (!sourced) CHECK(a.bulk != 0.0);  // the l = 2 mode feels the deformation term
      const auto ord = convergence_order(std::abs(a.residual), std::abs(b.residual), std::abs(c.residual));
      MESSAGE("residuals " << a.residual << " " << b.residual << " " << c.residual << " order " << ord.order);
      CHECK(ord.order >= 1.9);
      CHECK(std::abs(c.residual) < 1e-3);
    }
}

TEST_CASE("identity audit preconditions") {
  auto grid = RadialGrid::for_run(0.1, 6, 2);
  auto st = FieldState::zeros(grid, {{0, 0, 0}}, 6.0);
  SolveOptions opt;
  opt.dt = 0.05;
  opt.record_times = {6.0, 2.0};
  auto tr = solve_backward(st, nullptr, 2.0, opt);
  CHECK_THROWS_AS(morawetz_identity_audit(tr, 1.0, 5.0), DomainError);
  opt.record_every_step = true;
  tr = solve_backward(st, nullptr, 2.0, opt);
  CHECK_THROWS_AS(morawetz_identity_audit(tr, 1.0, 5.0), DomainError);  // no cone
  CHECK_THROWS_AS(morawetz_identity_audit(tr, 1.0, 3.0), DomainError);  // R < t2 - t1
}

TEST_CASE("bulk sign") {
  std::vector<double> ts, rs;
  for (int k = 0; k < 200; ++k) {
    ts.push_back(100.0 * k / 199);
    rs.push_back(100.0 * k / 199);
  }
  for (double a : {2.0, 2.5, 3.0, 4.0}) {
    CAPTURE(a);
    auto res = bulk_sign_check(a, ts, rs);
    CHECK(res.conforming);
    CHECK(res.max_slack <= 1e-12);
  }
  // exact: for a = 2 the expression vanishes; for a = 4 it equals -4 t r^2
  for (auto [t, r] : {std::pair{0.3, 0.7}, {5.0, 1.0}, {10.0, 30.0}, {99.0, 2.5}, {0.0, 4.0}}) {
    CHECK(std::abs(bulk_deform(2.0, t, r)) <= 1e-40 * (1 + t * t + r * r) + 1e-300);
    CHECK(bulk_deform(4.0, t, r) == doctest::Approx(-4.0 * t * r * r).epsilon(1e-14));
  }
  CHECK(bulk_deform(3.0, 5.0, 0.0) == 0.0);
  auto weak = bulk_sign_check(1.0, ts, rs);
  CHECK_FALSE(weak.conforming);
  CHECK_THROWS_AS(bulk_sign_check(0.0, ts, rs), DomainError);
}

TEST_CASE("Hardy ratios stay bounded") {
  for (double t : {10.0, 20.0, 40.0}) {
    auto grid = RadialGrid(0.1, static_cast<int>((t + 20) / 0.1));
    auto st = free_l0(grid, t);
    for (double s : {1.0, 1.2}) {
      auto h = hardy_checks(st, s);
      CAPTURE(t);
      CHECK(h.ratio_weighted > 0.0);
      CHECK(h.ratio_origin > 0.0);
      CHECK(h.within_budget);
    }
  }
  auto grid = RadialGrid(0.1, 100);
  auto z = FieldState::zeros(grid, {{0, 0, 0}}, 1.0);
  auto h = hardy_checks(z, 1.0);
  CHECK(h.ratio_weighted == 0.0);
  CHECK(h.within_budget);
}

TEST_CASE("weighted Klainerman-Sobolev constant is stable along a free wave") {
  double lo = 1e300, hi = 0.0;
  for (double t : {20.0, 40.0, 80.0}) {
    auto grid = RadialGrid(0.1, static_cast<int>((t + 20) / 0.1));
    auto k = ks_pointwise_check(free_l0(grid, t), 1.0);
    MESSAGE("t=" << t << " K-S constant " << k.constant);
    lo = std::min(lo, k.constant);
    hi = std::max(hi, k.constant);
    CHECK(k.constant > 0.0);
    CHECK(k.constant <= 10.0);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("sup envelope uses the angular maximum") {
  auto grid = RadialGrid(0.1, 50);
  auto s = FieldState::zeros(grid, {{0, 1, 0}}, 0.0);
  s.u[0][10] = 1.0;  // phi = Y10 / r at r = 1
  const double expect = std::sqrt(2.0) * std::pow(2.0, 0.25) * std::sqrt(3 / (4 * kPi));
  CHECK(sup_envelope(s, 1.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("origin value matches characteristic integration") {
  // l = 0, zero data at T: d_r u(t1, 0) = -int_0^{T - t1} xi S(t1 + xi, xi) d xi
  const double T = 14, t0 = 2, h = 0.025;
  auto S = [](double t, double r) { return std::exp(-(r - 2) * (r - 2) - (t - 7) * (t - 7)); };
  auto grid = RadialGrid::for_run(h, T, t0);
  auto st = FieldState::zeros(grid, {{0, 0, 0}}, T);
  SourceFn src = [&](const FieldState& x, std::vector<std::vector<double>>& out) {
    for (int j = 0; j <= x.grid.J; ++j) out[0][j] = S(x.t, x.grid.r(j));
  };
  SolveOptions opt;
  opt.dt = 0.5 * h;
  opt.record_origin = true;
  opt.record_times = {T};
  for (double c : {3.0, 5.0, 7.0}) {
    ConeTrack ct;
    ct.c = c;
    opt.cones.push_back(ct);
  }
  auto tr = solve_backward(st, src, t0, opt);
  for (double t1 : {3.0, 5.0, 7.0}) {
    const double ref = -gk([&](double xi) { return xi * S(t1 + xi, xi); }, 0.0, T - t1);
    std::size_t k = 0;
    for (std::size_t n = 0; n < tr.origin_t.size(); ++n)
      if (std::abs(tr.origin_t[n] - t1) < 1e-9) k = n;
    CAPTURE(t1);
    CHECK(tr.origin_ur[k][0] == doctest::Approx(ref).epsilon(2e-3));
  }
  auto samples = origin_decay_check(tr, -0.5);
  REQUIRE(samples.size() == 3);
  for (auto& o : samples) {
    CHECK(o.bound > 0.0);
    CHECK(o.ratio < 10.0);
  }
}

TEST_CASE("fit_decay") {
  std::vector<std::pair<double, double>> ser;
  for (int k = 0; k <= 40; ++k) {
    const double t = 2.0 * std::pow(10.0, k / 20.0);
    ser.push_back({t, 3.0 * std::pow(t, -1.3)});
  }
  auto f = fit_decay(ser);
  CHECK(f.exponent == doctest::Approx(-1.3).epsilon(1e-12));
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(f.r_squared == doctest::Approx(1.0));
  CHECK(f.t_lo == doctest::Approx(20.0));
  CHECK(f.t_hi == doctest::Approx(200.0));

  // shorter series: last factor-4 span
  std::vector<std::pair<double, double>> shortser(ser.begin(), ser.begin() + 25);
  auto w = default_fit_window(shortser);
  CHECK(w.second == doctest::Approx(shortser.back().first));
  CHECK(w.first == doctest::Approx(shortser.back().first / 4));

  CHECK_THROWS_AS(fit_decay(ser, 2.0, 2.5), DomainError);
  auto bad = ser;
  bad[35].second = 0.0;
  CHECK_THROWS_AS(fit_decay(bad), DomainError);
}

TEST_CASE("weighted source norm") {
  auto grid = RadialGrid(0.01, 1000);
  std::vector<std::vector<double>> S(1, std::vector<double>(grid.J + 1));
  for (int j = 0; j <= grid.J; ++j) S[0][j] = std::exp(-grid.r(j));
  const double ref = gk([](double r) { return (1 + (2 + r) * (2 + r)) * std::exp(-2 * r) * r * r; }, 0.0, 10.0);
  CHECK(weighted_source_norm(grid, 2.0, S, 1.0) == doctest::Approx(std::sqrt(ref)).epsilon(1e-4));
}
