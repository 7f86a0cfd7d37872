#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "radscat/approximants.hpp"
#include "radscat/cutoff.hpp"
#include "radscat/engine.hpp"
#include "radscat/error.hpp"
#include "radscat/radiation_field.hpp"

using namespace radscat;

namespace {

double g(double x) { return std::exp(-x * x); }
double gp(double x) { return -2.0 * x * std::exp(-x * x); }

// l = 0 d'Alembert solution u = g(t - r) - g(t + r), odd in r.
FieldState dalembert_state(const RadialGrid& grid, double t) {
  auto s = FieldState::zeros(grid, {{0, 0, 0}}, t);
  for (int j = 0; j <= grid.J; ++j) {
    const double r = grid.r(j);
    s.u[0][j] = g(t - r) - g(t + r);
    s.v[0][j] = gp(t - r) - gp(t + r);
  }
  return s;
}

double dalembert_error(double h, double T, double t0) {
  auto grid = RadialGrid::for_run(h, T, t0);
  SolveOptions opt;
  opt.dt = 0.5 * h;
  opt.record_times = {t0};
  auto tr = solve_backward(dalembert_state(grid, T), nullptr, t0, opt);
  const auto& s = tr.states.back();
  double e = 0.0;
  for (int j = 0; j <= grid.J; ++j) {
    const double r = grid.r(j);
    e = std::max(e, std::abs(s.u[0][j] - (g(t0 - r) - g(t0 + r))));
  }
  return e;
}

// sum over modes of int (v^2 + u_r^2 + l(l+1) u^2 / r^2) dr, the w = 1 energy in u-variables
double energy(const FieldState& s) {
  double e = 0.0;
  for (int i = 0; i < s.entries(); ++i) {
    const double lam = s.keys[i].l * (s.keys[i].l + 1.0);
    for (int j = 1; j < s.grid.J; ++j) {
      const double r = s.grid.r(j);
      const double du = (s.u[i][j + 1] - s.u[i][j]) / s.grid.h;
      e += s.grid.h * (s.v[i][j] * s.v[i][j] + du * du + lam * s.u[i][j] * s.u[i][j] / (r * r));
    }
  }
  return e;
}

double max_abs(const FieldState& s) {
  double m = 0.0;
  for (auto& row : s.u)
    for (double x : row) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("zero data and zero source stay zero") {
  auto grid = RadialGrid::for_run(0.1, 10, 2);
  auto s = FieldState::zeros(grid, {{0, 0, 0}, {0, 2, 1}}, 10.0);
  SolveOptions opt;
  opt.dt = 0.05;
  opt.record_times = {10.0, 6.0, 2.0};
  auto tr = solve_backward(s, nullptr, 2.0, opt);
  REQUIRE(tr.states.size() == 3);
  CHECK(tr.states[0].t == 10.0);
  CHECK(tr.states[2].t == 2.0);
  for (auto& st : tr.states) CHECK(max_abs(st) == 0.0);
}

TEST_CASE("backward evolution reproduces the d'Alembert solution at second order") {
  const double e0 = dalembert_error(0.1, 10, 2), e1 = dalembert_error(0.05, 10, 2),
               e2 = dalembert_error(0.025, 10, 2);
  auto o = convergence_order(e0, e1, e2);
  MESSAGE("errors " << e0 << " " << e1 << " " << e2 << " order " << o.order);
  CHECK(o.monotone);
  CHECK(o.order == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("discrete box of exact solutions converges at second order") {
  auto residual = [](double h, auto u_of) {
    RadialGrid grid(h, static_cast<int>(std::round(20.0 / h)));
    const double t = 8.0, dt = 0.5 * h;
    std::vector<double> a(grid.J + 1), b(grid.J + 1), c(grid.J + 1);
    for (int j = 1; j <= grid.J; ++j) {
      a[j] = u_of(t - dt, grid.r(j));
      b[j] = u_of(t, grid.r(j));
      c[j] = u_of(t + dt, grid.r(j));
    }
    auto res = discrete_box(a, b, c, dt, grid, 0);
    double m = 0.0;
    for (int j = 1; j < grid.J; ++j)
      if (grid.r(j) >= 0.5) m = std::max(m, std::abs(res[j]));
    return m;
  };
  auto travelling = [](double t, double r) { return g(t - r); };
  auto mass = [](double t, double r) { return psi_e_mode(1.0, t, r) * r; };
  for (auto u : {std::function<double(double, double)>(travelling), std::function<double(double, double)>(mass)}) {
    // chi_e turns over on a unit interval; h <= 0.025 is the asymptotic range
    auto o = convergence_order(residual(0.025, u), residual(0.0125, u), residual(0.00625, u));
    CHECK(o.order >= 1.9);
  }
  RadialGrid grid(0.1, 50);
  std::vector<double> z(51, 0.0);
  for (double x : discrete_box(z, z, z, 0.05, grid, 3)) CHECK(x == 0.0);
  CHECK_THROWS_AS(discrete_box(z, std::vector<double>(50), z, 0.05, grid, 0), DomainError);
}

TEST_CASE("discrete box of the analytic residual matches residual_box_psi01") {
  // psi01 sampled on the grid, discrete box versus the closed form, l = 2. The
  // cutoff turns over in a shell of width ~ r/8, so t = 30 keeps h = 0.1 resolved.
  RadiationField F0(2, 0.8);
  F0.set_mode(2, 0, std::make_shared<GaussianProfile>(1, 1, 0));
  auto F1 = derive_F1(F0);
  const int idx = mode_index(2, 0);
  auto err = [&](double h) {
    RadialGrid grid(h, static_cast<int>(std::round(60.0 / h)));
    const double t = 30.0, dt = 0.5 * h;
    std::vector<double> a(grid.J + 1), b(grid.J + 1), c(grid.J + 1);
    for (int j = 1; j <= grid.J; ++j) {
      const double r = grid.r(j);
      a[j] = r * eval_approximant(F0, F1, 0, Approximant::psi01, t - dt, r)[idx];
      b[j] = r * eval_approximant(F0, F1, 0, Approximant::psi01, t, r)[idx];
      c[j] = r * eval_approximant(F0, F1, 0, Approximant::psi01, t + dt, r)[idx];
    }
    auto res = discrete_box(a, b, c, dt, grid, 2);
    double e = 0.0, scale = 0.0;
    for (int j = 1; j < grid.J; ++j) {
      const double r = grid.r(j);
      const double exact = r * residual_box_psi01(F0, F1, t, r)[idx];
      e = std::max(e, std::abs(res[j] - exact));
      scale = std::max(scale, std::abs(exact));
    }
    REQUIRE(scale > 0.0);
    return e;
  };
  auto o = convergence_order(err(0.1), err(0.05), err(0.025));
  MESSAGE("order " << o.order);
  CHECK(o.order >= 1.9);
}

TEST_CASE("sourced backward solve: v + psi01 is a discrete solution at second order") {
  RadiationField F0(2, 0.8);
  F0.set_mode(2, 0, std::make_shared<GaussianProfile>(1, 1, 0));
  auto F1 = derive_F1(F0);
  const int idx = mode_index(2, 0);
  const double T = 40.0, t0 = 24.0, tm = 26.0;
  auto run = [&](double h) {
    auto grid = RadialGrid::for_run(h, T, t0);
    auto data = FieldState::zeros(grid, {{0, 2, 0}}, T);
    SourceFn src = [&](const FieldState& st, std::vector<std::vector<double>>& S) {
      for (int j = 1; j < st.grid.J; ++j) {
        ConePoint cp(st.t, st.grid.r(j));
        if (cp.outside()) continue;
        const double q = st.grid.r(j) - st.t;
        Jet j0 = F0.mode(idx)->jet(q, 1), j1 = F1.mode(idx)->jet(q, 1);
        S[0][j] = -box_psi01_mode(2, cp, &j0, &j1);
      }
    };
    SolveOptions opt;
    opt.dt = 0.5 * h;
    opt.record_times = {tm + opt.dt, tm, tm - opt.dt};
    auto tr = solve_backward(data, src, t0, opt);
    REQUIRE(tr.states.size() == 3);
    std::vector<std::vector<double>> u(3, std::vector<double>(grid.J + 1, 0.0));
    for (int k = 0; k < 3; ++k)
      for (int j = 1; j <= grid.J; ++j) {
        const double r = grid.r(j);
        u[k][j] = tr.states[k].u[0][j] + r * eval_approximant(F0, F1, 0, Approximant::psi01, tr.states[k].t, r)[idx];
      }
    // states are in decreasing t: prev = t - dt is index 2
    auto res = discrete_box(u[2], u[1], u[0], opt.dt, grid, 2);
    double m = 0.0;
    for (int j = 1; j < grid.J; ++j) m = std::max(m, std::abs(res[j]));
    return m;
  };
  const double e0 = run(0.1), e1 = run(0.05), e2 = run(0.025);
  auto o = convergence_order(e0, e1, e2);
  MESSAGE("residuals " << e0 << " " << e1 << " " << e2 << " order " << o.order);
  CHECK(o.order >= 1.9);
}

TEST_CASE("energy is conserved without sources") {
  auto grid = RadialGrid::for_run(0.05, 12, 2);
  auto s = FieldState::zeros(grid, {{0, 0, 0}, {0, 1, -1}, {0, 3, 2}}, 12.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j <= grid.J; ++j) {
      const double r = grid.r(j);
      s.u[i][j] = (i + 1) * std::pow(r / 12.0, s.keys[i].l + 1) * g(r - 12.0);
      s.v[i][j] = -(i + 1) * std::pow(r / 12.0, s.keys[i].l + 1) * gp(r - 12.0);
    }
  SolveOptions opt;
  opt.dt = 0.025;
  opt.record_times = {12.0, 7.0, 2.0};
  auto tr = solve_backward(s, nullptr, 2.0, opt);
  const double e0 = energy(tr.states[0]);
  for (auto& st : tr.states) CHECK(energy(st) == doctest::Approx(e0).epsilon(2e-3));
}

TEST_CASE("time reversal returns the data at second order") {
  auto err = [](double h) {
    auto grid = RadialGrid::for_run(h, 10, 2);
    auto data = dalembert_state(grid, 10.0);
    SolveOptions opt;
    opt.dt = 0.5 * h;
    opt.record_times = {2.0};
    auto back = solve_backward(data, nullptr, 2.0, opt);
    opt.record_times = {10.0};
    auto fwd = evolve(back.states.back(), nullptr, 10.0, opt);
    double e = 0.0;
    for (int j = 0; j <= grid.J; ++j) e = std::max(e, std::abs(fwd.states.back().u[0][j] - data.u[0][j]));
    return e;
  };
  const double e0 = err(0.1), e1 = err(0.05);
  CHECK(e1 < e0 / 3.0);
  CHECK(e1 < 1e-3);
}

TEST_CASE("linearity in data and source") {
  auto grid = RadialGrid::for_run(0.1, 8, 2);
  auto a = dalembert_state(grid, 8.0);
  auto b = FieldState::zeros(grid, {{0, 0, 0}}, 8.0);
  SourceFn sa = [](const FieldState& st, std::vector<std::vector<double>>& S) {
    for (int j = 1; j < st.grid.J; ++j) S[0][j] = std::exp(-std::pow(st.grid.r(j) - st.t, 2)) / (1 + st.t);
  };
  SolveOptions opt;
  opt.dt = 0.05;
  opt.record_times = {2.0};
  auto ra = solve_backward(a, nullptr, 2.0, opt).states.back();
  auto rb = solve_backward(b, sa, 2.0, opt).states.back();
  auto c = a;
  for (auto& x : c.u[0]) x *= 2.0;
  for (auto& x : c.v[0]) x *= 2.0;
  SourceFn sc = [&](const FieldState& st, std::vector<std::vector<double>>& S) {
    sa(st, S);
    for (auto& x : S[0]) x *= -3.0;
  };
  auto rc = solve_backward(c, sc, 2.0, opt).states.back();
  for (int j = 0; j <= grid.J; ++j)
    CHECK(rc.u[0][j] == doctest::Approx(2.0 * ra.u[0][j] - 3.0 * rb.u[0][j]).epsilon(1e-12).scale(1e-12));
}

TEST_CASE("finite speed: support grows by at most one cell per step plus the stencil") {
  const double h = 0.05;
  RadialGrid grid(h, 800);
  auto s = FieldState::zeros(grid, {{0, 1, 0}}, 5.0);
  // compact bump on [18, 22]
  CompactBumpProfile bump(1.0, 2.0, 20.0);
  for (int j = 0; j <= grid.J; ++j) s.u[0][j] = bump.value(grid.r(j));
  int steps = 0;
  double worst = 0.0;
  SolveOptions opt;
  opt.dt = 0.5 * h;
  opt.observer = [&](const FieldState& st) {
    int hi = 0;
    for (int j = 0; j <= grid.J; ++j)
      if (st.u[0][j] != 0.0) hi = j;
    // RK4 stages reach four stencil widths per step
    worst = std::max(worst, grid.r(hi) - (22.0 + 4.0 * h * steps));
    ++steps;
  };
  evolve(s, nullptr, 0.0, opt);
  CHECK(worst <= 1e-12);
}

TEST_CASE("CFL and containment violations are reported") {
  auto grid = RadialGrid::for_run(0.1, 10, 2);
  auto s = dalembert_state(grid, 10.0);
  SolveOptions opt;
  opt.dt = 0.2;
  CHECK_THROWS_AS(solve_backward(s, nullptr, 2.0, opt), CflError);
  RadialGrid small(0.1, 120);
  auto t = dalembert_state(small, 10.0);
  opt.dt = 0.05;
  CHECK_THROWS_AS(solve_backward(t, nullptr, 2.0, opt), ContainmentError);
  CHECK_THROWS_AS(solve_backward(t, nullptr, 12.0, opt), DomainError);
}

TEST_CASE("cone tracks sample the outgoing cone") {
  auto grid = RadialGrid::for_run(0.05, 10, 2);
  auto s = dalembert_state(grid, 10.0);
  SolveOptions opt;
  opt.dt = 0.025;
  ConeTrack c;
  c.c = 0.0;
  opt.cones = {c};
  opt.record_origin = true;
  auto tr = solve_backward(s, nullptr, 2.0, opt);
  REQUIRE(tr.cones.size() == 1);
  CHECK(tr.cones[0].t.size() == static_cast<std::size_t>(tr.steps + 1));
  CHECK(tr.origin_t.size() == static_cast<std::size_t>(tr.steps + 1));
  // on t = r, L u = 2 g'(t + r) is negligible and the Lbar part is g'(0) = 0
  for (double x : tr.cones[0].Lsq) CHECK(x < 1e-6);
}

TEST_CASE("convergence_order and richardson_order") {
  CHECK(convergence_order(1.0, 0.25, 0.0625).order == doctest::Approx(2.0));
  CHECK(convergence_order(1.0, 0.5, 0.25).order == doctest::Approx(1.0));
  auto bad = convergence_order(1.0, 2.0, 0.5);
  CHECK_FALSE(bad.monotone);
  CHECK_FALSE(bad.warning.empty());
  // f(h) = f* + C h^2
  const double fs = 3.0, C = 0.7, h = 0.1;
  CHECK(richardson_order(fs + C * h * h, fs + C * h * h / 4, fs + C * h * h / 16).order == doctest::Approx(2.0));
}
