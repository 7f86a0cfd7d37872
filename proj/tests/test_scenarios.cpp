#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "radscat/error.hpp"
#include "radscat/scenarios.hpp"

using namespace radscat;

namespace {

RadiationField gaussian_field(int l, int m, double amp = 1.0, double width = 1.0, double c = 0.0) {
  RadiationField F(2, 0.8);
  F.set_mode(l, m, std::make_shared<GaussianProfile>(amp, width, c));
  return F;
}

// Small homogeneous run, cheap enough for the unit suite.
RunSpec small_homogeneous() {
  RunSpec spec;
  spec.scenario = "homogeneous";
  spec.F0 = gaussian_field(2, 0);
  spec.T = 20.0;
  spec.h = 0.2;
  spec.n_records = 12;
  return spec;
}

bool same_series(const ScenarioReport& a, const ScenarioReport& b) {
  if (a.series.size() != b.series.size()) return false;
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    if (a.series[i].t != b.series[i].t) return false;
    if (a.series[i].values != b.series[i].values) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("log record times") {
  auto ts = log_record_times(2.0, 80.0, 9);
  REQUIRE(ts.size() == 9);
  CHECK(ts.front() == doctest::Approx(2.0));
  CHECK(ts.back() == doctest::Approx(80.0));
  for (std::size_t i = 1; i < ts.size(); ++i) CHECK(ts[i] / ts[i - 1] == doctest::Approx(std::pow(40.0, 1.0 / 8.0)));
}

TEST_CASE("check constructors") {
  FitResult f;
  f.exponent = -1.2;
  CHECK(exponent_check("a", f, -1.1, 0.15).pass);
  CHECK_FALSE(exponent_check("a", f, -1.4, 0.15).pass);
  // upper: decays at least as fast as target + tol
  CHECK(exponent_check("a", f, -0.5, 0.15, "upper").pass);
  CHECK_FALSE(exponent_check("a", f, -1.4, 0.15, "upper").pass);
  CHECK(scalar_check("x", 1.0, 1.0, "<=").pass);
  CHECK_FALSE(scalar_check("x", 1.1, 1.0, "<=").pass);
  CHECK(scalar_check("x", 2.0, 1.5, ">=").pass);
  CHECK_FALSE(scalar_check("x", std::nan(""), 1.0, "<=").pass);
}

TEST_CASE("s range") {
  RunSpec spec = small_homogeneous();
  spec.s = spec.gamma + 0.6;
  try {
    validate_run_spec(spec);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("s must satisfy 1 <= s < gamma + 1/2") != std::string::npos);
  }
  spec.s = 0.9;
  CHECK_THROWS_AS(validate_run_spec(spec), ConfigError);
  // the conformal range only constrains the scattering scenarios
  spec.scenario = "backscatter";
  CHECK_NOTHROW(validate_run_spec(spec));
  spec.scenario = "nosuch";
  CHECK_THROWS_AS(run_scenario(spec), ConfigError);
}

TEST_CASE("gaunt table reproduces pointwise products") {
  std::vector<int> act_a{0, 2, 5, 6}, act_b{1, 3, 4, 8};
  ModeVector a(mode_count(2), 0.0), b(mode_count(2), 0.0);
  for (int i : act_a) a[i] = 0.3 + 0.1 * i;
  for (int i : act_b) b[i] = -0.2 + 0.07 * i;
  const auto ref = pointwise_product(a, b, 4);
  ModeVector got(mode_count(4), 0.0);
  for (auto& g : gaunt_table(act_a, act_b, 4)) got[g.k] += g.g * a[g.i] * b[g.j];
  for (std::size_t k = 0; k < ref.size(); ++k) CHECK(got[k] == doctest::Approx(ref[k]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("field product and derivative") {
  RadiationField A(2, 0.8), B(2, 0.8);
  A.set_mode(0, 0, std::make_shared<GaussianProfile>(1.0, 1.0, 0.0));
  A.set_mode(2, 1, std::make_shared<GaussianProfile>(0.5, 2.0, 1.0));
  B.set_mode(1, -1, std::make_shared<PolyTailProfile>(0.7, 1.5, -1.0));
  const auto P = field_product(A, B, 2.0);
  CHECK(P.band_limit() == 4);
  for (double q : {-2.0, -0.3, 0.0, 1.7}) {
    auto ref = pointwise_product(A.values(q), B.values(q), 4);
    auto got = P.values(q);
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(got[k] == doctest::Approx(2.0 * ref[k]).scale(1.0));
  }
  // gaussian derivative in closed form
  const auto D = field_derivative(A, 3.0);
  for (double q : {-1.5, 0.2, 2.0}) {
    const double want = 3.0 * 0.5 * (-2.0 * (q - 1.0) / 4.0) * std::exp(-(q - 1.0) * (q - 1.0) / 4.0);
    CHECK(D.values(q)[mode_index(2, 1)] == doctest::Approx(want).scale(1.0));
  }
}

TEST_CASE("poly-tail width") {
  PolyTailProfile p(2.0, 1.5, 1.0, 3.0);
  CHECK(p.value(4.0) == doctest::Approx(2.0 * std::pow(2.0, -0.75)));
  CHECK(p.jet(4.0, 1)[1] == doctest::Approx(-1.5 * 2.0 * std::pow(2.0, -1.75) / 3.0));
  CHECK(p.describe().find("w=3") != std::string::npos);
  CHECK(PolyTailProfile(1.0, 1.5, 0.0).describe().find("w=") == std::string::npos);
  CHECK_THROWS_AS(PolyTailProfile(1.0, 1.5, 0.0, 0.0), DomainError);
}

TEST_CASE("weak null strata") {
  auto F0 = gaussian_field(2, 0);
  F0.set_mode(1, 1, std::make_shared<GaussianProfile>(0.4, 1.0, 0.5));
  const auto F1 = derive_F1(F0);
  const auto n = weak_null_sources(F0, F1, 0.0);
  const auto A = field_derivative(F0), B = field_derivative(F1);
  for (double q : {-1.0, 0.3}) {
    const auto a = A.values(q), b = B.values(q);
    const auto n2 = pointwise_product(a, a, 4), n3 = pointwise_product(a, b, 4), n4 = pointwise_product(b, b, 4);
    const auto g2 = n.n2.values(q), g3 = n.n3.values(q), g4 = n.n4.values(q);
    for (std::size_t k = 0; k < n2.size(); ++k) {
      CHECK(g2[k] == doctest::Approx(n2[k]).scale(1.0));
      CHECK(g3[k] == doctest::Approx(2.0 * n3[k]).scale(1.0));
      CHECK(g4[k] == doctest::Approx(n4[k]).scale(1.0));
    }
  }
  // the mass step only feeds the l = 0 part of n2
  const auto nm = weak_null_sources(F0, F1, 1.0);
  CHECK(nm.n2.values(1.5)[0] != doctest::Approx(n.n2.values(1.5)[0]));
  CHECK(nm.n2.values(-0.5)[0] == doctest::Approx(n.n2.values(-0.5)[0]));
}

TEST_CASE("varphi01 solves its strata to second order") {
  const auto F0 = gaussian_field(2, 0);
  const auto n = weak_null_sources(F0, derive_F1(F0), 0.0);
  const double t = 24.0, r = 23.5;
  const int idx = 0;
  auto err = [&](double h) {
    const double dt = 0.5 * h;
    auto u = [&](double tt, double rr) { return rr * varphi01_modes(n, tt, rr)[idx]; };
    const double box = -(u(t + dt, r) - 2 * u(t, r) + u(t - dt, r)) / (dt * dt) +
                       (u(t, r + h) - 2 * u(t, r) + u(t, r - h)) / (h * h);
    return std::abs(box - r * varphi01_box_source(n, t, r)[idx]);
  };
  const double e1 = err(0.1), e2 = err(0.05);
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("zero data runs stay zero") {
  RunSpec spec = small_homogeneous();
  spec.F0 = RadiationField(2, 0.8);
  auto rep = run_scenario(spec);
  CHECK(rep.status == "ok");
  REQUIRE(rep.checks.size() == 1);
  CHECK(rep.checks[0].name == "zero_data_max");
  CHECK(rep.checks[0].value == 0.0);
  CHECK(rep.all_pass());

  spec.scenario = "weaknull";
  spec.check_h = 0.2;
  auto wn = run_scenario(spec);
  CHECK(wn.status == "ok");
  CHECK(wn.all_pass());
}

TEST_CASE("free wave gate") {
  RunSpec spec;
  spec.scenario = "validate";
  auto rep = run_scenario(spec);
  CHECK(rep.status == "ok");
  CHECK(rep.all_pass());
  CHECK(rep.provenance.count("version") == 1);
}

TEST_CASE("runs are deterministic across thread counts") {
  RunSpec spec = small_homogeneous();
  auto a = run_scenario(spec);
  auto b = run_scenario(spec);
  spec.threads = 3;
  auto c = run_scenario(spec);
  CHECK(a.status == "ok");
  CHECK(same_series(a, b));
  CHECK(same_series(a, c));
  REQUIRE(a.exponents.size() == c.exponents.size());
  for (std::size_t i = 0; i < a.exponents.size(); ++i) CHECK(a.exponents[i].fitted == c.exponents[i].fitted);
}

TEST_CASE("null radial model scales quadratically") {
  RunSpec spec;
  spec.scenario = "nullradial";
  spec.F0 = gaussian_field(0, 0, 0.01);
  spec.t0 = 1.0;
  spec.T = 20.0;
  spec.h = 0.1;
  spec.n_records = 16;
  auto rep = run_scenario(spec);
  CHECK(rep.status == "ok");
  bool found = false;
  for (auto& c : rep.checks) {
    if (c.name == "reached_t0") CHECK(c.pass);
    if (c.name.find("scaling") != std::string::npos) {
      found = true;
      CHECK(c.pass);
    }
  }
  CHECK(found);
}

TEST_CASE("runtime failures become error reports") {
  RunSpec spec;
  spec.scenario = "nullradial";
  spec.F0 = gaussian_field(2, 0);
  auto rep = run_scenario(spec);
  CHECK(rep.status == "error");
  CHECK(rep.error_stage == "data");
  CHECK_FALSE(rep.all_pass());
}
