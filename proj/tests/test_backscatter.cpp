#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "radscat/backscatter.hpp"
#include "radscat/error.hpp"

using namespace radscat;

namespace {

const double kPi = std::numbers::pi;

SourceProfile bump_l0(double amp = 1.0) {
  SourceProfile n;
  n.n = RadiationField(2, 0.8);
  n.n.set_mode(0, 0, std::make_shared<CompactBumpProfile>(amp, 2.0, 0.0));
  return n;
}

SourceProfile mixed() {
  SourceProfile n;
  n.n = RadiationField(2, 0.8);
  n.n.set_mode(0, 0, std::make_shared<CompactBumpProfile>(1.0, 2.0, 0.0));
  n.n.set_mode(1, 1, std::make_shared<CompactBumpProfile>(0.4, 1.5, 0.5));
  n.n.set_mode(2, -1, std::make_shared<CompactBumpProfile>(-0.3, 1.0, -0.5));
  return n;
}

}  // namespace

TEST_CASE("zero source") {
  SourceProfile n;
  n.n = RadiationField(2, 0.8);
  for (int k : {2, 3, 4}) {
    for (double x : phi_k_modes(n, k, 40, 30)) CHECK(x == 0.0);
    CHECK(phi_k_direct(n, k, 40, 30, {0.3, 0.1}) == 0.0);
  }
  CHECK(phi2_asymptotic(n, 30, 30, {}) == 0.0);
  CHECK(n_norm(n, 2, 1.0) == 0.0);
  auto res = source_residual_check(n, 2, {{30, 28}}, 0.05);
  CHECK(res.max_relative == 0.0);
  CHECK(res.conclusive);
}

TEST_CASE("kernel quadrature agrees with the direct product-grid route") {
  const auto n = bump_l0();
  for (auto [t, r] : {std::pair{40.0, 30.0}, {30.0, 25.0}, {50.0, 42.0}, {60.0, 52.0}, {80.0, 72.0}}) {
    const double a = phi_k(n, 2, t, r, {0.0, 0.0});
    const double b = phi_k_direct(n, 2, t, r, {0.0, 0.0});
    CAPTURE(t);
    CAPTURE(r);
    CHECK(a > 0.0);
    CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
  }
  // off-axis direction and a source without axial symmetry
  const auto m = mixed();
  const Direction w{1.1, 2.3};
  for (int k : {2, 3, 4}) {
    const double a = phi_k(m, k, 40, 33, w), b = phi_k_direct(m, k, 40, 33, w);
    CAPTURE(k);
    CHECK(std::abs(a - b) <= 1e-6 * std::abs(b));
  }
}

TEST_CASE("l = 0 source gives a direction-independent field") {
  const auto n = bump_l0();
  const double ref = phi_k(n, 3, 35, 30, {0.0, 0.0});
  for (Direction w : {Direction{0.7, 0.2}, Direction{2.0, 4.0}, Direction{kPi, 0.0}})
    CHECK(std::abs(phi_k(n, 3, 35, 30, w) - ref) <= 1e-10 * std::abs(ref));
}

TEST_CASE("linearity") {
  const auto a = bump_l0(), b = mixed();
  SourceProfile c;
  c.n = RadiationField(2, 0.8);
  for (int idx = 0; idx < mode_count(2); ++idx) {
    std::vector<double> coefs;
    std::vector<ProfilePtr> parts;
    if (a.n.mode(idx)) {
      coefs.push_back(2.0);
      parts.push_back(a.n.mode_ptr(idx));
    }
    if (b.n.mode(idx)) {
      coefs.push_back(-0.5);
      parts.push_back(b.n.mode_ptr(idx));
    }
    if (!parts.empty()) c.n.set_mode(mode_l(idx), mode_m(idx), std::make_shared<CombinationProfile>(coefs, parts));
  }
  for (int k : {2, 4}) {
    const auto ma = phi_k_modes(a, k, 30, 26), mb = phi_k_modes(b, k, 30, 26), mc = phi_k_modes(c, k, 30, 26);
    for (std::size_t i = 0; i < mc.size(); ++i)
      CHECK(mc[i] == doctest::Approx(2.0 * ma[i] - 0.5 * mb[i]).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("positivity") {
  // 1/sqrt(4 pi) + 0.3 sqrt(3 / 4 pi) cos(theta) > 0
  SourceProfile n;
  n.n = RadiationField(1, 0.8);
  n.n.set_mode(0, 0, std::make_shared<CompactBumpProfile>(1.0, 2.0, 0.0));
  n.n.set_mode(1, 0, std::make_shared<CompactBumpProfile>(0.3, 2.0, 0.0));
  for (int k : {2, 3, 4})
    for (double th : {0.0, 1.0, 2.0, kPi})
      for (auto [t, r] : {std::pair{20.0, 18.0}, {40.0, 41.0}, {50.0, 30.0}}) CHECK(phi_k(n, k, t, r, {th, 0.0}) >= 0.0);
}

TEST_CASE("asymptotic leading term") {
  const auto n = bump_l0();
  const double r = 30;
  // t = r: <t - r> = 1, so the log is ln <2r>, and the q-integral starts at 0
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [](double q) { return CompactBumpProfile(1.0, 2.0, 0.0).value(q); }, 0.0, 2.0, 10, 1e-14);
  const double expect = std::log(std::sqrt(1 + 4 * r * r)) / (2 * r) * I / std::sqrt(4 * kPi);
  CHECK(phi2_asymptotic(n, r, r, {0.4, 1.0}) == doctest::Approx(expect).epsilon(1e-10));
  CHECK_THROWS_AS(phi2_asymptotic(n, 50, 20, {}), DomainError);
}

TEST_CASE("n_norm") {
  SourceProfile n;
  n.n = RadiationField(0, 0.8);
  n.n.set_mode(0, 0, std::make_shared<GaussianProfile>(1.0, 1.0, 0.0));
  const double oracle = std::sqrt(kPi) / std::sqrt(4 * kPi);
  CHECK(n_norm(n, 0, 0.0) == doctest::Approx(oracle).epsilon(1e-10));

  SourceProfile p;
  p.n = RadiationField(1, 0.8);
  p.n.set_mode(0, 0, std::make_shared<CompactBumpProfile>(1.0, 2.0, 3.0));
  p.n.set_mode(1, 1, std::make_shared<CompactBumpProfile>(0.5, 2.0, 3.0));
  double prev = 0.0;
  for (double a : {0.0, 0.5, 1.0, 2.0}) {
    const double v = n_norm(p, 1, a);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(n_norm(p, -1, 0.0), DomainError);
}

TEST_CASE("source residual converges") {
  const auto n = mixed();
  const std::vector<ResidualPoint> pts{{20, 18}, {30, 27}, {40, 38.5}, {25, 24}, {35, 31}};
  for (int k : {2, 3, 4}) {
    auto a = source_residual_check(n, k, pts, 0.05), b = source_residual_check(n, k, pts, 0.025);
    CAPTURE(k);
    CHECK(a.max_relative <= 1e-2);
    CHECK(a.conclusive);
    CHECK(b.max_relative < a.max_relative / 3.0);
  }
  // inside the cutoff transition (<q>/r between 1/8 and 1/4), for either cutoff power
  for (int p : {1, 2}) {
    KernelQuadratureSpec spec;
    spec.cutoff_power = p;
    auto a = source_residual_check(bump_l0(), 2, {{21, 20.5}, {23, 21}}, 0.05, spec);
    CAPTURE(p);
    CHECK(a.max_relative <= 1e-2);
  }
}

TEST_CASE("decay envelopes along t = r + 5") {
  auto n = mixed();
  n.a = 1.0;
  const std::vector<double> radii{20, 40, 80, 160};
  for (int k : {2, 3, 4}) {
    auto rows = backscatter_sweep(n, k, radii, 5.0);
    double lo = 1e300, hi = 0.0;
    for (auto& row : rows) {
      lo = std::min(lo, row.envelope);
      hi = std::max(hi, row.envelope);
      if (k == 2) {
        CHECK(row.asymptotic > 0.0);
        CHECK(row.remainder / n_norm(n, 0, n.a) < 5.0);
      }
    }
    CAPTURE(k);
    CHECK(hi < 2.0);
    CHECK(hi / lo < 2.0);
  }
}

TEST_CASE("argument checks") {
  const auto n = bump_l0();
  CHECK_THROWS_AS(phi_k_modes(n, 5, 10, 5), DomainError);
  CHECK_THROWS_AS(phi_k_modes(n, 2, 10, 0), DomainError);
  KernelQuadratureSpec bad;
  bad.n_mu = 4;
  CHECK_THROWS_AS(phi_k_modes(n, 2, 10, 5, bad), DomainError);
  SourceProfile g;
  g.n = RadiationField(0, 0.8);
  g.n.set_mode(0, 0, std::make_shared<PolyTailProfile>(1.0, 3.0, 0.0));
  CHECK_THROWS_AS(phi_k_direct(g, 2, 40, 30, {}), DomainError);
  // q >= r - t = 30 lies outside t + r + q > 8 <q>, where the cutoff vanishes
  for (double x : phi_k_modes(n, 2, 10, 40)) CHECK(x == 0.0);
}
