#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/spherical_harmonic.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "radscat/angular.hpp"
#include "radscat/error.hpp"

using namespace radscat;

namespace {

const double kPi = std::numbers::pi;

// Real harmonic built from Boost's complex Y_l^m, which carries the
// Condon-Shortley phase; the (-1)^m undoes it.
double oracle_real_sh(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double cs = (am % 2) ? -1.0 : 1.0;
  if (m == 0) return boost::math::spherical_harmonic_r<double>(l, 0, theta, phi);
  if (m > 0) return std::numbers::sqrt2 * cs * boost::math::spherical_harmonic_r<double>(l, am, theta, phi);
  return std::numbers::sqrt2 * cs * boost::math::spherical_harmonic_i<double>(l, am, theta, phi);
}

// Boost stores the nonnegative half of the 40-point rule.
struct GaussLegendreTable {
  int n = 0;
  std::vector<double> x, w;
  GaussLegendreTable() {
    using G = boost::math::quadrature::gauss<double, 40>;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
      x.push_back(ab[i]);
      w.push_back(wt[i]);
      if (ab[i] != 0.0) {
        x.push_back(-ab[i]);
        w.push_back(wt[i]);
      }
    }
    n = static_cast<int>(x.size());
  }
};

ModeVector random_modes(int L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ModeVector c(mode_count(L));
  for (double& x : c) x = U(rng);
  return c;
}

// int_{S^2} Y_a Y_b Y_c by a product rule that shares nothing with AngularGrid:
// 40-point Gauss-Legendre in theta from Boost, 64 uniform points in phi.
double gaunt_oracle(int a, int b, int c) {
  static const GaussLegendreTable gl = GaussLegendreTable();
  double s = 0.0;
  const int nphi = 64;
  for (int i = 0; i < gl.n; ++i) {
    const double th = std::acos(gl.x[i]);
    for (int j = 0; j < nphi; ++j) {
      const double ph = 2.0 * kPi * j / nphi;
      s += gl.w[i] * (2.0 * kPi / nphi) * oracle_real_sh(mode_l(a), mode_m(a), th, ph) *
           oracle_real_sh(mode_l(b), mode_m(b), th, ph) * oracle_real_sh(mode_l(c), mode_m(c), th, ph);
    }
  }
  return s;
}

}  // namespace

TEST_CASE("mode indexing") {
  for (int idx = 0; idx < mode_count(6); ++idx) CHECK(mode_index(mode_l(idx), mode_m(idx)) == idx);
  CHECK(mode_index(2, 1) == 7);
  CHECK(band_limit_of(ModeVector(mode_count(3))) == 3);
}

TEST_CASE("real harmonics agree with the complex-harmonic oracle") {
  for (int l = 0; l <= 6; ++l)
    for (int m = -l; m <= l; ++m)
      for (double th : {0.1, 0.9, 1.7, 2.9})
        for (double ph : {0.0, 0.4, 2.5, 5.1})
          CHECK(real_sh(l, m, th, ph) == doctest::Approx(oracle_real_sh(l, m, th, ph)).epsilon(1e-12).scale(1.0));
}

TEST_CASE("grid weights") {
  AngularGrid g(5);
  double sum = 0.0;
  for (double w : g.weights()) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(4 * kPi).epsilon(1e-14));
  CHECK_THROWS_AS(AngularGrid(5, 5, 11), DomainError);
  CHECK_THROWS_AS(AngularGrid(5, 6, 10), DomainError);
}

TEST_CASE("synthesize") {
  AngularGrid g(4);
  ModeVector c(mode_count(4), 0.0);
  c[0] = 2.5;
  for (double v : synthesize(c, g)) CHECK(v == doctest::Approx(2.5 / std::sqrt(4 * kPi)).epsilon(1e-15));

  ModeVector y10(mode_count(4), 0.0);
  y10[mode_index(1, 0)] = 1.0;
  auto vals = synthesize(y10, g);
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j)
      CHECK(vals[i * g.n_phi() + j] == doctest::Approx(std::sqrt(3 / (4 * kPi)) * g.cos_theta(i)).epsilon(1e-14));

  ModeVector big(mode_count(5), 0.0);
  std::vector<double> out(g.size());
  CHECK_THROWS_AS(g.synthesize(big.data(), 5, out.data()), DomainError);
}

TEST_CASE("analyze") {
  AngularGrid g(6);
  std::mt19937_64 rng(11);
  auto c = random_modes(6, rng);
  auto back = analyze(synthesize(c, g), g);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(back[k] == doctest::Approx(c[k]).epsilon(1e-12).scale(1.0));

  std::vector<double> one(g.size(), 1.0);
  auto c1 = analyze(one, g);
  CHECK(c1[0] == doctest::Approx(std::sqrt(4 * kPi)).epsilon(1e-14));
  for (std::size_t k = 1; k < c1.size(); ++k) CHECK(std::abs(c1[k]) < 1e-14);

  // cos^2 = 1/3 + (2/3) P_2, P_2 = sqrt(4 pi / 5) Y_20
  std::vector<double> c2(g.size());
  for (int i = 0; i < g.n_theta(); ++i)
    for (int j = 0; j < g.n_phi(); ++j) c2[i * g.n_phi() + j] = g.cos_theta(i) * g.cos_theta(i);
  auto m2 = analyze(c2, g);
  CHECK(m2[0] == doctest::Approx(std::sqrt(4 * kPi) / 3).epsilon(1e-14));
  CHECK(m2[mode_index(2, 0)] == doctest::Approx(2.0 / 3.0 * std::sqrt(4 * kPi / 5)).epsilon(1e-14));
  for (std::size_t k = 0; k < m2.size(); ++k)
    if (k != 0 && k != static_cast<std::size_t>(mode_index(2, 0))) CHECK(std::abs(m2[k]) < 1e-14);

  for (double x : analyze(std::vector<double>(g.size(), 0.0), g)) CHECK(x == 0.0);
}

TEST_CASE("laplace_beltrami") {
  ModeVector c(mode_count(3), 0.0);
  c[0] = 4.0;
  c[mode_index(2, 1)] = 1.0;
  auto d = laplace_beltrami(c);
  CHECK(d[0] == 0.0);
  CHECK(d[mode_index(2, 1)] == -6.0);
  AngularGrid g(3);
  std::mt19937_64 rng(3);
  auto r = random_modes(3, rng);
  auto a = laplace_beltrami(analyze(synthesize(r, g), g));
  auto b = analyze(synthesize(laplace_beltrami(r), g), g);
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("Parseval") {
  std::mt19937_64 rng(5);
  for (int L : {0, 3, 8}) {
    AngularGrid g(L);
    auto c = random_modes(L, rng);
    auto v = synthesize(c, g);
    double quad = 0.0, sum = 0.0;
    for (int p = 0; p < g.size(); ++p) quad += g.weight(p) * v[p] * v[p];
    for (double x : c) sum += x * x;
    CHECK(quad == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("pointwise_product") {
  ModeVector zero(mode_count(3), 0.0);
  std::mt19937_64 rng(7);
  auto a = random_modes(3, rng);
  for (double x : pointwise_product(a, zero)) CHECK(x == 0.0);

  ModeVector s1(1, 1.5), s2(1, -0.4);
  auto p = pointwise_product(s1, s2);
  CHECK(p[0] == doctest::Approx(1.5 * -0.4 / std::sqrt(4 * kPi)).epsilon(1e-14));

  auto b = random_modes(3, rng);
  auto ab = pointwise_product(a, b), ba = pointwise_product(b, a);
  for (std::size_t k = 0; k < ab.size(); ++k) CHECK(ab[k] == doctest::Approx(ba[k]).epsilon(1e-13).scale(1.0));
}

TEST_CASE("truncated product matches Gaunt coefficients") {
  // band limits 2 + 2 <= 4, product kept to band 4
  std::mt19937_64 rng(13);
  const int L = 4;
  ModeVector a(mode_count(L), 0.0), b(mode_count(L), 0.0);
  auto ra = random_modes(2, rng), rb = random_modes(2, rng);
  std::copy(ra.begin(), ra.end(), a.begin());
  std::copy(rb.begin(), rb.end(), b.begin());
  auto c = pointwise_product(a, b, L);
  for (int k = 0; k < mode_count(L); ++k) {
    double ref = 0.0;
    for (int i = 0; i < mode_count(2); ++i)
      for (int j = 0; j < mode_count(2); ++j) ref += a[i] * b[j] * gaunt_oracle(i, j, k);
    CHECK(c[k] == doctest::Approx(ref).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("dealiased product is exact for retained modes at full band") {
  // L = 3 inputs, product truncated to 3: compare with a grid fine enough for degree 9
  std::mt19937_64 rng(17);
  auto a = random_modes(3, rng), b = random_modes(3, rng);
  auto c = pointwise_product(a, b);
  AngularGrid fine(3, 12, 25);
  auto va = synthesize(a, fine), vb = synthesize(b, fine);
  for (int p = 0; p < fine.size(); ++p) va[p] *= vb[p];
  auto ref = analyze(va, fine);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == doctest::Approx(ref[k]).epsilon(1e-12).scale(1.0));
}
