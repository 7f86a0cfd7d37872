#include "radscat/radiation_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radscat/error.hpp"
#include "radscat/quadrature.hpp"

namespace radscat {

RadiationField::RadiationField(int band_limit, double gamma)
    : L_(band_limit), gamma_(gamma), modes_(mode_count(band_limit)) {
  if (band_limit < 0) throw DomainError("RadiationField: negative band limit");
}

void RadiationField::set_mode(int l, int m, ProfilePtr p) {
  if (l < 0 || l > L_ || std::abs(m) > l) {
    std::ostringstream os;
    os << "RadiationField: mode (" << l << "," << m << ") outside band limit " << L_;
    throw DomainError(os.str());
  }
  modes_[mode_index(l, m)] = std::move(p);
}

std::vector<int> RadiationField::active() const {
  std::vector<int> a;
  for (int k = 0; k < static_cast<int>(modes_.size()); ++k)
    if (modes_[k]) a.push_back(k);
  return a;
}

ModeVector RadiationField::values(double q) const {
  ModeVector v(modes_.size(), 0.0);
  for (std::size_t k = 0; k < modes_.size(); ++k)
    if (modes_[k]) v[k] = modes_[k]->value(q);
  return v;
}

RadiationField RadiationField::scaled(double c) const {
  RadiationField out(L_, gamma_);
  for (int k : active())
    out.modes_[k] = std::make_shared<CombinationProfile>(std::vector<double>{c}, std::vector<ProfilePtr>{modes_[k]});
  return out;
}

RadiationField derive_F1(const RadiationField& F0) {
  RadiationField F1(F0.band_limit(), F0.gamma());
  for (int k : F0.active()) {
    const int l = mode_l(k);
    if (l == 0) continue;
    const double coef = -0.5 * l * (l + 1);
    F1.set_mode(l, mode_m(k), std::make_shared<AntiderivativeProfile>(F0.mode_ptr(k), coef, 0.0));
  }
  return F1;
}

namespace {

double weighted_derivative(const Profile& p, double q, int k) {
  double out = 0.0;
  weighted_derivatives(p.jet(q, k), q, [&](int i, double v) {
    if (i == k) out = v;
  });
  return out;
}

// int over the real line of g, respecting compact support when declared
double integrate_profile_line(const Profile& p, const RealFn& g) {
  auto [a, b] = p.negligible_outside();
  if (std::isfinite(a) && std::isfinite(b)) {
    const int panels = std::max(4, static_cast<int>(std::ceil((b - a) / std::max(p.scale() / 2.0, 1e-3))));
    std::vector<double> br(panels + 1);
    for (int i = 0; i <= panels; ++i) br[i] = a + (b - a) * i / panels;
    return integrate_panels(g, br, 1e-13);
  }
  return integrate_line(g, p.center(), 8.0 * std::max(1.0, p.scale()), 1e-12);
}

}  // namespace

double norm_data_L2(const RadiationField& F, int N, double weight_exponent) {
  if (N < 0) throw DomainError("norm_data_L2: N must be nonnegative");
  std::vector<double> terms;
  for (int idx : F.active()) {
    const Profile& p = *F.mode(idx);
    const int l = mode_l(idx), m = mode_m(idx);
    if (p.max_derivative_order() < N) {
      std::ostringstream os;
      os << "norm_data_L2: mode (" << l << "," << m << ") supports only " << p.max_derivative_order()
         << " derivatives, N=" << N;
      throw DomainError(os.str());
    }
    if (2.0 * weight_exponent - 2.0 * p.tail_exponent() >= -1.0) {
      std::ostringstream os;
      os << "norm_data_L2: tail integral diverges for mode (" << l << "," << m << "): decay exponent "
         << p.tail_exponent() << " with weight exponent " << weight_exponent;
      throw QuadratureError(os.str());
    }
    const double lam = 1.0 + l * (l + 1.0);
    for (int k = 0; k <= N; ++k) {
      double ik = integrate_profile_line(p, [&](double q) {
        double g = weighted_derivative(p, q, k);
        return g * g * std::pow(1.0 + q * q, weight_exponent);
      });
      double ang = 0.0;
      for (int j = 0; j + k <= N; ++j) ang += std::pow(lam, j);
      terms.push_back(ik * ang);
    }
  }
  return pairwise_sum(terms);
}

std::vector<double> default_q_sample() {
  std::vector<double> qs;
  for (int i = -3200; i <= 3200; ++i) qs.push_back(i / 32.0);
  for (double q = 100.0 * 1.02; q < 1e6; q *= 1.02) {
    qs.push_back(q);
    qs.push_back(-q);
  }
  std::sort(qs.begin(), qs.end());
  return qs;
}

double norm_data_sup(const RadiationField& F, int Nprime, double gamma) {
  return norm_data_sup(F, Nprime, gamma, default_q_sample());
}

double norm_data_sup(const RadiationField& F, int Nprime, double gamma, const std::vector<double>& qs) {
  if (Nprime < 0) throw DomainError("norm_data_sup: N' must be nonnegative");
  const auto act = F.active();
  if (act.empty()) return 0.0;
  const int L = F.band_limit();
  AngularGrid grid(L, 2 * L + 2, 4 * L + 2);
  // sup[k][j]
  std::vector<std::vector<double>> sup(Nprime + 1, std::vector<double>(Nprime + 1, 0.0));
  std::vector<std::vector<double>> G(Nprime + 1, std::vector<double>(mode_count(L), 0.0));
  std::vector<double> coeffs(mode_count(L)), vals(grid.size());
  for (double q : qs) {
    for (int idx : act) {
      weighted_derivatives(F.mode(idx)->jet(q, Nprime), q, [&](int k, double v) { G[k][idx] = v; });
    }
    const double wq = std::pow(1.0 + q * q, 0.5 * gamma);
    for (int k = 0; k <= Nprime; ++k) {
      for (int j = 0; j + k <= Nprime; ++j) {
        for (int idx : act) {
          const int l = mode_l(idx);
          coeffs[idx] = G[k][idx] * std::pow(1.0 + l * (l + 1.0), 0.5 * j);
        }
        grid.synthesize(coeffs.data(), L, vals.data());
        double mx = 0.0;
        for (double v : vals) mx = std::max(mx, std::abs(v));
        sup[k][j] = std::max(sup[k][j], wq * mx);
      }
    }
  }
  double total = 0.0;
  for (int k = 0; k <= Nprime; ++k)
    for (int j = 0; j + k <= Nprime; ++j) total += sup[k][j];
  return total;
}

RadiationField field_derivative(const RadiationField& F, double coef) {
  RadiationField out(F.band_limit(), F.gamma());
  for (int idx : F.active())
    out.set_mode(mode_l(idx), mode_m(idx), std::make_shared<DerivativeProfile>(F.mode_ptr(idx), coef));
  return out;
}

RadiationField field_product(const RadiationField& A, const RadiationField& B, double coef) {
  const int L = A.band_limit() + B.band_limit();
  RadiationField out(L, A.gamma());
  std::vector<std::vector<ProductProfile::Term>> terms(mode_count(L));
  for (auto& g : gaunt_table(A.active(), B.active(), L))
    terms[g.k].push_back({coef * g.g, A.mode_ptr(g.i), B.mode_ptr(g.j)});
  for (int k = 0; k < mode_count(L); ++k)
    if (!terms[k].empty()) out.set_mode(mode_l(k), mode_m(k), std::make_shared<ProductProfile>(std::move(terms[k])));
  return out;
}

RadiationField field_sum(const std::vector<RadiationField>& parts) {
  int L = 0;
  double gamma = parts.empty() ? 0.75 : parts.front().gamma();
  for (auto& p : parts) L = std::max(L, p.band_limit());
  RadiationField out(L, gamma);
  for (int k = 0; k < mode_count(L); ++k) {
    std::vector<double> c;
    std::vector<ProfilePtr> ps;
    for (auto& p : parts)
      if (k < mode_count(p.band_limit()) && p.mode(k)) {
        c.push_back(1.0);
        ps.push_back(p.mode_ptr(k));
      }
    if (ps.size() == 1)
      out.set_mode(mode_l(k), mode_m(k), ps.front());
    else if (!ps.empty())
      out.set_mode(mode_l(k), mode_m(k), std::make_shared<CombinationProfile>(c, ps));
  }
  return out;
}

}  // namespace radscat

