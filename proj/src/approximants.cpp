#include "radscat/approximants.hpp"

#include <cmath>
#include <numbers>

#include "radscat/cutoff.hpp"
#include "radscat/error.hpp"

namespace radscat {

namespace {
const double kSqrt4Pi = 2.0 * std::sqrt(std::numbers::pi);
}

Approximant parse_approximant(const std::string& name) {
  if (name == "psi0") return Approximant::psi0;
  if (name == "psi01") return Approximant::psi01;
  if (name == "psi_e") return Approximant::psi_e;
  if (name == "dt_psi0") return Approximant::dt_psi0;
  if (name == "dt_psi1") return Approximant::dt_psi1;
  if (name == "dt_psi_e") return Approximant::dt_psi_e;
  if (name == "dt_psi01") return Approximant::dt_psi01;
  throw DomainError("unknown approximant '" + name + "'");
}

ConePoint::ConePoint(double t_, double r_) : t(t_), r(r_), tau(t_ - r_) {
  if (!(r_ > 0.0)) throw DomainError("approximants are evaluated at r > 0 only");
  p = bracket(tau);
  s = p / r;
  chi_cutoff().eval2(s, chi, dchi, ddchi);
}

double psi01_mode(const ConePoint& cp, const Jet* j0, const Jet* j1) {
  if (cp.chi == 0.0) return 0.0;
  double f = 0.0;
  if (j0) f += (*j0)[0] / cp.r;
  if (j1) f += (*j1)[0] / (cp.r * cp.r);
  return f * cp.chi;
}

double dt_psi01_mode(const ConePoint& cp, const Jet* j0, const Jet* j1) {
  if (cp.outside()) return 0.0;
  const double r = cp.r, r2 = r * r;
  double a = 0.0, b = 0.0;  // F0'/r + F1'/r^2 and F0/r + F1/r^2
  if (j0) {
    a += (*j0)[1] / r;
    b += (*j0)[0] / r;
  }
  if (j1) {
    a += (*j1)[1] / r2;
    b += (*j1)[0] / r2;
  }
  return -a * cp.chi + b * cp.dchi * cp.tau / (cp.p * r);
}

double box_psi01_mode(int l, const ConePoint& cp, const Jet* j0, const Jet* j1) {
  if (cp.outside()) return 0.0;
  const double r = cp.r, p = cp.p;
  const double c0 = cp.chi, c1 = cp.dchi, c2 = cp.ddchi;
  const double Dp = -2.0 * cp.tau / p;
  const double Ds = Dp / r - p / (r * r);
  // D(chi' p r^-k) with D = d_r - d_t
  auto Dk = [&](int k) {
    const double rk = std::pow(r, -k);
    return c2 * Ds * p * rk + c1 * Dp * rk - k * c1 * p * rk / r;
  };
  double out = 0.0;
  if (j0) {
    const double F = (*j0)[0], Fp = (*j0)[1];
    out += -2.0 * Fp * c1 * p / (r * r * r) - (F / r) * Dk(2);
  }
  if (j1) {
    const double F = (*j1)[0], Fp = (*j1)[1];
    const double r2 = r * r, r4 = r2 * r2;
    const double Dchi_r2 = c1 * Ds / r2 - 2.0 * c0 / (r2 * r);
    out += -double(l) * (l + 1) * F * c0 / r4 - 2.0 * Fp * c1 * p / r4 - (F / r) * (Dk(3) + Dchi_r2);
  }
  return out;
}

double psi_e_mode(double M, double t, double r) {
  if (!(r > 0.0)) throw DomainError("psi_e is evaluated at r > 0 only");
  return M * chi_e_cutoff()(r - t) / r * kSqrt4Pi;
}

double dt_psi_e_mode(double M, double t, double r) {
  if (!(r > 0.0)) throw DomainError("psi_e is evaluated at r > 0 only");
  double c0, c1, c2;
  chi_e_cutoff().eval2(r - t, c0, c1, c2);
  return -M * c1 / r * kSqrt4Pi;
}

ModeVector eval_approximant(const RadiationField& F0, const RadiationField& F1, double M, Approximant which,
                            double t, double r) {
  const int L = std::max(F0.band_limit(), F1.band_limit());
  ModeVector out(mode_count(L), 0.0);
  if (which == Approximant::psi_e) {
    out[0] = psi_e_mode(M, t, r);
    return out;
  }
  if (which == Approximant::dt_psi_e) {
    out[0] = dt_psi_e_mode(M, t, r);
    return out;
  }
  ConePoint cp(t, r);
  if (cp.outside()) return out;
  const double q = r - t;
  for (int idx = 0; idx < mode_count(L); ++idx) {
    const Profile* f0 = idx < mode_count(F0.band_limit()) ? F0.mode(idx) : nullptr;
    const Profile* f1 = idx < mode_count(F1.band_limit()) ? F1.mode(idx) : nullptr;
    if (!f0 && !f1) continue;
    Jet j0, j1;
    if (f0) j0 = f0->jet(q, 1);
    if (f1) j1 = f1->jet(q, 1);
    const Jet* p0 = f0 ? &j0 : nullptr;
    const Jet* p1 = f1 ? &j1 : nullptr;
    switch (which) {
      case Approximant::psi0:
        out[idx] = f0 ? j0[0] * cp.chi / r : 0.0;
        break;
      case Approximant::psi01:
        out[idx] = psi01_mode(cp, p0, p1);
        break;
      case Approximant::dt_psi0:
        out[idx] = f0 ? -j0[1] * cp.chi / r : 0.0;
        break;
      case Approximant::dt_psi1:
        out[idx] = f1 ? -j1[1] * cp.chi / (r * r) : 0.0;
        break;
      case Approximant::dt_psi01:
        out[idx] = dt_psi01_mode(cp, p0, p1);
        break;
      default:
        break;
    }
  }
  return out;
}

ModeVector residual_box_psi01(const RadiationField& F0, const RadiationField& F1, double t, double r) {
  const int L = std::max(F0.band_limit(), F1.band_limit());
  ModeVector out(mode_count(L), 0.0);
  ConePoint cp(t, r);
  if (cp.outside()) return out;
  const double q = r - t;
  for (int idx = 0; idx < mode_count(L); ++idx) {
    const Profile* f0 = idx < mode_count(F0.band_limit()) ? F0.mode(idx) : nullptr;
    const Profile* f1 = idx < mode_count(F1.band_limit()) ? F1.mode(idx) : nullptr;
    if (!f0 && !f1) continue;
    Jet j0, j1;
    if (f0) j0 = f0->jet(q, 1);
    if (f1) j1 = f1->jet(q, 1);
    out[idx] = box_psi01_mode(mode_l(idx), cp, f0 ? &j0 : nullptr, f1 ? &j1 : nullptr);
  }
  return out;
}

}  // namespace radscat
