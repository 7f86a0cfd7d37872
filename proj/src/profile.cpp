#include "radscat/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "radscat/cutoff.hpp"
#include "radscat/error.hpp"
#include "radscat/quadrature.hpp"

namespace radscat {

namespace {

std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt_num(v[i]);
  }
  return s;
}

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string("profile parameter ") + what + " is not finite");
}

}  // namespace

// ---------------------------------------------------------------- gaussian

GaussianProfile::GaussianProfile(double amplitude, double width, double center)
    : a_(amplitude), w_(width), c_(center) {
  require_finite(a_, "A");
  require_finite(w_, "w");
  require_finite(c_, "c");
  if (!(w_ > 0)) throw DomainError("gaussian: width w must be positive");
}

Jet GaussianProfile::jet(double q, int order) const {
  Jet z = (Jet::variable(order, q) - c_) * (1.0 / w_);
  return a_ * exp(-(z * z));
}

double GaussianProfile::value(double q) const {
  double z = (q - c_) / w_;
  return a_ * std::exp(-z * z);
}

std::pair<double, double> GaussianProfile::negligible_outside() const {
  // exp(-28.5^2) underflows to zero
  return {c_ - 28.5 * w_, c_ + 28.5 * w_};
}

std::string GaussianProfile::describe() const {
  return "gaussian A=" + fmt_num(a_) + " w=" + fmt_num(w_) + " c=" + fmt_num(c_);
}

// --------------------------------------------------------------- poly-tail

PolyTailProfile::PolyTailProfile(double amplitude, double exponent, double center, double width)
    : a_(amplitude), p_(exponent), c_(center), w_(width) {
  require_finite(a_, "A");
  require_finite(p_, "p");
  require_finite(c_, "c");
  require_finite(w_, "w");
  if (!(p_ > 0)) throw DomainError("poly-tail: exponent p must be positive");
  if (!(w_ > 0)) throw DomainError("poly-tail: width w must be positive");
}

Jet PolyTailProfile::jet(double q, int order) const {
  Jet z = (Jet::variable(order, q) - c_) * (1.0 / w_);
  return a_ * pow(1.0 + z * z, -0.5 * p_);
}

double PolyTailProfile::value(double q) const {
  double z = (q - c_) / w_;
  return a_ * std::pow(1.0 + z * z, -0.5 * p_);
}

std::string PolyTailProfile::describe() const {
  std::string d = "poly-tail A=" + fmt_num(a_) + " p=" + fmt_num(p_) + " c=" + fmt_num(c_);
  if (w_ != 1.0) d += " w=" + fmt_num(w_);
  return d;
}

// ------------------------------------------------------------ compact-bump

CompactBumpProfile::CompactBumpProfile(double amplitude, double width, double center)
    : a_(amplitude), w_(width), c_(center) {
  require_finite(a_, "A");
  require_finite(w_, "w");
  require_finite(c_, "c");
  if (!(w_ > 0)) throw DomainError("compact-bump: width w must be positive");
}

Jet CompactBumpProfile::jet(double q, int order) const {
  double x0 = (q - c_) / w_;
  if (std::abs(x0) >= 1.0) return Jet(order, 0.0);
  Jet x = (Jet::variable(order, q) - c_) * (1.0 / w_);
  return a_ * exp(1.0 - 1.0 / (1.0 - x * x));
}

std::string CompactBumpProfile::describe() const {
  return "compact-bump A=" + fmt_num(a_) + " w=" + fmt_num(w_) + " c=" + fmt_num(c_);
}

// ----------------------------------------------------------------- sampled

SampledProfile::SampledProfile(std::vector<double> q, std::vector<double> f)
    : q_(std::move(q)), f_(std::move(f)) {
  const std::size_t n = q_.size();
  if (n < 2 || f_.size() != n) throw DomainError("sampled: need at least two (q, f) pairs of equal length");
  for (std::size_t i = 0; i < n; ++i) {
    require_finite(q_[i], "q");
    require_finite(f_[i], "f");
    if (i && !(q_[i] > q_[i - 1])) throw DomainError("sampled: q nodes must be strictly increasing");
  }
  // natural spline: m_0 = m_{n-1} = 0, tridiagonal for the interior
  m_.assign(n, 0.0);
  if (n > 2) {
    std::vector<double> diag(n, 0.0), rhs(n, 0.0), up(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double h0 = q_[i] - q_[i - 1], h1 = q_[i + 1] - q_[i];
      diag[i] = (h0 + h1) / 3.0;
      up[i] = h1 / 6.0;
      rhs[i] = (f_[i + 1] - f_[i]) / h1 - (f_[i] - f_[i - 1]) / h0;
    }
    // Thomas algorithm; sub-diagonal entry of row i is h_{i-1}/6
    for (std::size_t i = 2; i + 1 < n; ++i) {
      double lo = (q_[i] - q_[i - 1]) / 6.0;
      double k = lo / diag[i - 1];
      diag[i] -= k * up[i - 1];
      rhs[i] -= k * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      double next = (i + 2 < n) ? m_[i + 1] : 0.0;
      m_[i] = (rhs[i] - up[i] * next) / diag[i];
      if (i == 1) break;
    }
  }
}

double SampledProfile::scale() const { return (q_.back() - q_.front()) / 8.0; }

Jet SampledProfile::jet(double q, int order) const {
  Jet out(order, 0.0);
  if (q < q_.front() || q > q_.back()) return out;
  std::size_t i = std::upper_bound(q_.begin(), q_.end(), q) - q_.begin();
  if (i == 0) i = 1;
  if (i >= q_.size()) i = q_.size() - 1;
  const double h = q_[i] - q_[i - 1];
  const double a = q_[i] - q, b = q - q_[i - 1];
  const double m0 = m_[i - 1], m1 = m_[i];
  // S = (m0 a^3 + m1 b^3)/(6h) + (f0/h - m0 h/6) a + (f1/h - m1 h/6) b
  const double f0 = f_[i - 1], f1 = f_[i];
  out[0] = (m0 * a * a * a + m1 * b * b * b) / (6 * h) + (f0 / h - m0 * h / 6) * a +
           (f1 / h - m1 * h / 6) * b;
  if (order >= 1)
    out[1] = (-m0 * a * a + m1 * b * b) / (2 * h) - (f0 / h - m0 * h / 6) + (f1 / h - m1 * h / 6);
  if (order >= 2) out[2] = 0.5 * (m0 * a + m1 * b) / h;
  if (order >= 3) out[3] = (m1 - m0) / (6 * h);
  return out;
}

std::string SampledProfile::describe() const {
  return "sampled q=" + fmt_list(q_) + " f=" + fmt_list(f_);
}

// ---------------------------------------------------------- antiderivative

AntiderivativeProfile::AntiderivativeProfile(ProfilePtr base, double coef, double q_ref, double dq)
    : base_(std::move(base)), coef_(coef), q_ref_(q_ref) {
  if (!base_) throw DomainError("antiderivative: null base profile");
  dq_ = std::min(dq, base_->scale() / 64.0);
  auto [a, b] = base_->negligible_outside();
  left_flat_ = std::isfinite(a);
  right_flat_ = std::isfinite(b);
  const double c = base_->center();
  if (!left_flat_) a = c - 256.0 * std::max(1.0, base_->scale());
  if (!right_flat_) b = c + 256.0 * std::max(1.0, base_->scale());
  a = std::min(a, q_ref_);
  b = std::max(b, q_ref_);
  // align nodes so that q_ref is a node
  long ia = static_cast<long>(std::floor((a - q_ref_) / dq_));
  long ib = static_cast<long>(std::ceil((b - q_ref_) / dq_));
  lo_ = q_ref_ + ia * dq_;
  hi_ = q_ref_ + ib * dq_;
  const long n = ib - ia;
  table_order_ = std::min(kTableOrder, base_->max_derivative_order() + 1);
  const int stride = table_order_ + 1;
  taylor_.assign(static_cast<std::size_t>(n + 1) * stride, 0.0);

  // cumulative integral by 16-point Gauss-Legendre per cell, outward from q_ref
  static const GaussLegendre gl = gauss_legendre(16);
  auto cell = [&](double x0, double x1) {
    double s = 0.0, m = 0.5 * (x0 + x1), hw = 0.5 * (x1 - x0);
    for (int k = 0; k < 16; ++k) s += gl.w[k] * base_->value(m + hw * gl.x[k]);
    return s * hw;
  };
  const bool smooth = base_->max_derivative_order() >= kTableOrder - 1;
  auto cell_integral = [&](double x0, double x1) {
    return smooth ? cell(x0, x1) : integrate_interval([&](double x) { return base_->value(x); }, x0, x1, 1e-13);
  };
  const long iref = -ia;
  taylor_[iref * stride] = 0.0;
  for (long i = iref + 1; i <= n; ++i)
    taylor_[i * stride] = taylor_[(i - 1) * stride] + cell_integral(lo_ + (i - 1) * dq_, lo_ + i * dq_);
  for (long i = iref - 1; i >= 0; --i)
    taylor_[i * stride] = taylor_[(i + 1) * stride] - cell_integral(lo_ + i * dq_, lo_ + (i + 1) * dq_);
  for (long i = 0; i <= n; ++i) {
    Jet bj = base_->jet(lo_ + i * dq_, table_order_ - 1);
    for (int k = 1; k <= table_order_; ++k) taylor_[i * stride + k] = bj[k - 1] / k;
  }
  left_const_ = taylor_[0];
  right_const_ = taylor_[n * stride];
}

double AntiderivativeProfile::integral_from_table_end(double q) const {
  if (q < lo_) {
    if (left_flat_) return left_const_;
    return left_const_ - integrate_interval([&](double x) { return base_->value(x); }, q, lo_, 1e-12);
  }
  if (right_flat_) return right_const_;
  return right_const_ + integrate_interval([&](double x) { return base_->value(x); }, hi_, q, 1e-12);
}

double AntiderivativeProfile::value(double q) const {
  if (q < lo_ || q > hi_) return coef_ * integral_from_table_end(q);
  const int stride = table_order_ + 1;
  long i = std::lround((q - lo_) / dq_);
  const double qi = lo_ + i * dq_;
  const double d = q - qi;
  const double* t = &taylor_[i * stride];
  if (table_order_ < kTableOrder) {
    // low-order base: exact integral inside the cell
    double rest = (d == 0.0) ? 0.0
                             : integrate_interval([&](double x) { return base_->value(x); }, qi, q, 1e-13);
    return coef_ * (t[0] + rest);
  }
  double s = t[table_order_];
  for (int k = table_order_ - 1; k >= 0; --k) s = s * d + t[k];
  return coef_ * s;
}

Jet AntiderivativeProfile::jet(double q, int order) const {
  Jet out(order, value(q));
  if (order >= 1) {
    Jet bj = base_->jet(q, order - 1);
    for (int k = 1; k <= order; ++k) out[k] = coef_ * bj[k - 1] / k;
  }
  return out;
}

int AntiderivativeProfile::max_derivative_order() const {
  return std::min(Jet::kMaxOrder, base_->max_derivative_order() + 1);
}

double AntiderivativeProfile::tail_exponent() const {
  double e = base_->tail_exponent();
  return e > 1.0 ? 0.0 : e - 1.0;
}

std::string AntiderivativeProfile::describe() const {
  return "antiderivative coef=" + fmt_num(coef_) + " from=" + fmt_num(q_ref_) + " of [" +
         base_->describe() + "]";
}

// ------------------------------------------------------------- combination

CombinationProfile::CombinationProfile(std::vector<double> coefs, std::vector<ProfilePtr> parts)
    : c_(std::move(coefs)), p_(std::move(parts)) {
  if (c_.size() != p_.size() || p_.empty()) throw DomainError("combination: coefficient/part mismatch");
  for (auto& p : p_)
    if (!p) throw DomainError("combination: null part");
}

Jet CombinationProfile::jet(double q, int order) const {
  Jet out(order, 0.0);
  for (std::size_t i = 0; i < p_.size(); ++i) out += c_[i] * p_[i]->jet(q, order);
  return out;
}

int CombinationProfile::max_derivative_order() const {
  int m = Jet::kMaxOrder;
  for (auto& p : p_) m = std::min(m, p->max_derivative_order());
  return m;
}

double CombinationProfile::tail_exponent() const {
  double e = std::numeric_limits<double>::infinity();
  for (auto& p : p_) e = std::min(e, p->tail_exponent());
  return e;
}

double CombinationProfile::center() const { return p_.front()->center(); }

double CombinationProfile::scale() const {
  double s = std::numeric_limits<double>::infinity();
  for (auto& p : p_) s = std::min(s, p->scale());
  return s;
}

std::pair<double, double> CombinationProfile::negligible_outside() const {
  double a = std::numeric_limits<double>::infinity(), b = -a;
  for (auto& p : p_) {
    auto [x, y] = p->negligible_outside();
    a = std::min(a, x);
    b = std::max(b, y);
  }
  return {a, b};
}

std::string CombinationProfile::describe() const {
  std::string s = "combination";
  for (std::size_t i = 0; i < p_.size(); ++i) s += " " + fmt_num(c_[i]) + "*[" + p_[i]->describe() + "]";
  return s;
}

DerivativeProfile::DerivativeProfile(ProfilePtr base, double coef) : base_(std::move(base)), coef_(coef) {
  if (!base_) throw DomainError("derivative: null base");
  if (base_->max_derivative_order() < 1) throw DomainError("derivative: base has no derivative");
}

Jet DerivativeProfile::jet(double q, int order) const {
  if (order > max_derivative_order()) throw DomainError("derivative: order beyond the base profile");
  return base_->jet(q, order + 1).differentiate() * coef_;
}

std::string DerivativeProfile::describe() const { return "derivative " + fmt_num(coef_) + "*[" + base_->describe() + "]"; }

MassStepDerivativeProfile::MassStepDerivativeProfile(double amplitude) : a_(amplitude) {}

Jet MassStepDerivativeProfile::jet(double q, int order) const {
  if (order >= Jet::kMaxOrder) throw DomainError("mass step derivative: order too high");
  return chi_e_cutoff().jet(q, order + 1).differentiate() * a_;
}

std::string MassStepDerivativeProfile::describe() const { return "mass-step-derivative A=" + fmt_num(a_); }

ProductProfile::ProductProfile(std::vector<Term> terms) : t_(std::move(terms)) {
  if (t_.empty()) throw DomainError("product: no terms");
  for (auto& t : t_)
    if (!t.a || !t.b) throw DomainError("product: null factor");
}

Jet ProductProfile::jet(double q, int order) const {
  std::vector<Jet> parts;
  parts.reserve(t_.size());
  for (auto& t : t_) {
    auto [a0, a1] = t.a->negligible_outside();
    auto [b0, b1] = t.b->negligible_outside();
    if (q < std::max(a0, b0) || q > std::min(a1, b1)) {
      parts.emplace_back(order, 0.0);
      continue;
    }
    parts.push_back(t.coef * (t.a->jet(q, order) * t.b->jet(q, order)));
  }
  while (parts.size() > 1) {
    std::vector<Jet> next;
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(parts[i] + parts[i + 1]);
    if (parts.size() % 2) next.push_back(parts.back());
    parts.swap(next);
  }
  return parts.front();
}

int ProductProfile::max_derivative_order() const {
  int m = Jet::kMaxOrder;
  for (auto& t : t_) m = std::min({m, t.a->max_derivative_order(), t.b->max_derivative_order()});
  return m;
}

double ProductProfile::tail_exponent() const {
  double e = std::numeric_limits<double>::infinity();
  for (auto& t : t_) e = std::min(e, t.a->tail_exponent() + t.b->tail_exponent());
  return e;
}

double ProductProfile::center() const {
  auto [a, b] = negligible_outside();
  if (std::isfinite(a) && std::isfinite(b)) return 0.5 * (a + b);
  return t_.front().a->center();
}

double ProductProfile::scale() const {
  double s = std::numeric_limits<double>::infinity();
  for (auto& t : t_) s = std::min({s, t.a->scale(), t.b->scale()});
  return s;
}

std::pair<double, double> ProductProfile::negligible_outside() const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (auto& t : t_) {
    auto [a0, a1] = t.a->negligible_outside();
    auto [b0, b1] = t.b->negligible_outside();
    const double x = std::max(a0, b0), y = std::min(a1, b1);
    if (x > y) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, y);
  }
  if (lo > hi) return {0.0, 0.0};
  return {lo, hi};
}

std::string ProductProfile::describe() const {
  std::string s = "product";
  for (auto& t : t_) s += " " + fmt_num(t.coef) + "*[" + t.a->describe() + "]*[" + t.b->describe() + "]";
  return s;
}

// ------------------------------------------------------------ descriptors

namespace {

double parse_number(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &pos);
  } catch (const std::exception&) {
    throw DomainError("profile: value of " + key + " is not a number: '" + v + "'");
  }
  if (pos != v.size()) throw DomainError("profile: trailing characters in " + key + "='" + v + "'");
  return x;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, item));
  return out;
}

}  // namespace

ProfileSpec parse_profile_spec(const std::string& text) {
  std::istringstream is(text);
  ProfileSpec s;
  if (!(is >> s.kind)) throw DomainError("profile: empty descriptor");
  if (s.kind == "polytail") s.kind = "poly-tail";
  if (s.kind == "bump") s.kind = "compact-bump";
  std::string tok;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw DomainError("profile: expected key=value, got '" + tok + "'");
    std::string k = tok.substr(0, eq), v = tok.substr(eq + 1);
    if (k == "A")
      s.amplitude = parse_number(k, v);
    else if (k == "w")
      s.width = parse_number(k, v);
    else if (k == "c")
      s.center = parse_number(k, v);
    else if (k == "p")
      s.exponent = parse_number(k, v);
    else if (k == "q")
      s.q = parse_list(k, v);
    else if (k == "f")
      s.values = parse_list(k, v);
    else
      throw DomainError("profile: unknown parameter '" + k + "' for kind " + s.kind);
  }
  return s;
}

ProfilePtr make_profile(const ProfileSpec& spec, double gamma) {
  if (spec.kind == "gaussian") return std::make_shared<GaussianProfile>(spec.amplitude, spec.width, spec.center);
  if (spec.kind == "poly-tail") {
    if (!(spec.exponent > gamma)) {
      std::ostringstream os;
      os << "poly-tail: decay exponent p=" << spec.exponent << " must exceed gamma=" << gamma
         << " (the weighted data norm diverges otherwise)";
      throw DomainError(os.str());
    }
    return std::make_shared<PolyTailProfile>(spec.amplitude, spec.exponent, spec.center, spec.width);
  }
  if (spec.kind == "compact-bump")
    return std::make_shared<CompactBumpProfile>(spec.amplitude, spec.width, spec.center);
  if (spec.kind == "sampled") {
    std::vector<double> f = spec.values;
    for (double& x : f) x *= spec.amplitude;
    return std::make_shared<SampledProfile>(spec.q, f);
  }
  throw DomainError("profile: unknown kind '" + spec.kind + "' (expected gaussian, poly-tail, compact-bump, sampled)");
}

}  // namespace radscat
