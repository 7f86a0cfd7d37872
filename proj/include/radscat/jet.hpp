#pragma once

#include <array>
#include <cassert>
#include <cmath>

namespace radscat {

// Truncated Taylor series c[0] + c[1] e + ... + c[n] e^n about a point.
// Arithmetic is exact up to the truncation order, which makes it a cheap way
// to get derivatives of closed-form profiles and cutoffs.
class Jet {
 public:
  static constexpr int kMaxOrder = 15;

  Jet() = default;
  explicit Jet(int order, double value = 0.0) : n_(order) {
    assert(order >= 0 && order <= kMaxOrder);
    c_[0] = value;
  }
  // The identity map x0 + e.
  static Jet variable(int order, double x0) {
    Jet j(order, x0);
    if (order >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return n_; }
  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }
  double value() const { return c_[0]; }

  // k-th derivative at the expansion point.
  double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f * c_[k];
  }

  // Jet of the derivative, one order lower.
  Jet differentiate() const {
    Jet d(n_ > 0 ? n_ - 1 : 0);
    for (int k = 0; k + 1 <= n_; ++k) d.c_[k] = (k + 1) * c_[k + 1];
    return d;
  }

  Jet truncated(int order) const {
    Jet t(order);
    for (int k = 0; k <= order && k <= n_; ++k) t.c_[k] = c_[k];
    return t;
  }

  Jet& operator+=(const Jet& o) {
    for (int k = 0; k <= n_; ++k) c_[k] += (k <= o.n_ ? o.c_[k] : 0.0);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int k = 0; k <= n_; ++k) c_[k] -= (k <= o.n_ ? o.c_[k] : 0.0);
    return *this;
  }
  Jet& operator*=(double a) {
    for (int k = 0; k <= n_; ++k) c_[k] *= a;
    return *this;
  }
  Jet& operator+=(double a) {
    c_[0] += a;
    return *this;
  }

 private:
  int n_ = 0;
  std::array<double, kMaxOrder + 1> c_{};
};

inline int common_order(const Jet& a, const Jet& b) {
  return a.order() < b.order() ? a.order() : b.order();
}

inline Jet operator+(Jet a, const Jet& b) {
  a = a.truncated(common_order(a, b));
  return a += b;
}
inline Jet operator-(Jet a, const Jet& b) {
  a = a.truncated(common_order(a, b));
  return a -= b;
}
inline Jet operator-(Jet a) { return a *= -1.0; }
inline Jet operator+(Jet a, double b) { return a += b; }
inline Jet operator+(double b, Jet a) { return a += b; }
inline Jet operator-(Jet a, double b) { return a += -b; }
inline Jet operator-(double b, Jet a) {
  a *= -1.0;
  return a += b;
}
inline Jet operator*(Jet a, double b) { return a *= b; }
inline Jet operator*(double b, Jet a) { return a *= b; }

inline Jet operator*(const Jet& a, const Jet& b) {
  const int n = common_order(a, b);
  Jet c(n);
  for (int k = 0; k <= n; ++k) {
    double s = 0.0;
    for (int i = 0; i <= k; ++i) s += a[i] * b[k - i];
    c[k] = s;
  }
  return c;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  const int n = common_order(a, b);
  Jet c(n);
  for (int k = 0; k <= n; ++k) {
    double s = a[k];
    for (int i = 1; i <= k; ++i) s -= b[i] * c[k - i];
    c[k] = s / b[0];
  }
  return c;
}

inline Jet operator/(double a, const Jet& b) { return Jet(b.order(), a) / b; }
inline Jet operator/(Jet a, double b) { return a *= 1.0 / b; }

inline Jet exp(const Jet& a) {
  const int n = a.order();
  Jet e(n, std::exp(a[0]));
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += i * a[i] * e[k - i];
    e[k] = s / k;
  }
  return e;
}

inline Jet log(const Jet& a) {
  const int n = a.order();
  Jet l(n, std::log(a[0]));
  for (int k = 1; k <= n; ++k) {
    double s = a[k];
    for (int i = 1; i < k; ++i) s -= (static_cast<double>(i) / k) * l[i] * a[k - i];
    l[k] = s / a[0];
  }
  return l;
}

// a^p for a[0] > 0.
inline Jet pow(const Jet& a, double p) {
  const int n = a.order();
  Jet y(n, std::pow(a[0], p));
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += (p * i - (k - i)) * a[i] * y[k - i];
    y[k] = s / (k * a[0]);
  }
  return y;
}

inline Jet sqrt(const Jet& a) { return pow(a, 0.5); }

// Japanese bracket <x> = sqrt(1 + x^2).
inline Jet bracket(const Jet& x) { return sqrt(1.0 + x * x); }

inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

// Values of (<q> d/dq)^k F at the expansion point for k = 0..order(F).
// F must be a jet in q about q0.
template <class Out>
void weighted_derivatives(const Jet& f, double q0, Out&& out) {
  Jet g = f;
  const Jet w = bracket(Jet::variable(f.order(), q0));
  out(0, g[0]);
  for (int k = 1; k <= f.order(); ++k) {
    g = w.truncated(g.order() - 1) * g.differentiate();
    out(k, g[0]);
  }
}

}  // namespace radscat
