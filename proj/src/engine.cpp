#include "radscat/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radscat/error.hpp"
#include "radscat/parallel.hpp"

namespace radscat {

RadialGrid::RadialGrid(double h_, int J_) : h(h_), J(J_) {
  if (!(h_ > 0.0) || J_ < 2) throw DomainError("RadialGrid: need h > 0 and J >= 2");
}

RadialGrid RadialGrid::for_run(double h, double T, double t0, int margin_cells) {
  const double R = 2.0 * T + (T - t0);
  return RadialGrid(h, static_cast<int>(std::ceil(R / h)) + margin_cells);
}

FieldState FieldState::zeros(const RadialGrid& g, std::vector<ModeKey> keys, double t) {
  FieldState s;
  s.t = t;
  s.grid = g;
  s.keys = std::move(keys);
  s.u.assign(s.keys.size(), std::vector<double>(g.J + 1, 0.0));
  s.v = s.u;
  return s;
}

int FieldState::find(int field, int l, int m) const {
  for (int i = 0; i < entries(); ++i)
    if (keys[i].field == field && keys[i].l == l && keys[i].m == m) return i;
  return -1;
}

double FieldState::ur(int i, int j) const {
  const auto& a = u[i];
  const double h = grid.h;
  if (j == 0) return (keys[i].l % 2 == 0) ? a[1] / h : 0.0;
  if (j == grid.J) return (a[j] - a[j - 1]) / h;
  return (a[j + 1] - a[j - 1]) / (2.0 * h);
}

double FieldState::u_over_r(int i, int j) const {
  if (j == 0) return ur(i, 0);
  return u[i][j] / grid.r(j);
}

namespace {

struct Buffers {
  std::vector<std::vector<double>> u, v;
};

void resize_like(Buffers& b, const FieldState& s) {
  b.u.assign(s.u.size(), std::vector<double>(s.grid.J + 1, 0.0));
  b.v = b.u;
}

void sample_cone(const FieldState& s, ConeTrack& c) {
  const double rc = s.t - c.c;
  const double h = s.grid.h;
  if (rc < 0.0 || rc > s.grid.r_max()) return;
  int j = std::min(static_cast<int>(std::floor(rc / h)), s.grid.J - 1);
  const double th = rc / h - j;
  double A = 0.0, B = 0.0, C = 0.0;
  for (int i = 0; i < s.entries(); ++i) {
    if (c.field >= 0 && s.keys[i].field != c.field) continue;
    const double lam = s.keys[i].l * (s.keys[i].l + 1.0);
    auto lerp = [&](double a, double b) { return (1.0 - th) * a + th * b; };
    const double v = lerp(s.v[i][j], s.v[i][j + 1]);
    const double ur = lerp(s.ur(i, j), s.ur(i, j + 1));
    const double uor = lerp(s.u_over_r(i, j), s.u_over_r(i, j + 1));
    A += (v + ur) * (v + ur);
    B += lam * uor * uor;
    C += (v + ur - uor) * (v + ur - uor);
  }
  c.t.push_back(s.t);
  c.Lsq.push_back(A);
  c.angsq.push_back(B);
  c.Lphisq.push_back(C);
}

void check_containment(const FieldState& s, double tol) {
  double gmax = 0.0, edge = 0.0;
  const int J = s.grid.J;
  for (int i = 0; i < s.entries(); ++i) {
    for (int j = 0; j <= J; ++j) {
      const double a = std::abs(s.u[i][j]);
      gmax = std::max(gmax, a);
      if (j >= J - 10) edge = std::max(edge, a);
    }
  }
  if (gmax > 0.0 && edge > tol * gmax) {
    std::ostringstream os;
    os << "containment breach at t=" << s.t << ": |u| near R_max=" << s.grid.r_max() << " is " << edge
       << " (relative " << edge / gmax << ")";
    throw ContainmentError(os.str());
  }
}

}  // namespace

Trajectory evolve(const FieldState& data, const SourceFn& source, double t_end, const SolveOptions& opt) {
  const RadialGrid g = data.grid;
  const int J = g.J, n_ent = data.entries();
  const double h = g.h;
  if (static_cast<int>(data.u.size()) != n_ent || static_cast<int>(data.v.size()) != n_ent)
    throw DomainError("evolve: state arrays do not match mode keys");
  for (int i = 0; i < n_ent; ++i)
    if (static_cast<int>(data.u[i].size()) != J + 1 || static_cast<int>(data.v[i].size()) != J + 1)
      throw DomainError("evolve: state arrays do not match the grid");
  if (!(opt.dt > 0.0)) throw DomainError("evolve: dt must be positive");

  const double span = t_end - data.t;
  const int steps = span == 0.0 ? 0 : static_cast<int>(std::ceil(std::abs(span) / opt.dt - 1e-9));
  const double dt = steps ? span / steps : 0.0;
  int lmax = 0;
  for (auto& k : data.keys) lmax = std::max(lmax, k.l);
  const double cfl = std::abs(dt) * std::sqrt(4.0 + lmax * (lmax + 1.0)) / h;
  if (cfl > opt.cfl_limit || std::abs(dt) > 0.5 * h * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step " << std::abs(dt) << " violates the stability limit for h=" << h << ", l_max=" << lmax
       << " (need dt <= 0.5 h and dt sqrt(4+l(l+1))/h <= " << opt.cfl_limit << ")";
    throw CflError(os.str());
  }

  Trajectory tr;
  tr.dt = dt;
  tr.steps = steps;
  tr.cones = opt.cones;
  for (auto& c : tr.cones) {
    c.t.clear();
    c.Lsq.clear();
    c.angsq.clear();
    c.Lphisq.clear();
  }

  std::vector<char> record(steps + 1, opt.record_every_step ? 1 : 0);
  for (double tau : opt.record_times) {
    if (steps == 0) {
      record[0] = 1;
      continue;
    }
    const double k = (tau - data.t) / dt;
    const long kk = std::lround(k);
    if (kk < 0 || kk > steps) {
      std::ostringstream os;
      os << "evolve: record time " << tau << " outside [" << std::min(data.t, t_end) << ", "
         << std::max(data.t, t_end) << "]";
      throw DomainError(os.str());
    }
    record[kk] = 1;
  }

  std::vector<std::vector<double>> S(n_ent, std::vector<double>(J + 1, 0.0));
  std::vector<double> lam(n_ent);
  for (int i = 0; i < n_ent; ++i) lam[i] = data.keys[i].l * (data.keys[i].l + 1.0);
  std::vector<double> inv_r2(J + 1, 0.0);
  for (int j = 1; j <= J; ++j) inv_r2[j] = 1.0 / (g.r(j) * g.r(j));
  const double ih2 = 1.0 / (h * h);

  auto eval_source = [&](const FieldState& st) {
    for (auto& row : S) std::fill(row.begin(), row.end(), 0.0);
    if (source) source(st, S);
  };
  // k = f(stage)
  auto rhs = [&](const FieldState& st, Buffers& k) {
    eval_source(st);
    parallel_for(n_ent, [&](int i) {
      const auto& u = st.u[i];
      const auto& v = st.v[i];
      auto& du = k.u[i];
      auto& dv = k.v[i];
      du[0] = dv[0] = du[J] = dv[J] = 0.0;
      const auto& Si = S[i];
      for (int j = 1; j < J; ++j) {
        du[j] = v[j];
        dv[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) * ih2 - lam[i] * u[j] * inv_r2[j] - g.r(j) * Si[j];
      }
    });
  };

  FieldState y = data;
  for (int i = 0; i < n_ent; ++i) {
    y.u[i][0] = y.u[i][J] = 0.0;
    y.v[i][0] = y.v[i][J] = 0.0;
  }
  FieldState stage = y;
  Buffers k1, k2, k3, k4;
  resize_like(k1, y);
  resize_like(k2, y);
  resize_like(k3, y);
  resize_like(k4, y);

  auto on_step = [&](int n) {
    for (auto& c : tr.cones) sample_cone(y, c);
    if (opt.record_origin) {
      tr.origin_t.push_back(y.t);
      std::vector<double> o(n_ent);
      for (int i = 0; i < n_ent; ++i) o[i] = y.ur(i, 0);
      tr.origin_ur.push_back(std::move(o));
    }
    if (record[n]) {
      tr.states.push_back(y);
      if (opt.record_sources) {
        eval_source(y);
        tr.sources.push_back(S);
      }
    }
    if (opt.check_containment && (record[n] || n % 64 == 0 || n == steps)) check_containment(y, opt.containment_tol);
    if (opt.observer) opt.observer(y);
  };

  auto combine = [&](const FieldState& base, const Buffers& k, double a, FieldState& out) {
    parallel_for(n_ent, [&](int i) {
      for (int j = 0; j <= J; ++j) {
        out.u[i][j] = base.u[i][j] + a * k.u[i][j];
        out.v[i][j] = base.v[i][j] + a * k.v[i][j];
      }
    });
  };

  const double t_start = data.t;
  on_step(0);
  for (int n = 0; n < steps; ++n) {
    const double t = t_start + n * dt;
    y.t = t;
    rhs(y, k1);
    stage.t = t + 0.5 * dt;
    combine(y, k1, 0.5 * dt, stage);
    rhs(stage, k2);
    combine(y, k2, 0.5 * dt, stage);
    rhs(stage, k3);
    stage.t = t + dt;
    combine(y, k3, dt, stage);
    rhs(stage, k4);
    parallel_for(n_ent, [&](int i) {
      for (int j = 0; j <= J; ++j) {
        y.u[i][j] += dt / 6.0 * (k1.u[i][j] + 2.0 * k2.u[i][j] + 2.0 * k3.u[i][j] + k4.u[i][j]);
        y.v[i][j] += dt / 6.0 * (k1.v[i][j] + 2.0 * k2.v[i][j] + 2.0 * k3.v[i][j] + k4.v[i][j]);
      }
    });
    y.t = (n + 1 == steps) ? t_end : t_start + (n + 1) * dt;
    on_step(n + 1);
  }
  return tr;
}

Trajectory solve_backward(const FieldState& data_at_T, const SourceFn& source, double t0, const SolveOptions& opt) {
  if (!(t0 < data_at_T.t)) throw DomainError("solve_backward: need t0 < T");
  return evolve(data_at_T, source, t0, opt);
}

std::vector<double> discrete_box(const std::vector<double>& up, const std::vector<double>& um,
                                 const std::vector<double>& un, double dt, const RadialGrid& g, int l) {
  const int J = g.J;
  if (static_cast<int>(up.size()) != J + 1 || static_cast<int>(um.size()) != J + 1 ||
      static_cast<int>(un.size()) != J + 1)
    throw DomainError("discrete_box: slices do not match the grid");
  std::vector<double> res(J + 1, 0.0);
  const double lam = l * (l + 1.0), ih2 = 1.0 / (g.h * g.h), idt2 = 1.0 / (dt * dt);
  for (int j = 1; j < J; ++j) {
    const double r = g.r(j);
    res[j] = -(un[j] - 2.0 * um[j] + up[j]) * idt2 + (um[j + 1] - 2.0 * um[j] + um[j - 1]) * ih2 - lam * um[j] / (r * r);
  }
  return res;
}

std::vector<double> discrete_box(const std::vector<double>& u, const std::vector<double>& utt, const RadialGrid& g,
                                 int l) {
  const int J = g.J;
  if (static_cast<int>(u.size()) != J + 1 || static_cast<int>(utt.size()) != J + 1)
    throw DomainError("discrete_box: slices do not match the grid");
  std::vector<double> res(J + 1, 0.0);
  const double lam = l * (l + 1.0), ih2 = 1.0 / (g.h * g.h);
  for (int j = 1; j < J; ++j) {
    const double r = g.r(j);
    res[j] = -utt[j] + (u[j + 1] - 2.0 * u[j] + u[j - 1]) * ih2 - lam * u[j] / (r * r);
  }
  return res;
}

OrderEstimate convergence_order(double e0, double e1, double e2) {
  OrderEstimate o;
  e0 = std::abs(e0);
  e1 = std::abs(e1);
  e2 = std::abs(e2);
  if (!(e0 > 0 && e1 > 0 && e2 > 0)) {
    o.order = 0.0;
    o.monotone = false;
    o.warning = "nonpositive error";
    return o;
  }
  if (!(e1 < e0 && e2 < e1)) {
    o.monotone = false;
    o.warning = "errors do not decrease monotonically";
  }
  o.order = 0.5 * std::log2(e0 / e2);
  return o;
}

OrderEstimate richardson_order(double f0, double f1, double f2) {
  OrderEstimate o;
  const double d0 = std::abs(f0 - f1), d1 = std::abs(f1 - f2);
  if (!(d0 > 0 && d1 > 0)) {
    o.monotone = false;
    o.warning = "successive differences vanish";
    return o;
  }
  if (!(d1 < d0)) {
    o.monotone = false;
    o.warning = "successive differences do not decrease";
  }
  o.order = std::log2(d0 / d1);
  return o;
}

}  // namespace radscat
