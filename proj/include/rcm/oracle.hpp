#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/conjugacy.hpp"
#include "rcm/errors.hpp"
#include "rcm/expansion.hpp"
#include "rcm/hierarchy.hpp"
#include "rcm/linalg.hpp"
#include "rcm/noise_paths.hpp"
#include "rcm/noise_window.hpp"
#include "rcm/system_model.hpp"

namespace rcm {

template <int N, int M>
struct OracleResult {
  Vec<N> xi;  // original coordinates (equal to xi_tilde when built from tilde input)
  Vec<N> xi_tilde;
  double eps = 0.0;
  Vec<M> tilde_H;
  Vec<M> H;
  int iterations = 0;
  double residual = 0.0;
  std::vector<Vec<N>> X;  // on the window nodes, local time (k - steps) h
  std::vector<Vec<M>> Y;
};

namespace detail {

template <int N, int M>
struct PicardState {
  std::vector<Vec<N>> X;
  std::vector<Vec<M>> Y;
};

// One application of the Lyapunov-Perron map to (X, Y) on the window.
template <int N, int M>
PicardState<N, M> lp_sweep(const CenterStableSpec<N, M>& spec, const NoiseWindow& nw, double eps,
                           const Vec<N>& xi_tilde, const PicardState<N, M>& in, const Mat<N, N>& back,
                           const Mat<M, M>& fwd) {
  const std::size_t steps = nw.steps;
  const double h = nw.h;
  std::vector<Vec<N>> Fc(steps + 1);
  std::vector<Vec<M>> Fs(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    auto [fc, fs] = transformed_nonlinearity_at(spec, eps, nw.z1[2 * k], nw.z2[2 * k], in.X[k], in.Y[k]);
    Fc[k] = std::move(fc);
    Fs[k] = std::move(fs);
  }
  PicardState<N, M> out{std::vector<Vec<N>>(steps + 1), std::vector<Vec<M>>(steps + 1)};
  out.X[steps] = xi_tilde;
  for (std::size_t k = steps; k-- > 0;) {
    const Mat<N, N> phi = std::exp(-eps * (nw.J1[k + 1] - nw.J1[k])) * back;
    out.X[k] = phi * out.X[k + 1] - (0.5 * h) * (Fc[k] + phi * Fc[k + 1]);
  }
  out.Y[0] = spec.zero_y();
  for (std::size_t k = 0; k < steps; ++k) {
    const Mat<M, M> psi = std::exp(eps * (nw.J2[k + 1] - nw.J2[k])) * fwd;
    out.Y[k + 1] = psi * (out.Y[k] + (0.5 * h) * Fs[k]) + (0.5 * h) * Fs[k + 1];
  }
  return out;
}

template <int N, int M>
double lp_gap(const PicardState<N, M>& a, const PicardState<N, M>& b, const std::vector<double>& w) {
  double gx = 0.0;
  double gy = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    gx = std::max(gx, w[k] * (a.X[k] - b.X[k]).norm());
    gy = std::max(gy, w[k] * (a.Y[k] - b.Y[k]).norm());
  }
  return gx + gy;
}

}  // namespace detail

// Full Lyapunov-Perron fixed point of the random ODE on the history window:
//   X(t) = U_c(t, 0) xi~ - int_t^0 U_c(t, s) F^c(s) ds,
//   Y(t) = int_{-T}^t U_s(t, s) F^s(s) ds,
// with U(t, s) = e^{A (t - s) + eps int_s^t z}. Both integrals use the
// trapezoid rule with the exact cell propagators. Y(0) is H~^eps(xi~). The
// reported residual is the weighted size of one further sweep.
template <int N, int M>
OracleResult<N, M> solve_rde_manifold(const CenterStableSpec<N, M>& spec, const NoiseWindow& nw, double eps,
                                      const Vec<N>& xi_tilde, const ExpansionConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (!(eps >= 0.0)) throw ConfigError("solve_rde_manifold: eps must be >= 0");
  if (xi_tilde.size() != spec.n()) throw ConfigError("solve_rde_manifold: xi has wrong dimension");
  const std::size_t steps = nw.steps;
  const Mat<N, N> back = expm((-spec.A_c * nw.h).eval());
  const Mat<M, M> fwd = expm((spec.A_s * nw.h).eval());
  const auto w = detail::history_weights(steps, nw.h, cfg.eta);

  detail::PicardState<N, M> cur{std::vector<Vec<N>>(steps + 1, xi_tilde),
                                std::vector<Vec<M>>(steps + 1, spec.zero_y())};
  detail::SweepMonitor monitor("Lyapunov-Perron oracle", cfg);
  while (true) {
    detail::PicardState<N, M> next = detail::lp_sweep(spec, nw, eps, xi_tilde, cur, back, fwd);
    const double gap = detail::lp_gap(next, cur, w);
    detail::damp(cur.X, next.X, cfg.fp_damping);
    detail::damp(cur.Y, next.Y, cfg.fp_damping);
    if (monitor.record(gap)) break;
  }
  const detail::PicardState<N, M> check = detail::lp_sweep(spec, nw, eps, xi_tilde, cur, back, fwd);

  OracleResult<N, M> r;
  r.xi = xi_tilde;
  r.xi_tilde = xi_tilde;
  r.eps = eps;
  r.tilde_H = cur.Y[steps];
  r.H = r.tilde_H;
  r.iterations = monitor.iterations();
  r.residual = detail::lp_gap(check, cur, w);
  r.X = std::move(cur.X);
  r.Y = std::move(cur.Y);
  return r;
}

// Oracle at the path anchor t = 0.
template <int N, int M>
OracleResult<N, M> solve_rde_manifold(const CenterStableSpec<N, M>& spec, const OUPath& ou1, const OUPath& ou2,
                                      double eps, const Vec<N>& xi_tilde, const ExpansionConfig& cfg) {
  return solve_rde_manifold(spec, NoiseWindow::at_origin(ou1, ou2, cfg.window_steps()), eps, xi_tilde, cfg);
}

// H^eps(xi) = e^{eps z2} H~^eps(e^{-eps z1} xi): fills xi, xi_tilde and H of
// an oracle result solved at xi_tilde = e^{-eps z1} xi.
template <int N, int M>
Vec<M> manifold_original(OracleResult<N, M>& r, const ConjugacyContext& ctx) {
  ctx.validate();
  r.xi = std::exp(ctx.eps * ctx.z1_at_0) * r.xi_tilde;
  r.H = std::exp(ctx.eps * ctx.z2_at_0) * r.tilde_H;
  return r.H;
}

// Oracle value of the manifold in the original coordinates at xi.
template <int N, int M>
OracleResult<N, M> oracle_at(const CenterStableSpec<N, M>& spec, const OUPath& ou1, const OUPath& ou2, double eps,
                             const Vec<N>& xi, const ExpansionConfig& cfg) {
  const ConjugacyContext ctx{eps, ou1.at_zero(), ou2.at_zero(), false};
  const Vec<N> xt = std::exp(-eps * ctx.z1_at_0) * xi;
  OracleResult<N, M> r = solve_rde_manifold(spec, ou1, ou2, eps, xt, cfg);
  manifold_original(r, ctx);
  return r;
}

// ---------------------------------------------------------------------------
// Forward simulation

template <int N, int M>
struct Trajectory {
  std::vector<double> t;
  std::vector<Vec<N>> X;
  std::vector<Vec<M>> Y;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> forward_span(const TimeGrid& g, double t0, double t1) {
  if (!(t1 >= t0)) throw ConfigError("simulation: need t_end >= t_start");
  if (!g.contains(t0) || !g.contains(t1)) throw RangeError("simulation: paths do not cover the time span");
  return {g.node_of(t0), g.node_of(t1)};
}

template <int N, int M>
void check_blowup(const Vec<N>& x, const Vec<M>& y, double t) {
  const double size = std::max(x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff());
  if (!(size <= 1e6)) {
    std::ostringstream os;
    os << "trajectory left the ball of radius 1e6 at t = " << t;
    throw InstabilityError(os.str());
  }
}

}  // namespace detail

// Classical RK4 for X' = A_c X + eps z1 X + F^c, Y' = A_s Y + eps z2 Y + F^s
// on the path nodes from t_start to t_end, z linear between nodes.
template <int N, int M>
Trajectory<N, M> simulate_rde(const CenterStableSpec<N, M>& spec, const OUPath& ou1, const OUPath& ou2, double eps,
                              const Vec<N>& X0, const Vec<M>& Y0, double t_end, double t_start = 0.0) {
  const TimeGrid& g = ou1.grid;
  const auto [first, last] = detail::forward_span(g, t_start, t_end);
  const double h = g.step();
  auto rhs = [&](double z1, double z2, const Vec<N>& X, const Vec<M>& Y) {
    auto [fc, fs] = transformed_nonlinearity_at(spec, eps, z1, z2, X, Y);
    return std::pair<Vec<N>, Vec<M>>{spec.A_c * X + (eps * z1) * X + fc, spec.A_s * Y + (eps * z2) * Y + fs};
  };
  Trajectory<N, M> tr;
  tr.t.push_back(g.time(first));
  tr.X.push_back(X0);
  tr.Y.push_back(Y0);
  for (std::size_t k = first; k < last; ++k) {
    const Vec<N> x = tr.X.back();
    const Vec<M> y = tr.Y.back();
    const double a1 = ou1.z[k], b1 = ou1.z[k + 1], m1 = 0.5 * (a1 + b1);
    const double a2 = ou2.z[k], b2 = ou2.z[k + 1], m2 = 0.5 * (a2 + b2);
    const auto [kx1, ky1] = rhs(a1, a2, x, y);
    const auto [kx2, ky2] = rhs(m1, m2, (x + 0.5 * h * kx1).eval(), (y + 0.5 * h * ky1).eval());
    const auto [kx3, ky3] = rhs(m1, m2, (x + 0.5 * h * kx2).eval(), (y + 0.5 * h * ky2).eval());
    const auto [kx4, ky4] = rhs(b1, b2, (x + h * kx3).eval(), (y + h * ky3).eval());
    tr.X.push_back(x + (h / 6.0) * (kx1 + 2.0 * kx2 + 2.0 * kx3 + kx4));
    tr.Y.push_back(y + (h / 6.0) * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4));
    tr.t.push_back(g.time(k + 1));
    detail::check_blowup<N, M>(tr.X.back(), tr.Y.back(), tr.t.back());
  }
  return tr;
}

// Heun predictor-corrector for the Stratonovich system
//   dx = (A_c x + f_c) dt + eps x o dW1,  dy = (A_s y + f_s) dt + eps y o dW2.
template <int N, int M>
Trajectory<N, M> simulate_sde_stratonovich(const CenterStableSpec<N, M>& spec, const WienerPath& w1,
                                           const WienerPath& w2, double eps, const Vec<N>& x0, const Vec<M>& y0,
                                           double t_end, double t_start = 0.0) {
  const TimeGrid& g = w1.grid;
  if (w2.grid.size() != g.size() || w2.grid.step() != g.step()) {
    throw ConfigError("simulate_sde_stratonovich: Wiener paths on different grids");
  }
  const auto [first, last] = detail::forward_span(g, t_start, t_end);
  const double h = g.step();
  auto drift = [&](const Vec<N>& x, const Vec<M>& y) {
    return std::pair<Vec<N>, Vec<M>>{spec.A_c * x + spec.f_c.value(x, y), spec.A_s * y + spec.f_s.value(x, y)};
  };
  Trajectory<N, M> tr;
  tr.t.push_back(g.time(first));
  tr.X.push_back(x0);
  tr.Y.push_back(y0);
  for (std::size_t k = first; k < last; ++k) {
    const Vec<N> x = tr.X.back();
    const Vec<M> y = tr.Y.back();
    const double d1 = eps * w1.increments[k];
    const double d2 = eps * w2.increments[k];
    const auto [ax, ay] = drift(x, y);
    const Vec<N> xp = x + h * ax + d1 * x;
    const Vec<M> yp = y + h * ay + d2 * y;
    const auto [bx, by] = drift(xp, yp);
    tr.X.push_back(x + (0.5 * h) * (ax + bx) + (0.5 * d1) * (x + xp));
    tr.Y.push_back(y + (0.5 * h) * (ay + by) + (0.5 * d2) * (y + yp));
    tr.t.push_back(g.time(k + 1));
    detail::check_blowup<N, M>(tr.X.back(), tr.Y.back(), tr.t.back());
  }
  return tr;
}

// sup_t |e^{-eps z1(t)} x(t) - X(t)| + |e^{-eps z2(t)} y(t) - Y(t)| between an
// SDE run and the RDE run started at the transformed initial state.
template <int N, int M>
double conjugacy_gap(const Trajectory<N, M>& sde, const Trajectory<N, M>& rde, const OUPath& ou1,
                     const OUPath& ou2, double eps) {
  if (sde.t.size() != rde.t.size()) throw ConfigError("conjugacy_gap: trajectories of different length");
  double gap = 0.0;
  for (std::size_t i = 0; i < sde.t.size(); ++i) {
    const std::size_t k = ou1.grid.node_of(sde.t[i]);
    const Vec<N> Xs = std::exp(-eps * ou1.z[k]) * sde.X[i];
    const Vec<M> Ys = std::exp(-eps * ou2.z[k]) * sde.Y[i];
    gap = std::max(gap, (Xs - rde.X[i]).norm() + (Ys - rde.Y[i]).norm());
  }
  return gap;
}

// ---------------------------------------------------------------------------
// Invariance

// Manifold graph in the transformed coordinates seen from the anchor node of
// the master paths: (anchor_node, X) -> H~(theta_t omega, X).
template <int N, int M>
using ManifoldEvaluator = std::function<Vec<M>(std::size_t, const Vec<N>&)>;

template <int N, int M>
ManifoldEvaluator<N, M> oracle_evaluator(const CenterStableSpec<N, M>& spec, const OUPath& ou1, const OUPath& ou2,
                                         double eps, const ExpansionConfig& cfg) {
  return [&spec, &ou1, &ou2, eps, cfg](std::size_t anchor, const Vec<N>& X) -> Vec<M> {
    const NoiseWindow nw = NoiseWindow::from_paths(ou1, ou2, anchor, cfg.window_steps());
    return solve_rde_manifold(spec, nw, eps, X, cfg).tilde_H;
  };
}

// H~d(X) + eps H~1 + eps^2 H~2 with the hierarchy re-solved at X on the
// re-anchored window.
template <int N, int M>
ManifoldEvaluator<N, M> expansion_evaluator(const CenterStableSpec<N, M>& spec, const OUPath& ou1,
                                            const OUPath& ou2, double eps, const DeterministicManifold<N, M>& Hd,
                                            const ExpansionConfig& cfg, int order = 2) {
  return [&spec, &ou1, &ou2, &Hd, eps, cfg, order](std::size_t anchor, const Vec<N>& X) -> Vec<M> {
    const NoiseWindow nw = NoiseWindow::from_paths(ou1, ou2, anchor, cfg.window_steps());
    Vec<M> out = Hd(X);
    if (order == 0) return out;
    HierarchySolution<N, M> s = solve_order0(spec, X, Hd, cfg);
    solve_order1(spec, s, nw, cfg);
    out += eps * tilde_H1(spec, s, nw);
    if (order == 1) return out;
    solve_order2(spec, s, nw, cfg);
    out += (eps * eps) * tilde_H2(spec, s, nw);
    return out;
  };
}

struct InvarianceSample {
  double t = 0.0;
  double defect = 0.0;
};

struct InvarianceReport {
  double sup_defect = 0.0;
  std::vector<InvarianceSample> samples;
};

// Starts the random ODE on the graph at (xi~, H~(omega, xi~)) and records
// |Y(t) - H~(theta_t omega, X(t))| every `sample_every` time units up to the
// horizon.
template <int N, int M>
InvarianceReport invariance_defect(const CenterStableSpec<N, M>& spec, const OUPath& ou1, const OUPath& ou2,
                                   double eps, const Vec<N>& xi_tilde, double horizon, double sample_every,
                                   const ManifoldEvaluator<N, M>& evaluator) {
  const TimeGrid& g = ou1.grid;
  if (!(horizon > 0.0) || !(sample_every > 0.0)) throw ConfigError("invariance_defect: need horizon, spacing > 0");
  if (!g.contains(horizon)) throw RangeError("invariance_defect: horizon exceeds the path coverage");
  const auto stride = static_cast<std::size_t>(std::llround(sample_every / g.step()));
  if (stride == 0) throw ConfigError("invariance_defect: sample spacing below the path step");
  const std::size_t zero = g.zero_index();
  const Vec<M> Y0 = evaluator(zero, xi_tilde);
  const Trajectory<N, M> tr = simulate_rde(spec, ou1, ou2, eps, xi_tilde, Y0, horizon);
  InvarianceReport rep;
  for (std::size_t i = stride; i < tr.t.size(); i += stride) {
    const double d = (tr.Y[i] - evaluator(zero + i, tr.X[i])).norm();
    rep.samples.push_back({tr.t[i], d});
    rep.sup_defect = std::max(rep.sup_defect, d);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence order

// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need >= 2 matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw RangeError("loglog_slope: values must be positive");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw RangeError("loglog_slope: abscissae coincide");
  return (n * sxy - sx * sy) / denom;
}

struct OrderRow {
  double eps = 0.0;
  double err_full = 0.0;
  double err_order1 = 0.0;
};

struct OrderStudy {
  std::vector<OrderRow> rows;
  double slope_full = 0.0;
  double slope_order1 = 0.0;
  std::vector<double> dropped;        // eps values where the oracle diverged
  std::vector<std::string> warnings;  // one line per dropped value
};

// Oracle-versus-expansion errors at a fixed xi and path. Values where the
// oracle diverges are dropped with a warning; at least three positive eps
// must survive for the slope fits. An eps = 0 row is kept but not fitted.
template <int N, int M>
OrderStudy convergence_order(const CenterStableSpec<N, M>& spec, const OUPath& ou1, const OUPath& ou2,
                             const ManifoldExpansion<N, M>& e, const Vec<N>& xi, const std::vector<double>& eps_list,
                             const ExpansionConfig& cfg) {
  if (eps_list.size() < 3) throw ConfigError("convergence_order: need at least 3 eps values");
  OrderStudy st;
  std::vector<double> fe, ff, f1;
  for (double eps : eps_list) {
    OracleResult<N, M> r;
    try {
      r = oracle_at(spec, ou1, ou2, eps, xi, cfg);
    } catch (const DivergenceError& err) {
      st.dropped.push_back(eps);
      std::ostringstream os;
      os.precision(17);
      os << "oracle diverged at eps = " << eps << ": " << err.what();
      st.warnings.push_back(os.str());
      continue;
    }
    OrderRow row{eps, (r.H - evaluate_expansion(e, xi, eps, 2)).norm(),
                 (r.H - evaluate_expansion(e, xi, eps, 1)).norm()};
    st.rows.push_back(row);
    if (eps > 0.0) {
      fe.push_back(eps);
      ff.push_back(row.err_full);
      f1.push_back(row.err_order1);
    }
  }
  if (fe.size() < 3) {
    throw DivergenceError("convergence_order: fewer than 3 eps values survived the oracle", 0.0, 0);
  }
  st.slope_full = loglog_slope(fe, ff);
  st.slope_order1 = loglog_slope(fe, f1);
  return st;
}

inline void write_order_study(std::ostream& os, const OrderStudy& st) {
  const auto old_precision = os.precision(17);
  os << "eps err_full err_order1\n";
  for (const auto& r : st.rows) os << r.eps << ' ' << r.err_full << ' ' << r.err_order1 << '\n';
  os.precision(old_precision);
}

}  // namespace rcm
