#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <algorithm>
#include <utility>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/linalg.hpp"
#include "rcm/noise_window.hpp"
#include "rcm/system_model.hpp"
#include "rcm/xi_grid.hpp"

namespace rcm {

namespace detail {

// Tracks a fixed-point sweep: convergence at tol, divergence after three
// consecutive increases of the update size or when the budget runs out.
class SweepMonitor {
 public:
  SweepMonitor(std::string what, const ExpansionConfig& cfg) : what_(std::move(what)), cfg_(cfg) {}

  // Returns true once converged.
  bool record(double change) {
    ++iterations_;
    if (!std::isfinite(change)) fail("non-finite update");
    if (change <= cfg_.fp_tol) {
      residual_ = change;
      return true;
    }
    growth_ = (change > last_) ? growth_ + 1 : 0;
    last_ = change;
    if (growth_ >= 3) fail("update grew for 3 consecutive sweeps");
    if (iterations_ >= cfg_.fp_max_iters) fail("iteration budget exhausted");
    return false;
  }

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  [[noreturn]] void fail(const char* why) const {
    std::ostringstream os;
    os << what_ << ": fixed point did not converge (" << why << ", last update " << last_ << " after "
       << iterations_ << " sweeps); check the gap condition margin 4 K L_f / (beta - gamma) < 1 or "
       << "reduce the cutoff radius / noise intensity";
    throw DivergenceError(os.str(), last_, iterations_);
  }

  std::string what_;
  const ExpansionConfig& cfg_;
  int iterations_ = 0;
  int growth_ = 0;
  double last_ = std::numeric_limits<double>::infinity();
  double residual_ = 0.0;
};

inline std::vector<double> history_weights(std::size_t steps, double h, double eta) {
  std::vector<double> w(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    w[k] = std::exp(eta * (static_cast<double>(k) - static_cast<double>(steps)) * h);
  }
  return w;
}

// sup_k w_k |a_k - b_k| over nodes of half-grid fields.
template <typename V>
double weighted_node_gap(const std::vector<V>& a, const std::vector<V>& b, const std::vector<double>& w) {
  double gap = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) gap = std::max(gap, w[k] * (a[2 * k] - b[2 * k]).norm());
  return gap;
}

template <typename V>
V hermite_midpoint(const V& a, const V& b, const V& da, const V& db, double h) {
  return 0.5 * (a + b) + (h / 8.0) * (da - db);
}

// Classical RK4 from node `steps` (t = 0) down to node 0 with step -h.
// rhs(j, x) is the vector field at half-grid index j. Returns the solution on
// the half grid; midpoints are filled by cubic Hermite interpolation.
template <typename V, typename Rhs>
std::vector<V> integrate_backward(const V& end_value, std::size_t steps, double h, const Rhs& rhs) {
  std::vector<V> half(2 * steps + 1, end_value);
  for (std::size_t k = steps; k-- > 0;) {
    const V& x = half[2 * k + 2];
    const V k1 = rhs(2 * k + 2, x);
    const V k2 = rhs(2 * k + 1, (x - 0.5 * h * k1).eval());
    const V k3 = rhs(2 * k + 1, (x - 0.5 * h * k2).eval());
    const V k4 = rhs(2 * k, (x - h * k3).eval());
    half[2 * k] = x - (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!half[2 * k].allFinite()) throw InstabilityError("backward integration produced a non-finite state");
  }
  std::vector<V> d(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) d[k] = rhs(2 * k, half[2 * k]);
  for (std::size_t k = 0; k < steps; ++k) {
    half[2 * k + 1] = hermite_midpoint(half[2 * k], half[2 * k + 2], d[k], d[k + 1], h);
  }
  return half;
}

template <typename V, typename Deriv>
void fill_midpoints(std::vector<V>& half, std::size_t steps, double h, const Deriv& deriv) {
  std::vector<V> d(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) d[k] = deriv(k);
  for (std::size_t k = 0; k < steps; ++k) {
    half[2 * k + 1] = hermite_midpoint(half[2 * k], half[2 * k + 2], d[k], d[k + 1], h);
  }
}

template <typename V>
void damp(std::vector<V>& current, const std::vector<V>& proposed, double factor) {
  if (factor == 1.0) {
    current = proposed;
    return;
  }
  for (std::size_t i = 0; i < current.size(); ++i) current[i] += factor * (proposed[i] - current[i]);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Deterministic center manifold

template <int N, int M>
struct DeterministicValue {
  Vec<M> value;
  int iterations = 0;
  double residual = 0.0;
};

// Lyapunov-Perron iteration with no noise at a single xi, on [-T, 0]:
// X solved backward from X(0) = xi by the trapezoid variation-of-constants
// step, Y(t) = int_{-T}^t e^{A_s (t - s)} f_s ds by the trapezoid recursion.
template <int N, int M>
DeterministicValue<N, M> deterministic_manifold_value(const CenterStableSpec<N, M>& spec, const Vec<N>& xi,
                                                      const ExpansionConfig& cfg) {
  const std::size_t steps = cfg.window_steps();
  const double h = cfg.h;
  const Mat<N, N> back = expm((-spec.A_c * h).eval());
  const Mat<M, M> fwd = expm((spec.A_s * h).eval());
  const auto w = detail::history_weights(steps, h, cfg.eta);

  std::vector<Vec<N>> X(steps + 1, xi);
  std::vector<Vec<M>> Y(steps + 1, spec.zero_y());
  std::vector<Vec<N>> fc(steps + 1);
  std::vector<Vec<M>> fs(steps + 1);
  std::vector<Vec<N>> Xn(steps + 1);
  std::vector<Vec<M>> Yn(steps + 1);
  detail::SweepMonitor monitor("deterministic center manifold", cfg);
  while (true) {
    for (std::size_t k = 0; k <= steps; ++k) {
      fc[k] = spec.f_c.value(X[k], Y[k]);
      fs[k] = spec.f_s.value(X[k], Y[k]);
    }
    Xn[steps] = xi;
    for (std::size_t k = steps; k-- > 0;) {
      Xn[k] = back * Xn[k + 1] - (0.5 * h) * (fc[k] + back * fc[k + 1]);
    }
    Yn[0] = spec.zero_y();
    for (std::size_t k = 0; k < steps; ++k) {
      Yn[k + 1] = fwd * (Yn[k] + (0.5 * h) * fs[k]) + (0.5 * h) * fs[k + 1];
    }
    double gx = 0.0;
    double gy = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
      gx = std::max(gx, w[k] * (Xn[k] - X[k]).norm());
      gy = std::max(gy, w[k] * (Yn[k] - Y[k]).norm());
    }
    detail::damp(X, Xn, cfg.fp_damping);
    detail::damp(Y, Yn, cfg.fp_damping);
    if (monitor.record(gx + gy)) break;
  }
  return {Y[steps], monitor.iterations(), monitor.residual()};
}

// Graph of the deterministic center manifold tabulated over an XiGrid.
template <int N, int M>
struct DeterministicManifold {
  GridTable<N, M> table;
  std::vector<int> iterations;
  std::vector<double> residuals;

  Vec<M> operator()(const Vec<N>& xi) const { return table.value(xi); }
  bool covers(const Vec<N>& xi) const { return table.grid().contains(xi); }
  const Mat<M, N>& jacobian_at(std::size_t i) const { return table.jacobian_at(i); }
};

template <int N, int M>
DeterministicManifold<N, M> deterministic_center_manifold(const CenterStableSpec<N, M>& spec, const XiGrid& grid,
                                                          const ExpansionConfig& cfg) {
  spec.validate();
  cfg.validate();
  if (grid.dim() != spec.n()) throw ConfigError("deterministic_center_manifold: grid dimension != n");
  std::vector<Vec<M>> values(grid.size());
  DeterministicManifold<N, M> out;
  out.iterations.resize(grid.size());
  out.residuals.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto r = deterministic_manifold_value(spec, grid.point<N>(i), cfg);
    values[i] = r.value;
    out.iterations[i] = r.iterations;
    out.residuals[i] = r.residual;
  }
  out.table = GridTable<N, M>(grid, std::move(values), spec.m());
  return out;
}

// ---------------------------------------------------------------------------
// Order-by-order hierarchy on the history window

// Grid functions of the expansion X = X0 + eps X1 + eps^2 X2 (same for Y) on
// the window [-T, 0]. All fields live on the half-step grid (index 2k is node
// k at time (k - steps) h). The order-0 linearization is cached along the
// window since every higher order reuses it.
template <int N, int M>
struct HierarchySolution {
  double h = 0.0;
  std::size_t steps = 0;
  Vec<N> xi;

  std::vector<Vec<N>> X0, X1, X2;
  std::vector<Vec<M>> Y0, Y1, Y2;

  std::vector<Vec<N>> fc;
  std::vector<Vec<M>> fs;
  std::vector<Mat<N, N>> fcx;
  std::vector<Mat<N, M>> fcy;
  std::vector<Mat<M, N>> fsx;
  std::vector<Mat<M, M>> fsy;

  // Taylor coefficients of the transformed stable nonlinearity at nodes.
  std::vector<Vec<M>> F1s, F2s;

  std::array<int, 3> iterations{0, 0, 0};
  std::array<double, 3> residuals{0.0, 0.0, 0.0};
  int solved_order = -1;

  double time(std::size_t k) const { return (static_cast<double>(k) - static_cast<double>(steps)) * h; }
  std::size_t nodes() const { return steps + 1; }
};

// Backward RK4 for X0' = A_c X0 + f_c(X0, H_d(X0)) from X0(0) = xi, with
// Y0 = H_d(X0) read from the table. residuals[0] is the largest one-step
// defect of the stable equation Y0' = A_s Y0 + f_s along the trajectory
// (trapezoid form, divided by h), a consistency check on the table.
template <int N, int M>
HierarchySolution<N, M> solve_order0(const CenterStableSpec<N, M>& spec, const Vec<N>& xi,
                                     const DeterministicManifold<N, M>& Hd, const ExpansionConfig& cfg) {
  const CenterStableSpec<N, M> full = with_numeric_derivatives(spec, cfg.fd_step);
  HierarchySolution<N, M> sol;
  sol.h = cfg.h;
  sol.steps = cfg.window_steps();
  sol.xi = xi;
  const std::size_t steps = sol.steps;
  const double h = sol.h;

  auto graph = [&](const Vec<N>& x) -> Vec<M> {
    if (!Hd.covers(x)) {
      std::ostringstream os;
      os << "solve_order0: backward trajectory from xi = (" << xi.transpose() << ") reached x = ("
         << x.transpose() << ") outside the H_d table; enlarge the xi grid or apply a cutoff";
      throw RangeError(os.str());
    }
    return Hd(x);
  };
  auto rhs = [&](std::size_t, const Vec<N>& x) -> Vec<N> { return spec.A_c * x + spec.f_c.value(x, graph(x)); };
  sol.X0 = detail::integrate_backward(xi, steps, h, rhs);
  sol.Y0.resize(sol.X0.size());
  for (std::size_t j = 0; j < sol.X0.size(); ++j) sol.Y0[j] = graph(sol.X0[j]);

  const std::size_t half = sol.X0.size();
  sol.fc.resize(half);
  sol.fs.resize(half);
  sol.fcx.resize(half);
  sol.fcy.resize(half);
  sol.fsx.resize(half);
  sol.fsy.resize(half);
  for (std::size_t j = 0; j < half; ++j) {
    const Vec<N>& x = sol.X0[j];
    const Vec<M>& y = sol.Y0[j];
    sol.fc[j] = full.f_c.value(x, y);
    sol.fs[j] = full.f_s.value(x, y);
    sol.fcx[j] = full.f_c.d_x(x, y);
    sol.fcy[j] = full.f_c.d_y(x, y);
    sol.fsx[j] = full.f_s.d_x(x, y);
    sol.fsy[j] = full.f_s.d_y(x, y);
  }

  const Mat<M, M> fwd = expm((spec.A_s * h).eval());
  double defect = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    const Vec<M> pred = fwd * (sol.Y0[2 * k] + (0.5 * h) * sol.fs[2 * k]) + (0.5 * h) * sol.fs[2 * k + 2];
    defect = std::max(defect, (sol.Y0[2 * k + 2] - pred).norm() / h);
  }
  sol.iterations[0] = 1;
  sol.residuals[0] = defect;
  sol.solved_order = 0;
  return sol;
}

namespace detail {

// Order-1 coefficient of F^s at half-grid index j:
// f_x (X1 + z1 X0) + f_y (Y1 + z2 Y0) - z2 f.
template <int N, int M>
Vec<M> stable_forcing_order1(const HierarchySolution<N, M>& s, const NoiseWindow& nw, std::size_t j,
                             const Vec<M>& Y1) {
  const double z1 = nw.z1[j];
  const double z2 = nw.z2[j];
  return s.fsx[j] * (s.X1[j] + z1 * s.X0[j]) + s.fsy[j] * (Y1 + z2 * s.Y0[j]) - z2 * s.fs[j];
}

// Second-order terms of a block map at the order-0 state:
// D_xx f[u,u]/2 + D_xy f[u,v] + D_yy f[v,v]/2, u = X1 + z1 X0, v = Y1 + z2 Y0.
template <int N, int M, int Out>
Vec<Out> curvature_terms(const BlockMap<N, M, Out>& f, const HierarchySolution<N, M>& s, const NoiseWindow& nw,
                         std::size_t j) {
  const Vec<N> u = s.X1[j] + nw.z1[j] * s.X0[j];
  const Vec<M> v = s.Y1[j] + nw.z2[j] * s.Y0[j];
  return 0.5 * f.d_xx(s.X0[j], s.Y0[j], u, u) + f.d_xy(s.X0[j], s.Y0[j], u, v) +
         0.5 * f.d_yy(s.X0[j], s.Y0[j], v, v);
}

// Order-2 coefficient of F^s at half-grid index j (Y2 supplied separately so
// fixed-point iterates can be plugged in).
template <int N, int M>
Vec<M> stable_forcing_order2(const BlockMap<N, M, M>& f_s, const HierarchySolution<N, M>& s, const NoiseWindow& nw,
                             std::size_t j, const Vec<M>& Y2) {
  const double z1 = nw.z1[j];
  const double z2 = nw.z2[j];
  const Vec<N> u = s.X1[j] + z1 * s.X0[j];
  return (0.5 * z2 * z2) * s.fs[j] +
         s.fsx[j] * (s.X2[j] + z1 * s.X1[j] + (0.5 * z1 * z1) * s.X0[j] - z2 * u) +
         s.fsy[j] * (Y2 - (0.5 * z2 * z2) * s.Y0[j]) + curvature_terms(f_s, s, nw, j);
}

inline void check_window(const NoiseWindow& nw, std::size_t steps, double h) {
  if (nw.steps != steps || std::abs(nw.h - h) > 1e-12 * h) {
    throw ConfigError("hierarchy: noise window does not match the solution grid");
  }
}

}  // namespace detail

// First-order fields. X1 solves
//   X1' = (A_c + f_x) X1 + f_y Y1 + [f_x z1 X0 + z1 X0 + f_y z2 Y0 - z1 f]
// backward from X1(0) = 0 by RK4; Y1 is the truncated history integral,
// advanced by the trapezoid recursion with the integrating factor
// e^{A_s h + eps dJ2} expanded to first order (dJ2 = int z2 over the cell),
// which carries the z2 Y0 forcing. The pair is iterated to a fixed point in
// the e^{eta t}-weighted sup norm.
template <int N, int M>
void solve_order1(const CenterStableSpec<N, M>& spec, HierarchySolution<N, M>& s, const NoiseWindow& nw,
                  const ExpansionConfig& cfg) {
  if (s.solved_order < 0) throw ConfigError("solve_order1: order 0 missing");
  detail::check_window(nw, s.steps, s.h);
  const std::size_t steps = s.steps;
  const double h = s.h;
  const std::size_t half = 2 * steps + 1;
  const Mat<M, M> fwd = expm((spec.A_s * h).eval());
  const auto w = detail::history_weights(steps, h, cfg.eta);

  s.X1.assign(half, spec.zero_x());
  s.Y1.assign(half, spec.zero_y());
  std::vector<Vec<N>> rest(half);
  std::vector<Vec<M>> F1(steps + 1);
  std::vector<Vec<M>> Yn(half, spec.zero_y());
  detail::SweepMonitor monitor("order-1 hierarchy", cfg);
  while (true) {
    for (std::size_t j = 0; j < half; ++j) {
      const double z1 = nw.z1[j];
      const double z2 = nw.z2[j];
      const Vec<N> zx = z1 * s.X0[j];
      rest[j] = zx + s.fcx[j] * zx + s.fcy[j] * (s.Y1[j] + z2 * s.Y0[j]) - z1 * s.fc[j];
    }
    auto rhs = [&](std::size_t j, const Vec<N>& x) -> Vec<N> { return spec.A_c * x + s.fcx[j] * x + rest[j]; };
    std::vector<Vec<N>> Xn = detail::integrate_backward(spec.zero_x(), steps, h, rhs);

    std::swap(s.X1, Xn);  // forcing below reads the new X1
    for (std::size_t k = 0; k <= steps; ++k) F1[k] = detail::stable_forcing_order1(s, nw, 2 * k, s.Y1[2 * k]);
    Yn[0] = spec.zero_y();
    for (std::size_t k = 0; k < steps; ++k) {
      const double dJ = nw.J2[k + 1] - nw.J2[k];
      Yn[2 * k + 2] = fwd * (Yn[2 * k] + (0.5 * h) * F1[k] + dJ * (s.Y0[2 * k] + (0.5 * h) * s.fs[2 * k])) +
                      (0.5 * h) * F1[k + 1];
    }
    detail::fill_midpoints(Yn, steps, h, [&](std::size_t k) -> Vec<M> {
      return spec.A_s * Yn[2 * k] + nw.z2[2 * k] * s.Y0[2 * k] + detail::stable_forcing_order1(s, nw, 2 * k, Yn[2 * k]);
    });
    const double gap = detail::weighted_node_gap(s.X1, Xn, w) + detail::weighted_node_gap(Yn, s.Y1, w);
    if (cfg.fp_damping != 1.0) {
      // Xn holds the previous X1 after the swap.
      for (std::size_t j = 0; j < half; ++j) s.X1[j] = Xn[j] + cfg.fp_damping * (s.X1[j] - Xn[j]);
    }
    detail::damp(s.Y1, Yn, cfg.fp_damping);
    if (monitor.record(gap)) break;
  }
  s.F1s.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) s.F1s[k] = detail::stable_forcing_order1(s, nw, 2 * k, s.Y1[2 * k]);
  s.iterations[1] = monitor.iterations();
  s.residuals[1] = monitor.residual();
  s.solved_order = 1;
}

// Second-order fields, same pattern:
//   X2' = A_c X2 + z1 X1 + z1^2 f/2 + f_y[z2^2 Y0/2 + z2 Y1 + Y2 - z1 (Y1 + z2 Y0)]
//         + f_x (X2 - z1^2 X0/2) + curvature terms of f_c,
// and Y2 from the trapezoid recursion expanded to second order in eps, which
// carries the z2 Y1 forcing. Missing second derivatives are filled by
// finite differences.
template <int N, int M>
void solve_order2(const CenterStableSpec<N, M>& spec, HierarchySolution<N, M>& s, const NoiseWindow& nw,
                  const ExpansionConfig& cfg) {
  if (s.solved_order < 1) throw ConfigError("solve_order2: order 1 missing");
  detail::check_window(nw, s.steps, s.h);
  const CenterStableSpec<N, M> full = with_numeric_derivatives(spec, cfg.fd_step);
  const std::size_t steps = s.steps;
  const double h = s.h;
  const std::size_t half = 2 * steps + 1;
  const Mat<M, M> fwd = expm((spec.A_s * h).eval());
  const auto w = detail::history_weights(steps, h, cfg.eta);

  // Everything in the X2 forcing except the f_y Y2 term is fixed.
  std::vector<Vec<N>> base(half);
  for (std::size_t j = 0; j < half; ++j) {
    const double z1 = nw.z1[j];
    const double z2 = nw.z2[j];
    const Vec<M> v = s.Y1[j] + z2 * s.Y0[j];
    base[j] = z1 * s.X1[j] + (0.5 * z1 * z1) * s.fc[j] +
              s.fcy[j] * ((0.5 * z2 * z2) * s.Y0[j] + z2 * s.Y1[j] - z1 * v) -
              s.fcx[j] * ((0.5 * z1 * z1) * s.X0[j]) + detail::curvature_terms(full.f_c, s, nw, j);
  }

  s.X2.assign(half, spec.zero_x());
  s.Y2.assign(half, spec.zero_y());
  std::vector<Vec<N>> rest(half);
  std::vector<Vec<M>> F2(steps + 1);
  std::vector<Vec<M>> Yn(half, spec.zero_y());
  detail::SweepMonitor monitor("order-2 hierarchy", cfg);
  while (true) {
    for (std::size_t j = 0; j < half; ++j) rest[j] = base[j] + s.fcy[j] * s.Y2[j];
    auto rhs = [&](std::size_t j, const Vec<N>& x) -> Vec<N> { return spec.A_c * x + s.fcx[j] * x + rest[j]; };
    std::vector<Vec<N>> Xn = detail::integrate_backward(spec.zero_x(), steps, h, rhs);

    std::swap(s.X2, Xn);
    for (std::size_t k = 0; k <= steps; ++k) {
      F2[k] = detail::stable_forcing_order2(full.f_s, s, nw, 2 * k, s.Y2[2 * k]);
    }
    Yn[0] = spec.zero_y();
    for (std::size_t k = 0; k < steps; ++k) {
      const double dJ = nw.J2[k + 1] - nw.J2[k];
      const Vec<M> carried = (Yn[2 * k] + (0.5 * h) * F2[k]) + dJ * (s.Y1[2 * k] + (0.5 * h) * s.F1s[k]) +
                             (0.5 * dJ * dJ) * (s.Y0[2 * k] + (0.5 * h) * s.fs[2 * k]);
      Yn[2 * k + 2] = fwd * carried + (0.5 * h) * F2[k + 1];
    }
    detail::fill_midpoints(Yn, steps, h, [&](std::size_t k) -> Vec<M> {
      return spec.A_s * Yn[2 * k] + nw.z2[2 * k] * s.Y1[2 * k] +
             detail::stable_forcing_order2(full.f_s, s, nw, 2 * k, Yn[2 * k]);
    });
    const double gap = detail::weighted_node_gap(s.X2, Xn, w) + detail::weighted_node_gap(Yn, s.Y2, w);
    if (cfg.fp_damping != 1.0) {
      for (std::size_t j = 0; j < half; ++j) s.X2[j] = Xn[j] + cfg.fp_damping * (s.X2[j] - Xn[j]);
    }
    detail::damp(s.Y2, Yn, cfg.fp_damping);
    if (monitor.record(gap)) break;
  }
  s.F2s.resize(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    s.F2s[k] = detail::stable_forcing_order2(full.f_s, s, nw, 2 * k, s.Y2[2 * k]);
  }
  s.iterations[2] = monitor.iterations();
  s.residuals[2] = monitor.residual();
  s.solved_order = 2;
}

// All three orders at one xi.
template <int N, int M>
HierarchySolution<N, M> solve_hierarchy(const CenterStableSpec<N, M>& spec, const Vec<N>& xi,
                                        const DeterministicManifold<N, M>& Hd, const NoiseWindow& nw,
                                        const ExpansionConfig& cfg) {
  HierarchySolution<N, M> s = solve_order0(spec, xi, Hd, cfg);
  solve_order1(spec, s, nw, cfg);
  solve_order2(spec, s, nw, cfg);
  return s;
}

// Columnar export `t X0.. Y0.. X1.. Y1.. X2.. Y2..` at the nodes.
template <int N, int M>
void write_hierarchy(std::ostream& os, const HierarchySolution<N, M>& s) {
  const int n = static_cast<int>(s.xi.size());
  const int m = static_cast<int>(s.Y0.front().size());
  const auto old_precision = os.precision(17);
  os << 't';
  for (int order = 0; order <= 2; ++order) {
    for (int i = 0; i < n; ++i) os << " X" << order << (n > 1 ? "_" + std::to_string(i) : "");
    for (int i = 0; i < m; ++i) os << " Y" << order << (m > 1 ? "_" + std::to_string(i) : "");
  }
  os << '\n';
  const std::array<const std::vector<Vec<N>>*, 3> xs{&s.X0, &s.X1, &s.X2};
  const std::array<const std::vector<Vec<M>>*, 3> ys{&s.Y0, &s.Y1, &s.Y2};
  for (std::size_t k = 0; k <= s.steps; ++k) {
    os << s.time(k);
    for (int order = 0; order <= 2; ++order) {
      const bool have = order <= s.solved_order;
      for (int i = 0; i < n; ++i) os << ' ' << (have ? (*xs[order])[2 * k](i) : 0.0);
      for (int i = 0; i < m; ++i) os << ' ' << (have ? (*ys[order])[2 * k](i) : 0.0);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace rcm
