#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/hierarchy.hpp"
#include "rcm/linalg.hpp"
#include "rcm/noise_paths.hpp"
#include "rcm/noise_window.hpp"
#include "rcm/parallel.hpp"
#include "rcm/system_model.hpp"
#include "rcm/xi_grid.hpp"

namespace rcm {

namespace detail {

// sum_k w_k e^{A_s (0 - t_k)} g_k over the window nodes with trapezoid
// weights, evaluated by Horner's rule in the one-step propagator.
template <int M, typename Term>
Vec<M> history_sum(const Mat<M, M>& A_s, std::size_t steps, double h, const Term& term) {
  const Mat<M, M> fwd = expm((A_s * h).eval());
  Vec<M> acc = (0.5 * h) * term(std::size_t{0});
  for (std::size_t k = 1; k <= steps; ++k) {
    const double wk = (k == steps) ? 0.5 * h : h;
    acc = (fwd * acc + wk * term(k)).eval();
  }
  return acc;
}

}  // namespace detail

// First-order term of the manifold in the transformed coordinates:
//   int_{-T}^0 e^{-A_s t} [ (int_t^0 z2) f_s(X0, Y0) + F1(t) ] dt,
// with F1 the first-order coefficient of the transformed stable nonlinearity.
template <int N, int M>
Vec<M> tilde_H1(const CenterStableSpec<N, M>& spec, const HierarchySolution<N, M>& s, const NoiseWindow& nw) {
  if (s.solved_order < 1) throw ConfigError("tilde_H1: order 1 missing");
  return detail::history_sum<M>(spec.A_s, s.steps, s.h, [&](std::size_t k) -> Vec<M> {
    const double I = -nw.J2[k];
    return I * s.fs[2 * k] + s.F1s[k];
  });
}

// Second-order term:
//   int_{-T}^0 e^{-A_s t} [ F2 + I F1 + I^2/2 f_s(X0, Y0) ] dt, I = int_t^0 z2.
template <int N, int M>
Vec<M> tilde_H2(const CenterStableSpec<N, M>& spec, const HierarchySolution<N, M>& s, const NoiseWindow& nw) {
  if (s.solved_order < 2) throw ConfigError("tilde_H2: order 2 missing");
  return detail::history_sum<M>(spec.A_s, s.steps, s.h, [&](std::size_t k) -> Vec<M> {
    const double I = -nw.J2[k];
    return s.F2s[k] + I * s.F1s[k] + (0.5 * I * I) * s.fs[2 * k];
  });
}

// How the second-order coefficient is carried back through
// H(xi) = e^{eps z2} H~(e^{-eps z1} xi).
enum class Inversion {
  full,               // complete second-order chain rule
  without_curvature,  // drops (z1^2 / 2) D^2 H~d[xi, xi]
};

template <int N, int M>
struct OriginalCoefficients {
  std::vector<Vec<M>> H1;
  std::vector<Vec<M>> H2;
};

// Coefficients of the manifold in the original coordinates on the grid of
// the tilde tables (derivatives by finite differences of the tables).
template <int N, int M>
OriginalCoefficients<N, M> to_original_coordinates(const GridTable<N, M>& tHd, const GridTable<N, M>& tH1,
                                                   const GridTable<N, M>& tH2, double z1, double z2,
                                                   Inversion mode = Inversion::full) {
  const XiGrid& grid = tHd.grid();
  if (tH1.grid().size() != grid.size() || tH2.grid().size() != grid.size()) {
    throw ConfigError("to_original_coordinates: tables on different grids");
  }
  OriginalCoefficients<N, M> out;
  out.H1.resize(grid.size());
  out.H2.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec<N> xi = grid.point<N>(i);
    const Vec<M>& d = tHd.at(i);
    const Vec<M>& a = tH1.at(i);
    const Vec<M> Dd = tHd.jacobian_at(i) * xi;
    const Vec<M> Da = tH1.jacobian_at(i) * xi;
    out.H1[i] = a + z2 * d - z1 * Dd;
    Vec<M> h2 = tH2.at(i) - z1 * Da + (0.5 * z1 * z1) * Dd + z2 * (a - z1 * Dd) + (0.5 * z2 * z2) * d;
    if (mode == Inversion::full) h2 += (0.5 * z1 * z1) * tHd.second_form_at(i, xi);
    out.H2[i] = h2;
  }
  return out;
}

// H^eps = H^d + eps H1 + eps^2 H2 for one noise realization, tabulated on an
// XiGrid. The tilde tables describe the same manifold in the transformed
// coordinates.
template <int N, int M>
struct ManifoldExpansion {
  GridTable<N, M> Hd;
  GridTable<N, M> tilde_H1;
  GridTable<N, M> tilde_H2;
  GridTable<N, M> H1;
  GridTable<N, M> H2;
  double z1_at_0 = 0.0;
  double z2_at_0 = 0.0;
  Inversion inversion = Inversion::full;
  // Per-xi sweep counts and final updates of the order-1 and order-2 solves.
  std::vector<std::array<int, 3>> iterations;
  std::vector<std::array<double, 3>> residuals;

  const XiGrid& grid() const { return Hd.grid(); }
};

struct BuildOptions {
  Inversion inversion = Inversion::full;
  int workers = 1;
};

template <int N, int M>
ManifoldExpansion<N, M> build_expansion(const CenterStableSpec<N, M>& spec, const XiGrid& grid, const OUPath& ou1,
                                        const OUPath& ou2, const ExpansionConfig& cfg,
                                        const DeterministicManifold<N, M>& Hd, BuildOptions opts = {}) {
  const std::size_t steps = cfg.window_steps();
  if (std::abs(ou1.grid.step() - cfg.h) > 1e-12 * cfg.h) {
    throw ConfigError("build_expansion: OU path step differs from the expansion step");
  }
  const NoiseWindow nw = NoiseWindow::at_origin(ou1, ou2, steps);
  const std::size_t count = grid.size();
  std::vector<Vec<M>> t1(count), t2(count);
  ManifoldExpansion<N, M> out;
  out.iterations.resize(count);
  out.residuals.resize(count);
  parallel_for(count, opts.workers, [&](std::size_t i) {
    const HierarchySolution<N, M> s = solve_hierarchy(spec, grid.point<N>(i), Hd, nw, cfg);
    t1[i] = tilde_H1(spec, s, nw);
    t2[i] = tilde_H2(spec, s, nw);
    out.iterations[i] = s.iterations;
    out.residuals[i] = s.residuals;
  });
  out.Hd = Hd.table;
  out.tilde_H1 = GridTable<N, M>(grid, std::move(t1), spec.m());
  out.tilde_H2 = GridTable<N, M>(grid, std::move(t2), spec.m());
  out.z1_at_0 = ou1.at_zero();
  out.z2_at_0 = ou2.at_zero();
  out.inversion = opts.inversion;
  auto orig = to_original_coordinates(out.Hd, out.tilde_H1, out.tilde_H2, out.z1_at_0, out.z2_at_0, opts.inversion);
  out.H1 = GridTable<N, M>(grid, std::move(orig.H1), spec.m());
  out.H2 = GridTable<N, M>(grid, std::move(orig.H2), spec.m());
  return out;
}

template <int N, int M>
ManifoldExpansion<N, M> build_expansion(const CenterStableSpec<N, M>& spec, const XiGrid& grid, const OUPath& ou1,
                                        const OUPath& ou2, const ExpansionConfig& cfg, BuildOptions opts = {}) {
  const DeterministicManifold<N, M> Hd = deterministic_center_manifold(spec, grid, cfg);
  return build_expansion(spec, grid, ou1, ou2, cfg, Hd, opts);
}

// H^d(xi) + eps H1(xi) + eps^2 H2(xi) truncated after `order`.
template <int N, int M>
Vec<M> evaluate_expansion(const ManifoldExpansion<N, M>& e, const Vec<N>& xi, double eps, int order = 2) {
  if (order < 0 || order > 2) throw ConfigError("evaluate_expansion: order must be 0, 1 or 2");
  Vec<M> out = e.Hd.value(xi);
  if (order >= 1) out += eps * e.H1.value(xi);
  if (order >= 2) out += (eps * eps) * e.H2.value(xi);
  return out;
}

// Same manifold in the transformed coordinates.
template <int N, int M>
Vec<M> evaluate_tilde(const ManifoldExpansion<N, M>& e, const Vec<N>& X, double eps, int order = 2) {
  if (order < 0 || order > 2) throw ConfigError("evaluate_tilde: order must be 0, 1 or 2");
  Vec<M> out = e.Hd.value(X);
  if (order >= 1) out += eps * e.tilde_H1.value(X);
  if (order >= 2) out += (eps * eps) * e.tilde_H2.value(X);
  return out;
}

// Columnar export `xi Hd H1 H2` (indexed columns when n or m exceed 1).
template <int N, int M>
void write_expansion(std::ostream& os, const ManifoldExpansion<N, M>& e) {
  const XiGrid& g = e.grid();
  const int n = g.dim();
  const int m = e.Hd.out_dim();
  auto name = [](const char* base, int i, int count) {
    return count > 1 ? std::string(base) + "_" + std::to_string(i) : std::string(base);
  };
  const auto old_precision = os.precision(17);
  for (int i = 0; i < n; ++i) os << (i ? " " : "") << name("xi", i, n);
  for (const char* col : {"Hd", "H1", "H2"}) {
    for (int i = 0; i < m; ++i) os << ' ' << name(col, i, m);
  }
  os << '\n';
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Vec<N> xi = g.point<N>(k);
    for (int i = 0; i < n; ++i) os << (i ? " " : "") << xi(i);
    for (const auto* t : {&e.Hd, &e.H1, &e.H2}) {
      for (int i = 0; i < m; ++i) os << ' ' << t->at(k)(i);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace rcm
