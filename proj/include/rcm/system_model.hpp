#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/linalg.hpp"
#include "rcm/noise_paths.hpp"

namespace rcm {

// A nonlinearity f(x, y) with values in R^Out, x in R^N, y in R^M, together
// with optional derivative evaluators. Second derivatives are bilinear forms:
// d_xy(x, y, a, b) = D_x D_y f(x, y)[a, b].
template <int N, int M, int Out>
struct BlockMap {
  using XVec = Vec<N>;
  using YVec = Vec<M>;
  using OutVec = Vec<Out>;

  std::function<OutVec(const XVec&, const YVec&)> value;
  std::function<Mat<Out, N>(const XVec&, const YVec&)> d_x;
  std::function<Mat<Out, M>(const XVec&, const YVec&)> d_y;
  std::function<OutVec(const XVec&, const YVec&, const XVec&, const XVec&)> d_xx;
  std::function<OutVec(const XVec&, const YVec&, const XVec&, const YVec&)> d_xy;
  std::function<OutVec(const XVec&, const YVec&, const YVec&, const YVec&)> d_yy;

  bool has_first() const { return d_x && d_y; }
  bool has_second() const { return d_xx && d_xy && d_yy; }
};

// dx = (A_c x + f_c(x, y)) dt + eps x o dW^1, dy = (A_s y + f_s(x, y)) dt + eps y o dW^2.
template <int N = Dynamic, int M = Dynamic>
struct CenterStableSpec {
  using XVec = Vec<N>;
  using YVec = Vec<M>;
  static constexpr int kCenter = N;
  static constexpr int kStable = M;

  Mat<N, N> A_c;
  Mat<M, M> A_s;
  BlockMap<N, M, N> f_c;
  BlockMap<N, M, M> f_s;
  double L_f = 0.0;
  std::optional<double> R_cutoff;

  int n() const { return static_cast<int>(A_c.rows()); }
  int m() const { return static_cast<int>(A_s.rows()); }

  XVec zero_x() const { return zero_vec<N>(n()); }
  YVec zero_y() const { return zero_vec<M>(m()); }

  void validate() const {
    if (A_c.rows() != A_c.cols() || A_s.rows() != A_s.cols() || n() < 1 || m() < 1) {
      throw ConfigError("CenterStableSpec: A_c and A_s must be square and non-empty");
    }
    if (!A_c.allFinite() || !A_s.allFinite()) {
      throw ConfigError("CenterStableSpec: non-finite matrix entry");
    }
    if (!f_c.value || !f_s.value) throw ConfigError("CenterStableSpec: f_c and f_s are required");
    if (!(L_f >= 0.0)) throw ConfigError("CenterStableSpec: L_f must be >= 0");
    if (R_cutoff && !(*R_cutoff > 0.0)) throw ConfigError("CenterStableSpec: cutoff radius must be > 0");
  }
};

// Exponential estimates |e^{A_c t}| <= K e^{gamma |t|}, |e^{A_s t}| <= K e^{-beta t}.
struct TrichotomyParams {
  double K = 1.0;
  double beta = 1.0;
  double gamma = 0.0;

  void validate() const {
    if (!(K >= 1.0) || !(gamma >= 0.0) || !(beta > gamma)) {
      throw ConfigError("TrichotomyParams: need K >= 1 and beta > gamma >= 0");
    }
  }
};

// Discretization and fixed-point controls shared by the expansion pipeline and
// the Lyapunov-Perron oracle.
struct ExpansionConfig {
  double T_trunc = 20.0;
  double h = 0.005;
  double fp_tol = 1e-10;
  int fp_max_iters = 200;
  double fp_damping = 1.0;
  double fd_step = 0.0;  // 0 selects the automatic rule
  double eta = 0.5;

  // Horizon at which the weighted integrand has decayed below fp_tol.
  static double default_truncation(double fp_tol, double beta, double eta) {
    return std::log(1.0 / fp_tol) / (beta - eta);
  }

  std::size_t window_steps() const {
    return static_cast<std::size_t>(std::llround(T_trunc / h));
  }

  void validate() const {
    if (!(T_trunc > 0.0) || !(h > 0.0) || !(fp_tol > 0.0) || fp_max_iters < 1) {
      throw ConfigError("ExpansionConfig: need T_trunc > 0, h > 0, fp_tol > 0, fp_max_iters >= 1");
    }
    if (!(fp_damping > 0.0 && fp_damping <= 1.0)) {
      throw ConfigError("ExpansionConfig: fp_damping must lie in (0, 1]");
    }
    if (fd_step < 0.0) throw ConfigError("ExpansionConfig: fd_step must be >= 0");
    if (window_steps() < 2) throw ConfigError("ExpansionConfig: truncation window shorter than 2 steps");
  }

  void validate(const TrichotomyParams& params) const {
    validate();
    if (!(eta > params.gamma && eta < params.beta)) {
      throw ConfigError("ExpansionConfig: need gamma < eta < beta");
    }
  }
};

namespace detail {

template <int N, int M>
double joint_norm(const Vec<N>& x, const Vec<M>& y) {
  return std::sqrt(x.squaredNorm() + y.squaredNorm());
}

inline double first_difference_step(double scale, double override_step) {
  if (override_step > 0.0) return override_step;
  return std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + scale);
}

// Second differences lose two orders of the step to rounding, so they use
// eps^{1/4} instead of eps^{1/3}.
inline double second_difference_step(double scale) {
  return std::pow(std::numeric_limits<double>::epsilon(), 0.25) * (1.0 + scale);
}

template <int Out, int N, typename F>
Mat<Out, N> central_jacobian(const F& f, const Vec<N>& at, int out_dim, double step) {
  const int n = static_cast<int>(at.size());
  Mat<Out, N> jac = zero_mat<Out, N>(out_dim, n);
  for (int j = 0; j < n; ++j) {
    Vec<N> plus = at;
    Vec<N> minus = at;
    plus(j) += step;
    minus(j) -= step;
    jac.col(j) = (f(plus) - f(minus)) / (2.0 * step);
  }
  return jac;
}

// D^2 f[a, b] for f(s a_hat, t b_hat) by a four-point stencil; zero when
// either direction vanishes.
template <typename F, typename OutVec>
OutVec mixed_second(const F& shifted, double na, double nb, double step, OutVec zero) {
  if (na == 0.0 || nb == 0.0) return zero;
  const OutVec d = (shifted(step, step) - shifted(step, -step) - shifted(-step, step) +
                    shifted(-step, -step)) /
                   (4.0 * step * step);
  return d * (na * nb);
}

}  // namespace detail

// Fills every missing derivative evaluator with central differences.
// Jacobians use h = cbrt(eps)(1 + |(x, y)|) unless fd_step > 0 overrides it.
// Second derivatives differentiate the Jacobian when one was supplied,
// otherwise use a four-point stencil with h = eps^{1/4}(1 + |(x, y)|).
template <int N, int M, int Out>
BlockMap<N, M, Out> with_numeric_derivatives(BlockMap<N, M, Out> f, int out_dim, double fd_step = 0.0) {
  using XVec = Vec<N>;
  using YVec = Vec<M>;
  using OutVec = Vec<Out>;
  const auto value = f.value;
  const bool supplied_first = f.has_first();
  if (!f.d_x) {
    f.d_x = [value, out_dim, fd_step](const XVec& x, const YVec& y) {
      const double s = detail::first_difference_step(detail::joint_norm<N, M>(x, y), fd_step);
      return detail::central_jacobian<Out, N>([&](const XVec& xs) { return value(xs, y); }, x, out_dim, s);
    };
  }
  if (!f.d_y) {
    f.d_y = [value, out_dim, fd_step](const XVec& x, const YVec& y) {
      const double s = detail::first_difference_step(detail::joint_norm<N, M>(x, y), fd_step);
      return detail::central_jacobian<Out, M>([&](const YVec& ys) { return value(x, ys); }, y, out_dim, s);
    };
  }
  const auto d_x = f.d_x;
  const auto d_y = f.d_y;
  if (!f.d_xx) {
    f.d_xx = [=](const XVec& x, const YVec& y, const XVec& a, const XVec& b) -> OutVec {
      const double na = a.norm();
      const double nb = b.norm();
      const OutVec zero = zero_vec<Out>(out_dim);
      if (na == 0.0 || nb == 0.0) return zero;
      if (supplied_first) {
        const double s = detail::first_difference_step(detail::joint_norm<N, M>(x, y), fd_step);
        const XVec ua = a / na;
        return ((d_x(x + s * ua, y) - d_x(x - s * ua, y)) * b / (2.0 * s)) * na;
      }
      const double s = detail::second_difference_step(detail::joint_norm<N, M>(x, y));
      const XVec ua = a / na;
      const XVec ub = b / nb;
      return detail::mixed_second(
          [&](double p, double q) -> OutVec { return value(x + p * ua + q * ub, y); }, na, nb, s, zero);
    };
  }
  if (!f.d_xy) {
    f.d_xy = [=](const XVec& x, const YVec& y, const XVec& a, const YVec& b) -> OutVec {
      const double na = a.norm();
      const double nb = b.norm();
      const OutVec zero = zero_vec<Out>(out_dim);
      if (na == 0.0 || nb == 0.0) return zero;
      if (supplied_first) {
        const double s = detail::first_difference_step(detail::joint_norm<N, M>(x, y), fd_step);
        const XVec ua = a / na;
        return ((d_y(x + s * ua, y) - d_y(x - s * ua, y)) * b / (2.0 * s)) * na;
      }
      const double s = detail::second_difference_step(detail::joint_norm<N, M>(x, y));
      const XVec ua = a / na;
      const YVec ub = b / nb;
      return detail::mixed_second(
          [&](double p, double q) -> OutVec { return value(x + p * ua, y + q * ub); }, na, nb, s, zero);
    };
  }
  if (!f.d_yy) {
    f.d_yy = [=](const XVec& x, const YVec& y, const YVec& a, const YVec& b) -> OutVec {
      const double na = a.norm();
      const double nb = b.norm();
      const OutVec zero = zero_vec<Out>(out_dim);
      if (na == 0.0 || nb == 0.0) return zero;
      if (supplied_first) {
        const double s = detail::first_difference_step(detail::joint_norm<N, M>(x, y), fd_step);
        const YVec ua = a / na;
        return ((d_y(x, y + s * ua) - d_y(x, y - s * ua)) * b / (2.0 * s)) * na;
      }
      const double s = detail::second_difference_step(detail::joint_norm<N, M>(x, y));
      const YVec ua = a / na;
      const YVec ub = b / nb;
      return detail::mixed_second(
          [&](double p, double q) -> OutVec { return value(x, y + p * ua + q * ub); }, na, nb, s, zero);
    };
  }
  return f;
}

template <int N, int M>
CenterStableSpec<N, M> with_numeric_derivatives(CenterStableSpec<N, M> spec, double fd_step = 0.0) {
  spec.f_c = with_numeric_derivatives(std::move(spec.f_c), spec.n(), fd_step);
  spec.f_s = with_numeric_derivatives(std::move(spec.f_s), spec.m(), fd_step);
  return spec;
}

// ---------------------------------------------------------------------------
// Exponential estimates and the gap condition

struct HypothesisReport {
  bool pass = false;
  // Largest |e^{A t}| - bound over the samples; <= 0 means no violation.
  double center_violation = -std::numeric_limits<double>::infinity();
  double stable_violation = -std::numeric_limits<double>::infinity();
  // Smallest K that would have passed on these samples.
  double required_K = 1.0;
};

template <int N, int M>
HypothesisReport verify_hypothesis_H(const CenterStableSpec<N, M>& spec, const TrichotomyParams& params,
                                     const std::vector<double>& t_samples) {
  if (!spec.A_c.allFinite() || !spec.A_s.allFinite()) {
    throw ConfigError("verify_hypothesis_H: non-finite matrix entry");
  }
  params.validate();
  HypothesisReport report;
  for (double t : t_samples) {
    const double nc = operator_norm(expm((spec.A_c * t).eval()));
    const double bound_c = std::exp(params.gamma * std::abs(t));
    report.center_violation = std::max(report.center_violation, nc - params.K * bound_c);
    report.required_K = std::max(report.required_K, nc / bound_c);
    if (t >= 0.0) {
      const double ns = operator_norm(expm((spec.A_s * t).eval()));
      const double bound_s = std::exp(-params.beta * t);
      report.stable_violation = std::max(report.stable_violation, ns - params.K * bound_s);
      report.required_K = std::max(report.required_K, ns / bound_s);
    }
  }
  // Relative slack for rounding in the exponentials.
  const double slack = 1e-12 * params.K;
  report.pass = report.center_violation <= slack && report.stable_violation <= slack;
  return report;
}

struct GapReport {
  bool holds = false;
  double eta_star = 0.0;
  double margin = 0.0;
};

// K L_f / (eta - gamma) + K L_f / (beta - eta) is minimized at the midpoint of
// (gamma, beta), where it equals 4 K L_f / (beta - gamma).
inline GapReport gap_condition(const TrichotomyParams& params, double L_f) {
  params.validate();
  if (!(L_f >= 0.0)) throw ConfigError("gap_condition: L_f must be >= 0");
  GapReport r;
  r.eta_star = 0.5 * (params.beta + params.gamma);
  r.margin = 4.0 * params.K * L_f / (params.beta - params.gamma);
  r.holds = r.margin < 1.0;
  return r;
}

inline double gap_sum(const TrichotomyParams& params, double L_f, double eta) {
  return params.K * L_f / (eta - params.gamma) + params.K * L_f / (params.beta - eta);
}

// ---------------------------------------------------------------------------
// Cutoff

// Radial C^1 cutoff: 1 on r <= R, 0 on r >= 2R, cubic Hermite ramp between.
struct RadialCutoff {
  double R;

  double value(double r) const {
    if (r <= R) return 1.0;
    if (r >= 2.0 * R) return 0.0;
    const double s = (r - R) / R;
    return 1.0 - s * s * (3.0 - 2.0 * s);
  }
  double slope(double r) const {
    if (r <= R || r >= 2.0 * R) return 0.0;
    const double s = (r - R) / R;
    return -6.0 * s * (1.0 - s) / R;
  }
  double curvature(double r) const {
    if (r <= R || r >= 2.0 * R) return 0.0;
    const double s = (r - R) / R;
    return -6.0 * (1.0 - 2.0 * s) / (R * R);
  }
};

namespace detail {

// chi_R(u) f(u) with derivatives by the product rule; u = (x, y).
template <int N, int M, int Out>
BlockMap<N, M, Out> cutoff_map(const BlockMap<N, M, Out>& f, RadialCutoff chi) {
  using XVec = Vec<N>;
  using YVec = Vec<M>;
  using OutVec = Vec<Out>;
  BlockMap<N, M, Out> g;
  g.value = [f, chi](const XVec& x, const YVec& y) -> OutVec {
    const double w = chi.value(joint_norm<N, M>(x, y));
    if (w == 0.0) return f.value(x, y) * 0.0;
    return w * f.value(x, y);
  };
  g.d_x = [f, chi](const XVec& x, const YVec& y) -> Mat<Out, N> {
    const double r = joint_norm<N, M>(x, y);
    Mat<Out, N> j = chi.value(r) * f.d_x(x, y);
    const double s = chi.slope(r);
    if (s != 0.0) j += (s / r) * f.value(x, y) * x.transpose();
    return j;
  };
  g.d_y = [f, chi](const XVec& x, const YVec& y) -> Mat<Out, M> {
    const double r = joint_norm<N, M>(x, y);
    Mat<Out, M> j = chi.value(r) * f.d_y(x, y);
    const double s = chi.slope(r);
    if (s != 0.0) j += (s / r) * f.value(x, y) * y.transpose();
    return j;
  };
  // D^2(chi f)[a, b] = chi D^2 f[a, b] + Dchi[a] Df[b] + Dchi[b] Df[a] + D^2 chi[a, b] f.
  // a and b are embedded into (x, y) space as (ax, ay) and (bx, by).
  auto second = [f, chi](const XVec& x, const YVec& y, const XVec& ax, const YVec& ay, const XVec& bx,
                         const YVec& by, const OutVec& d2f) -> OutVec {
    const double r = joint_norm<N, M>(x, y);
    const double w = chi.value(r);
    OutVec out = w * d2f;
    const double s = chi.slope(r);
    if (s == 0.0) return out;
    const double ua = (x.dot(ax) + y.dot(ay)) / r;
    const double ub = (x.dot(bx) + y.dot(by)) / r;
    const OutVec dfa = f.d_x(x, y) * ax + f.d_y(x, y) * ay;
    const OutVec dfb = f.d_x(x, y) * bx + f.d_y(x, y) * by;
    const double ab = ax.dot(bx) + ay.dot(by);
    const double d2chi = chi.curvature(r) * ua * ub + (s / r) * (ab - ua * ub);
    out += s * ua * dfb + s * ub * dfa + d2chi * f.value(x, y);
    return out;
  };
  g.d_xx = [f, second](const XVec& x, const YVec& y, const XVec& a, const XVec& b) -> OutVec {
    const YVec zy = y * 0.0;
    return second(x, y, a, zy, b, zy, f.d_xx(x, y, a, b));
  };
  g.d_xy = [f, second](const XVec& x, const YVec& y, const XVec& a, const YVec& b) -> OutVec {
    const XVec zx = x * 0.0;
    const YVec zy = y * 0.0;
    return second(x, y, a, zy, zx, b, f.d_xy(x, y, a, b));
  };
  g.d_yy = [f, second](const XVec& x, const YVec& y, const YVec& a, const YVec& b) -> OutVec {
    const XVec zx = x * 0.0;
    return second(x, y, zx, a, zx, b, f.d_yy(x, y, a, b));
  };
  return g;
}

}  // namespace detail

// Replaces f_c, f_s by chi_R f_c, chi_R f_s. Missing derivative evaluators are
// filled numerically first so the product rule has something to compose.
template <int N, int M>
CenterStableSpec<N, M> apply_cutoff(const CenterStableSpec<N, M>& spec, double R) {
  if (!(R > 0.0)) throw ConfigError("apply_cutoff: R must be > 0");
  const CenterStableSpec<N, M> full = with_numeric_derivatives(spec);
  CenterStableSpec<N, M> out = full;
  out.f_c = detail::cutoff_map(full.f_c, RadialCutoff{R});
  out.f_s = detail::cutoff_map(full.f_s, RadialCutoff{R});
  out.R_cutoff = R;
  return out;
}

// ---------------------------------------------------------------------------
// Derivative checks

struct DerivativeReport {
  bool pass = false;
  double max_first_error = 0.0;
  double max_second_error = 0.0;
  double tolerance = 0.0;
};

namespace detail {

template <typename A, typename B>
double relative_gap(const A& supplied, const B& reference) {
  return (supplied - reference).cwiseAbs().maxCoeff() / (1.0 + reference.cwiseAbs().maxCoeff());
}

template <int N, int M, int Out>
void check_block(const BlockMap<N, M, Out>& f, int out_dim, const Vec<N>& x, const Vec<M>& y, double step,
                 DerivativeReport& rep) {
  using XVec = Vec<N>;
  using YVec = Vec<M>;
  const int n = static_cast<int>(x.size());
  const int m = static_cast<int>(y.size());
  const auto fx = [&](const XVec& xs) { return f.value(xs, y); };
  const auto fy = [&](const YVec& ys) { return f.value(x, ys); };
  if (f.d_x) {
    rep.max_first_error = std::max(rep.max_first_error,
                                   relative_gap(f.d_x(x, y), central_jacobian<Out, N>(fx, x, out_dim, step)));
  }
  if (f.d_y) {
    rep.max_first_error = std::max(rep.max_first_error,
                                   relative_gap(f.d_y(x, y), central_jacobian<Out, M>(fy, y, out_dim, step)));
  }
  // Reference second derivatives: central differences of the reference
  // Jacobian columns, i.e. nested differences of f with a coarser step.
  const double s2 = second_difference_step(joint_norm<N, M>(x, y));
  for (int i = 0; i < n; ++i) {
    XVec ei = zero_vec<N>(n);
    ei(i) = 1.0;
    for (int j = 0; j < n && f.d_xx; ++j) {
      XVec ej = zero_vec<N>(n);
      ej(j) = 1.0;
      const auto ref = mixed_second(
          [&](double p, double q) { return f.value(x + p * ei + q * ej, y); }, 1.0, 1.0, s2, zero_vec<Out>(out_dim));
      rep.max_second_error = std::max(rep.max_second_error, relative_gap(f.d_xx(x, y, ei, ej), ref));
    }
    for (int j = 0; j < m && f.d_xy; ++j) {
      YVec ej = zero_vec<M>(m);
      ej(j) = 1.0;
      const auto ref = mixed_second(
          [&](double p, double q) { return f.value(x + p * ei, y + q * ej); }, 1.0, 1.0, s2, zero_vec<Out>(out_dim));
      rep.max_second_error = std::max(rep.max_second_error, relative_gap(f.d_xy(x, y, ei, ej), ref));
    }
  }
  for (int i = 0; i < m && f.d_yy; ++i) {
    YVec ei = zero_vec<M>(m);
    ei(i) = 1.0;
    for (int j = 0; j < m; ++j) {
      YVec ej = zero_vec<M>(m);
      ej(j) = 1.0;
      const auto ref = mixed_second(
          [&](double p, double q) { return f.value(x, y + p * ei + q * ej); }, 1.0, 1.0, s2, zero_vec<Out>(out_dim));
      rep.max_second_error = std::max(rep.max_second_error, relative_gap(f.d_yy(x, y, ei, ej), ref));
    }
  }
}

}  // namespace detail

// Compares supplied derivatives against central differences of the values.
// First derivatives must agree to 10 h^2 + 10 eps / h (truncation plus
// rounding of the reference); second derivatives to the analogous bound for
// the eps^{1/4} four-point stencil.
template <int N, int M>
DerivativeReport check_derivatives(const CenterStableSpec<N, M>& spec,
                                   const std::vector<std::pair<Vec<N>, Vec<M>>>& sample_points,
                                   double fd_step = 0.0) {
  DerivativeReport rep;
  double first_tol = 0.0;
  double second_tol = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (const auto& [x, y] : sample_points) {
    const double scale = detail::joint_norm<N, M>(x, y);
    const double s = detail::first_difference_step(scale, fd_step);
    const double s2 = detail::second_difference_step(scale);
    first_tol = std::max(first_tol, 10.0 * s * s + 10.0 * eps / s);
    second_tol = std::max(second_tol, 10.0 * s2 * s2 + 10.0 * eps / (s2 * s2));
    detail::check_block(spec.f_c, spec.n(), x, y, s, rep);
    detail::check_block(spec.f_s, spec.m(), x, y, s, rep);
  }
  rep.tolerance = first_tol;
  rep.pass = rep.max_first_error <= first_tol && rep.max_second_error <= second_tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Lyapunov exponents of the linearization at the origin

// (1/T) log |Phi(T) v| for v in the center block (first n coordinates) or the
// stable block (last m coordinates). Phi is block diagonal with blocks
// e^{A t + eps int_0^t z}; the matrix part is accumulated step by step with
// renormalization, the scalar noise part is added in closed form.
template <int N, int M>
double estimate_lyapunov(const CenterStableSpec<N, M>& spec, const OUPath& ou_c, const OUPath& ou_s, double eps,
                         const Eigen::VectorXd& v, double T) {
  const int n = spec.n();
  const int m = spec.m();
  if (v.size() != n + m) throw ConfigError("estimate_lyapunov: direction has wrong dimension");
  if (v.norm() == 0.0) throw ConfigError("estimate_lyapunov: zero direction vector");
  if (!(T > 0.0)) throw ConfigError("estimate_lyapunov: T must be > 0");
  const bool center = v.tail(m).norm() == 0.0;
  const bool stable = v.head(n).norm() == 0.0;
  if (!center && !stable) throw ConfigError("estimate_lyapunov: direction must lie in one coordinate block");

  const OUPath& ou = center ? ou_c : ou_s;
  const TimeGrid& g = ou.grid;
  const std::size_t steps = g.node_of(T) - g.zero_index();
  const Eigen::MatrixXd A = center ? Eigen::MatrixXd(spec.A_c) : Eigen::MatrixXd(spec.A_s);
  const Eigen::MatrixXd prop = expm((A * g.step()).eval());
  Eigen::VectorXd w = center ? Eigen::VectorXd(v.head(n)) : Eigen::VectorXd(v.tail(m));
  w /= w.norm();
  double log_growth = 0.0;
  for (std::size_t k = 0; k < steps; ++k) {
    w = prop * w;
    const double nrm = w.norm();
    if (nrm == 0.0) return -std::numeric_limits<double>::infinity();
    log_growth += std::log(nrm);
    w /= nrm;
  }
  log_growth += eps * integrate_z(ou, 0.0, T);
  return log_growth / T;
}

}  // namespace rcm
