#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/rng.hpp"
#include "rcm/time_grid.hpp"

namespace rcm {

// Two-sided scalar Wiener path on a TimeGrid, anchored at W(0) = 0.
struct WienerPath {
  TimeGrid grid;
  std::vector<double> increments;  // increments[k] = W(t_{k+1}) - W(t_k)
  std::vector<double> values;      // W(t_k)
  std::uint64_t seed = 0;
  std::uint32_t channel = 0;
};

enum class OuInit { stationary_sample, zero };

// Stationary Ornstein-Uhlenbeck process dz = -z dt + dW sampled on the grid of
// its driving Wiener path. `cumulative[k]` is the trapezoid integral of z from
// t_start to t_k, so every integral of z is a difference of prefix sums.
struct OUPath {
  TimeGrid grid;
  std::vector<double> z;
  std::vector<double> cumulative;
  OuInit init_mode = OuInit::zero;
  std::uint64_t source_seed = 0;

  // Path built from explicit node values (synthetic tests, re-sampled data).
  static OUPath from_values(const TimeGrid& grid, std::vector<double> values) {
    if (values.size() != grid.size()) throw ConfigError("OUPath::from_values: size mismatch");
    OUPath ou{grid, std::move(values), {}, OuInit::zero, 0};
    ou.rebuild_cumulative();
    return ou;
  }

  void rebuild_cumulative() {
    const double h = grid.step();
    cumulative.assign(z.size(), 0.0);
    for (std::size_t k = 0; k + 1 < z.size(); ++k) {
      cumulative[k + 1] = cumulative[k] + 0.5 * h * (z[k] + z[k + 1]);
    }
  }

  double at_zero() const { return z[grid.zero_index()]; }
};

namespace detail {

// Each channel owns two counter streams: Gaussian increments, and the
// stationary initial value.
constexpr std::uint64_t increment_stream(std::uint32_t channel) { return 2ULL * channel; }
constexpr std::uint64_t init_stream(std::uint32_t channel) { return 2ULL * channel + 1ULL; }

}  // namespace detail

// Increment k is keyed by its signed offset from the t = 0 node, so paths with
// the same seed and step agree on their common time span whatever the extent.
inline WienerPath generate_wiener(std::uint64_t seed, const TimeGrid& grid,
                                  std::uint32_t channel = 0) {
  WienerPath w{grid, {}, {}, seed, channel};
  const CounterNormal normal(seed, detail::increment_stream(channel));
  const double sd = std::sqrt(grid.step());
  const auto zero = static_cast<std::int64_t>(grid.zero_index());
  w.increments.resize(grid.n_steps());
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    w.increments[k] = sd * normal(static_cast<std::int64_t>(k) - zero);
  }
  w.values.assign(grid.size(), 0.0);
  for (std::size_t k = 0; k < grid.n_steps(); ++k) w.values[k + 1] = w.values[k] + w.increments[k];
  const double anchor = w.values[grid.zero_index()];
  for (double& v : w.values) v -= anchor;
  // Re-derive increments from the anchored values so the difference identity
  // holds exactly in floating point.
  for (std::size_t k = 0; k < grid.n_steps(); ++k) w.increments[k] = w.values[k + 1] - w.values[k];
  return w;
}

// Path with every `factor` consecutive increments merged: the same Brownian
// realization on a grid with step factor * h.
inline WienerPath coarsen(const WienerPath& w, std::size_t factor) {
  const TimeGrid& g = w.grid;
  if (factor == 0 || g.n_steps() % factor != 0 || g.zero_index() % factor != 0) {
    throw ConfigError("coarsen: factor must divide the step count and the zero offset");
  }
  const TimeGrid coarse(g.t_start(), g.t_end(), g.n_steps() / factor);
  WienerPath out{coarse, {}, {}, w.seed, w.channel};
  out.values.resize(coarse.size());
  for (std::size_t k = 0; k < coarse.size(); ++k) out.values[k] = w.values[k * factor];
  out.increments.resize(coarse.n_steps());
  for (std::size_t k = 0; k < coarse.n_steps(); ++k) {
    out.increments[k] = out.values[k + 1] - out.values[k];
  }
  return out;
}

// Exponential-Euler recursion z_{k+1} = e^{-h} z_k + e^{-h/2} dW_k. In
// stationary mode z(t_start) ~ N(0, 1/2) from the channel's init stream.
inline OUPath ou_from_wiener(const WienerPath& w, OuInit init_mode) {
  const TimeGrid& g = w.grid;
  if (w.increments.size() != g.n_steps()) throw ConfigError("ou_from_wiener: malformed path");
  OUPath ou{g, std::vector<double>(g.size(), 0.0), {}, init_mode, w.seed};
  if (init_mode == OuInit::stationary_sample) {
    const CounterNormal normal(w.seed, detail::init_stream(w.channel));
    ou.z[0] = std::sqrt(0.5) * normal(0);
  }
  const double decay = std::exp(-g.step());
  const double weight = std::exp(-0.5 * g.step());
  for (std::size_t k = 0; k < g.n_steps(); ++k) {
    ou.z[k + 1] = decay * ou.z[k] + weight * w.increments[k];
  }
  ou.rebuild_cumulative();
  return ou;
}

// Node value at grid times, linear interpolation in between.
inline double z_at(const OUPath& ou, double t) {
  const auto [k, frac] = ou.grid.locate(t);
  return ou.z[k] + frac * (ou.z[k + 1] - ou.z[k]);
}

namespace detail {

// Integral of the piecewise-linear interpolant of z from t_start to t.
inline double z_prefix(const OUPath& ou, double t) {
  const auto [k, frac] = ou.grid.locate(t);
  const double zt = ou.z[k] + frac * (ou.z[k + 1] - ou.z[k]);
  return ou.cumulative[k] + 0.5 * frac * ou.grid.step() * (ou.z[k] + zt);
}

}  // namespace detail

// Trapezoid integral of z over [a, b] (partial end cells integrate the linear
// interpolant exactly). Antisymmetric in (a, b).
inline double integrate_z(const OUPath& ou, double a, double b) {
  return detail::z_prefix(ou, b) - detail::z_prefix(ou, a);
}

enum class IteratedKernel {
  inner_exp,  // int int_{u<v} e^u dW_u dW_v
  wedge,      // int int_{v<u<0} e^v (u - v) dW_u dW_v
};

inline IteratedKernel parse_kernel(std::string_view name) {
  if (name == "inner_exp") return IteratedKernel::inner_exp;
  if (name == "wedge") return IteratedKernel::wedge;
  throw ConfigError("unknown iterated-integral kernel: " + std::string(name));
}

namespace detail {

inline std::size_t window_start(const WienerPath& w, double a) {
  if (!(a <= 0.0)) throw RangeError("stochastic integral window must end at 0 and start at a <= 0");
  return w.grid.node_of(a);
}

}  // namespace detail

// Left-point (Ito) double sum over increment pairs in the window [a, 0].
inline double ito_double_integral(const WienerPath& w, IteratedKernel kernel, double a) {
  const TimeGrid& g = w.grid;
  const std::size_t first = detail::window_start(w, a);
  const std::size_t last = g.zero_index();
  double total = 0.0;
  switch (kernel) {
    case IteratedKernel::inner_exp: {
      double inner = 0.0;  // sum_{i<j} e^{t_i} dW_i
      for (std::size_t j = first; j < last; ++j) {
        total += inner * w.increments[j];
        inner += std::exp(g.time(j)) * w.increments[j];
      }
      break;
    }
    case IteratedKernel::wedge: {
      double s1 = 0.0;  // sum_{i<j} e^{v_i} dW_i
      double s2 = 0.0;  // sum_{i<j} v_i e^{v_i} dW_i
      for (std::size_t j = first; j < last; ++j) {
        const double u = g.time(j);
        total += (u * s1 - s2) * w.increments[j];
        const double e = std::exp(u);
        s1 += e * w.increments[j];
        s2 += u * e * w.increments[j];
      }
      break;
    }
  }
  return total;
}

// Left-point sum for int_a^0 e^u dW_u.
inline double exp_integral(const WienerPath& w, double a) {
  const std::size_t first = detail::window_start(w, a);
  double total = 0.0;
  for (std::size_t j = first; j < w.grid.zero_index(); ++j) {
    total += std::exp(w.grid.time(j)) * w.increments[j];
  }
  return total;
}

// Columnar export: header `t w z`, one row per node, 17 significant digits.
inline void write_paths(std::ostream& os, const WienerPath& w, const OUPath& ou) {
  if (w.values.size() != ou.z.size()) throw ConfigError("write_paths: grid mismatch");
  const auto old_precision = os.precision(17);
  os << "t w z\n";
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    os << w.grid.time(k) << ' ' << w.values[k] << ' ' << ou.z[k] << '\n';
  }
  os.precision(old_precision);
}

}  // namespace rcm
