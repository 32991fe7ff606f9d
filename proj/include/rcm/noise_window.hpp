#pragma once

#include <cstddef>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/noise_paths.hpp"

namespace rcm {

// The two OU processes seen from an anchor time s over the history window
// [s - T, s], re-expressed in local time t in [-T, 0]: this is the shifted
// noise theta_s omega restricted to the window.
//
// Samples live on the half-step grid: index 2k is node k (local time
// (k - steps) h), index 2k+1 the midpoint of cell k (linear interpolation).
// J1, J2 hold int_0^{t_k} z at nodes, so J[steps] = 0.
struct NoiseWindow {
  double h = 0.0;
  std::size_t steps = 0;
  std::vector<double> z1, z2;
  std::vector<double> J1, J2;

  double time(std::size_t k) const { return (static_cast<double>(k) - static_cast<double>(steps)) * h; }
  std::size_t nodes() const { return steps + 1; }
  std::size_t half_points() const { return 2 * steps + 1; }

  static NoiseWindow from_paths(const OUPath& ou1, const OUPath& ou2, std::size_t anchor_node, std::size_t steps) {
    if (ou1.grid.size() != ou2.grid.size() || ou1.grid.step() != ou2.grid.step() ||
        ou1.grid.zero_index() != ou2.grid.zero_index()) {
      throw ConfigError("NoiseWindow: OU paths live on different grids");
    }
    if (anchor_node < steps || anchor_node >= ou1.grid.size()) {
      throw RangeError("NoiseWindow: history window not covered by the paths");
    }
    NoiseWindow w;
    w.h = ou1.grid.step();
    w.steps = steps;
    const std::size_t first = anchor_node - steps;
    w.z1.resize(w.half_points());
    w.z2.resize(w.half_points());
    w.J1.resize(w.nodes());
    w.J2.resize(w.nodes());
    for (std::size_t k = 0; k <= steps; ++k) {
      w.z1[2 * k] = ou1.z[first + k];
      w.z2[2 * k] = ou2.z[first + k];
      w.J1[k] = ou1.cumulative[first + k] - ou1.cumulative[anchor_node];
      w.J2[k] = ou2.cumulative[first + k] - ou2.cumulative[anchor_node];
    }
    for (std::size_t k = 0; k < steps; ++k) {
      w.z1[2 * k + 1] = 0.5 * (w.z1[2 * k] + w.z1[2 * k + 2]);
      w.z2[2 * k + 1] = 0.5 * (w.z2[2 * k] + w.z2[2 * k + 2]);
    }
    return w;
  }

  // Window anchored at t = 0 of the paths.
  static NoiseWindow at_origin(const OUPath& ou1, const OUPath& ou2, std::size_t steps) {
    return from_paths(ou1, ou2, ou1.grid.zero_index(), steps);
  }

  static NoiseWindow quiet(double h, std::size_t steps) {
    NoiseWindow w;
    w.h = h;
    w.steps = steps;
    w.z1.assign(w.half_points(), 0.0);
    w.z2.assign(w.half_points(), 0.0);
    w.J1.assign(w.nodes(), 0.0);
    w.J2.assign(w.nodes(), 0.0);
    return w;
  }

  // Every sample multiplied by c (the window of the path c z).
  NoiseWindow scaled(double c) const {
    NoiseWindow w = *this;
    for (auto* v : {&w.z1, &w.z2, &w.J1, &w.J2}) {
      for (double& x : *v) x *= c;
    }
    return w;
  }
};

}  // namespace rcm
