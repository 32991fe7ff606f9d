#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>

#include "rcm/errors.hpp"

namespace rcm {

// Uniform two-sided time grid with a node exactly at t = 0.
//
// Node k sits at (k - zero_index) * h, so the t = 0 node is exact in floating
// point regardless of how h rounds.
class TimeGrid {
 public:
  // Empty placeholder; assign a real grid before use.
  TimeGrid() = default;

  TimeGrid(double t_start, double t_end, std::size_t n_steps) {
    if (!(t_start < t_end) || n_steps == 0 || !std::isfinite(t_start) || !std::isfinite(t_end)) {
      throw ConfigError("TimeGrid: need t_start < t_end and n_steps > 0");
    }
    if (!(t_start < 0.0) || t_end < 0.0) {
      throw ConfigError("TimeGrid: need t_start < 0 <= t_end");
    }
    h_ = (t_end - t_start) / static_cast<double>(n_steps);
    const double k0 = std::round(-t_start / h_);
    if (std::abs(t_start + k0 * h_) > 1e-9 * h_ * std::max(1.0, k0)) {
      std::ostringstream os;
      os << "TimeGrid: no node at t = 0 (t_start=" << t_start << ", h=" << h_ << ")";
      throw ConfigError(os.str());
    }
    n_steps_ = n_steps;
    zero_ = static_cast<std::size_t>(k0);
  }

  // Grid covering [-t_back, t_fwd] with step h; both extents are rounded to
  // whole steps.
  static TimeGrid from_step(double t_back, double t_fwd, double h) {
    if (!(h > 0.0) || !(t_back > 0.0) || t_fwd < 0.0) {
      throw ConfigError("TimeGrid::from_step: need h > 0, t_back > 0, t_fwd >= 0");
    }
    const auto back = static_cast<std::size_t>(std::llround(t_back / h));
    const auto fwd = static_cast<std::size_t>(std::llround(t_fwd / h));
    if (back == 0) throw ConfigError("TimeGrid::from_step: t_back shorter than one step");
    return TimeGrid(-static_cast<double>(back) * h, static_cast<double>(fwd) * h, back + fwd);
  }

  double step() const noexcept { return h_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  std::size_t size() const noexcept { return n_steps_ + 1; }
  std::size_t zero_index() const noexcept { return zero_; }

  double time(std::size_t k) const noexcept {
    return (static_cast<double>(k) - static_cast<double>(zero_)) * h_;
  }
  double t_start() const noexcept { return time(0); }
  double t_end() const noexcept { return time(n_steps_); }

  bool contains(double t) const noexcept {
    const double slack = 1e-12 * h_;
    return t >= t_start() - slack && t <= t_end() + slack;
  }

  // Cell index and fractional position of t; t equal to the last node maps to
  // the last cell with fraction 1.
  std::pair<std::size_t, double> locate(double t) const {
    if (!contains(t)) {
      std::ostringstream os;
      os << "time " << t << " outside grid [" << t_start() << ", " << t_end() << "]";
      throw RangeError(os.str());
    }
    const double s = (t - t_start()) / h_;
    auto k = static_cast<std::size_t>(std::floor(std::max(0.0, s)));
    if (k >= n_steps_) k = n_steps_ - 1;
    double frac = s - static_cast<double>(k);
    frac = std::min(1.0, std::max(0.0, frac));
    return {k, frac};
  }

  // Node index of t, which must lie on the grid to within rounding.
  std::size_t node_of(double t) const {
    if (!contains(t)) {
      std::ostringstream os;
      os << "time " << t << " outside grid [" << t_start() << ", " << t_end() << "]";
      throw RangeError(os.str());
    }
    const double s = t / h_ + static_cast<double>(zero_);
    const double k = std::round(s);
    if (std::abs(s - k) > 1e-6) {
      std::ostringstream os;
      os << "time " << t << " is not a grid node";
      throw RangeError(os.str());
    }
    return static_cast<std::size_t>(k);
  }

 private:
  double h_ = 0.0;
  std::size_t n_steps_ = 0;
  std::size_t zero_ = 0;
};

}  // namespace rcm
