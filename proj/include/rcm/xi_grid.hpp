#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/linalg.hpp"

namespace rcm {

struct XiAxis {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t count = 41;

  double spacing() const { return (hi - lo) / static_cast<double>(count - 1); }
  double coord(std::size_t i) const {
    if (i + 1 == count) return hi;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
};

// Tensor-product grid of sample points xi in R^n; the first axis varies
// fastest in the flat index.
class XiGrid {
 public:
  XiGrid() = default;
  explicit XiGrid(std::vector<XiAxis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw ConfigError("XiGrid: need at least one axis");
    for (const auto& a : axes_) {
      if (!(a.hi > a.lo) || a.count < 2) throw ConfigError("XiGrid: each axis needs hi > lo and >= 2 points");
    }
  }

  static XiGrid uniform(int dim, double lo, double hi, std::size_t count) {
    return XiGrid(std::vector<XiAxis>(static_cast<std::size_t>(dim), XiAxis{lo, hi, count}));
  }

  int dim() const { return static_cast<int>(axes_.size()); }
  const XiAxis& axis(int j) const { return axes_[static_cast<std::size_t>(j)]; }

  std::size_t size() const {
    std::size_t s = 1;
    for (const auto& a : axes_) s *= a.count;
    return s;
  }

  std::size_t stride(int j) const {
    std::size_t s = 1;
    for (int i = 0; i < j; ++i) s *= axes_[static_cast<std::size_t>(i)].count;
    return s;
  }

  std::size_t index_along(std::size_t flat, int j) const {
    return (flat / stride(j)) % axes_[static_cast<std::size_t>(j)].count;
  }

  template <int N = Dynamic>
  Vec<N> point(std::size_t flat) const {
    Vec<N> p = zero_vec<N>(dim());
    for (int j = 0; j < dim(); ++j) p(j) = axes_[static_cast<std::size_t>(j)].coord(index_along(flat, j));
    return p;
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& xi) const {
    if (xi.size() != dim()) return false;
    for (int j = 0; j < dim(); ++j) {
      const auto& a = axes_[static_cast<std::size_t>(j)];
      const double slack = 1e-12 * (a.hi - a.lo);
      if (!(xi(j) >= a.lo - slack && xi(j) <= a.hi + slack)) return false;
    }
    return true;
  }

 private:
  std::vector<XiAxis> axes_;
};

// Values of an R^M-valued function on an XiGrid, with finite-difference
// derivative tables (central inside, second-order one-sided at the edges) and
// interpolation: cubic Hermite through the difference slopes for n = 1,
// multilinear for n > 1.
template <int N, int M>
class GridTable {
 public:
  GridTable() = default;
  GridTable(XiGrid grid, std::vector<Vec<M>> values, int out_dim)
      : grid_(std::move(grid)), values_(std::move(values)), out_dim_(out_dim) {
    if (values_.size() != grid_.size()) throw ConfigError("GridTable: value count does not match grid");
    for (int j = 0; j < grid_.dim(); ++j) {
      if (grid_.axis(j).count < 3) {
        throw ConfigError("GridTable: derivatives need at least 3 points per axis");
      }
    }
    jac_.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
      Mat<M, N> J = zero_mat<M, N>(out_dim_, grid_.dim());
      for (int j = 0; j < grid_.dim(); ++j) J.col(j) = axis_derivative(values_, i, j);
      jac_.push_back(std::move(J));
    }
  }

  const XiGrid& grid() const { return grid_; }
  const std::vector<Vec<M>>& values() const { return values_; }
  const Vec<M>& at(std::size_t i) const { return values_[i]; }
  const Mat<M, N>& jacobian_at(std::size_t i) const { return jac_[i]; }
  int out_dim() const { return out_dim_; }

  // sum_ij d_i d_j f(xi_i) dir_i dir_j, with the Hessian taken as differences
  // of the Jacobian table.
  Vec<M> second_form_at(std::size_t i, const Vec<N>& dir) const {
    Vec<M> out = zero_vec<M>(out_dim_);
    for (int a = 0; a < grid_.dim(); ++a) {
      // d/d xi_b of the a-th Jacobian column.
      for (int b = 0; b < grid_.dim(); ++b) {
        const Vec<M> dab = column_derivative(i, a, b);
        out += dab * (dir(a) * dir(b));
      }
    }
    return out;
  }

  template <typename Derived>
  Vec<M> value(const Eigen::MatrixBase<Derived>& xi) const {
    if (!grid_.contains(xi)) {
      std::ostringstream os;
      os << "xi = (" << xi.transpose() << ") outside the tabulated range";
      throw RangeError(os.str());
    }
    if (grid_.dim() == 1) return hermite(xi(0));
    return multilinear(xi);
  }

 private:
  // d/d xi_j at node i of a field sampled on the grid; `at(p)` reads node p.
  // Fourth-order stencils (one-sided near the ends) when the axis has at
  // least five points, second order otherwise.
  template <typename At>
  Vec<M> difference(std::size_t i, int j, const At& at) const {
    const XiAxis& ax = grid_.axis(j);
    const std::size_t s = grid_.stride(j);
    const std::size_t k = grid_.index_along(i, j);
    const std::size_t last = ax.count - 1;
    const double d = ax.spacing();
    auto f = [&](std::ptrdiff_t off) -> Vec<M> {
      return at(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off * static_cast<std::ptrdiff_t>(s)));
    };
    if (ax.count < 5) {
      if (k == 0) return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * d);
      if (k == last) return (3.0 * f(0) - 4.0 * f(-1) + f(-2)) / (2.0 * d);
      return (f(1) - f(-1)) / (2.0 * d);
    }
    const double w = 12.0 * d;
    if (k == 0) return (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) / w;
    if (k == 1) return (-3.0 * f(-1) - 10.0 * f(0) + 18.0 * f(1) - 6.0 * f(2) + f(3)) / w;
    if (k == last) return (25.0 * f(0) - 48.0 * f(-1) + 36.0 * f(-2) - 16.0 * f(-3) + 3.0 * f(-4)) / w;
    if (k + 1 == last) return (3.0 * f(1) + 10.0 * f(0) - 18.0 * f(-1) + 6.0 * f(-2) - f(-3)) / w;
    return (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / w;
  }

  Vec<M> axis_derivative(const std::vector<Vec<M>>& f, std::size_t i, int j) const {
    return difference(i, j, [&](std::size_t p) -> Vec<M> { return f[p]; });
  }

  Vec<M> column_derivative(std::size_t i, int a, int b) const {
    return difference(i, b, [&](std::size_t p) -> Vec<M> { return jac_[p].col(a); });
  }

  std::pair<std::size_t, double> locate(int j, double x) const {
    const XiAxis& ax = grid_.axis(j);
    const double s = (x - ax.lo) / ax.spacing();
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(s)));
    if (k >= ax.count - 1) k = ax.count - 2;
    const double t = std::min(1.0, std::max(0.0, s - static_cast<double>(k)));
    return {k, t};
  }

  Vec<M> hermite(double x) const {
    const auto [k, t] = locate(0, x);
    const double d = grid_.axis(0).spacing();
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * values_[k] + h10 * d * jac_[k].col(0) + h01 * values_[k + 1] + h11 * d * jac_[k + 1].col(0);
  }

  template <typename Derived>
  Vec<M> multilinear(const Eigen::MatrixBase<Derived>& xi) const {
    const int n = grid_.dim();
    std::vector<std::size_t> base(static_cast<std::size_t>(n));
    std::vector<double> frac(static_cast<std::size_t>(n));
    std::size_t flat0 = 0;
    for (int j = 0; j < n; ++j) {
      const auto [k, t] = locate(j, xi(j));
      base[static_cast<std::size_t>(j)] = k;
      frac[static_cast<std::size_t>(j)] = t;
      flat0 += k * grid_.stride(j);
    }
    Vec<M> out = zero_vec<M>(out_dim_);
    for (std::size_t corner = 0; corner < (std::size_t{1} << n); ++corner) {
      double w = 1.0;
      std::size_t flat = flat0;
      for (int j = 0; j < n; ++j) {
        const bool up = (corner >> j) & 1U;
        const double t = frac[static_cast<std::size_t>(j)];
        w *= up ? t : 1.0 - t;
        if (up) flat += grid_.stride(j);
      }
      if (w != 0.0) out += w * values_[flat];
    }
    return out;
  }

  XiGrid grid_;
  std::vector<Vec<M>> values_;
  std::vector<Mat<M, N>> jac_;
  int out_dim_ = 0;
};

}  // namespace rcm
