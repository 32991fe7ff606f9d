#pragma once

#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "rcm/errors.hpp"

namespace rcm {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int R, int C>
using Mat = Eigen::Matrix<double, R, C>;

using Eigen::Dynamic;

// Zero vector of compile-time size N, or runtime size `dim` when N is Dynamic.
template <int N>
inline Vec<N> zero_vec(int dim) {
  if constexpr (N == Dynamic) {
    return Vec<N>::Zero(dim);
  } else {
    return Vec<N>::Zero();
  }
}

template <int R, int C>
inline Mat<R, C> zero_mat(int rows, int cols) {
  if constexpr (R == Dynamic || C == Dynamic) {
    return Mat<R, C>::Zero(rows, cols);
  } else {
    return Mat<R, C>::Zero();
  }
}

template <typename Derived>
inline bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.allFinite();
}

// Dense matrix exponential (Pade scaling and squaring).
template <typename Derived>
inline Mat<Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> expm(
    const Eigen::MatrixBase<Derived>& a) {
  if (!a.allFinite()) throw ConfigError("expm: non-finite matrix entry");
  Mat<Derived::RowsAtCompileTime, Derived::ColsAtCompileTime> m = a;
  return m.exp();
}

// Spectral norm (largest singular value).
template <typename Derived>
inline double operator_norm(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() == 1 && a.cols() == 1) return std::abs(a(0, 0));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.template cast<double>().eval());
  return svd.singularValues()(0);
}

}  // namespace rcm
