#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/errors.hpp"
#include "rcm/linalg.hpp"
#include "rcm/system_model.hpp"

namespace rcm {

// coeff * prod_i u_i^{exps_i}, u = (x, y), contributing to output `out`.
struct Monomial {
  int out = 0;
  double coeff = 0.0;
  std::vector<int> exps;
};

namespace detail {

inline double ipow(double b, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// d^{|D|} / du^D of the monomial, D given as a multiset of up to two indices.
inline double monomial_derivative(const Monomial& t, const Eigen::VectorXd& u, int i = -1, int j = -1) {
  double c = t.coeff;
  std::vector<int> e = t.exps;
  for (int d : {i, j}) {
    if (d < 0) continue;
    const auto k = static_cast<std::size_t>(d);
    if (e[k] == 0) return 0.0;
    c *= e[k];
    --e[k];
  }
  for (std::size_t k = 0; k < e.size(); ++k) c *= ipow(u(static_cast<Eigen::Index>(k)), e[k]);
  return c;
}

template <int N, int M>
Eigen::VectorXd stack(const Vec<N>& x, const Vec<M>& y) {
  Eigen::VectorXd u(x.size() + y.size());
  u << x, y;
  return u;
}

}  // namespace detail

// Polynomial block map with exact derivatives. Terms index u = (x, y) with the
// n center coordinates first.
template <int N, int M, int Out>
BlockMap<N, M, Out> polynomial_map(const std::vector<Monomial>& terms, int n, int m, int out_dim) {
  for (const auto& t : terms) {
    if (t.out < 0 || t.out >= out_dim) throw ConfigError("polynomial term: output index out of range");
    if (static_cast<int>(t.exps.size()) != n + m) {
      throw ConfigError("polynomial term: need one exponent per coordinate of (x, y)");
    }
    for (int e : t.exps) {
      if (e < 0) throw ConfigError("polynomial term: negative exponent");
    }
    if (!std::isfinite(t.coeff)) throw ConfigError("polynomial term: non-finite coefficient");
  }
  using XVec = Vec<N>;
  using YVec = Vec<M>;
  using OutVec = Vec<Out>;
  BlockMap<N, M, Out> f;
  f.value = [=](const XVec& x, const YVec& y) {
    const Eigen::VectorXd u = detail::stack<N, M>(x, y);
    OutVec v = zero_vec<Out>(out_dim);
    for (const auto& t : terms) v(t.out) += detail::monomial_derivative(t, u);
    return v;
  };
  f.d_x = [=](const XVec& x, const YVec& y) {
    const Eigen::VectorXd u = detail::stack<N, M>(x, y);
    Mat<Out, N> jac = zero_mat<Out, N>(out_dim, n);
    for (const auto& t : terms) {
      for (int j = 0; j < n; ++j) jac(t.out, j) += detail::monomial_derivative(t, u, j);
    }
    return jac;
  };
  f.d_y = [=](const XVec& x, const YVec& y) {
    const Eigen::VectorXd u = detail::stack<N, M>(x, y);
    Mat<Out, M> jac = zero_mat<Out, M>(out_dim, m);
    for (const auto& t : terms) {
      for (int j = 0; j < m; ++j) jac(t.out, j) += detail::monomial_derivative(t, u, n + j);
    }
    return jac;
  };
  // Bilinear form over coordinate offsets (oa, ob) into u.
  auto form = [=](const Eigen::VectorXd& u, int oa, const Eigen::VectorXd& a, int ob, const Eigen::VectorXd& b) {
    OutVec v = zero_vec<Out>(out_dim);
    for (const auto& t : terms) {
      for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) == 0.0) continue;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
          if (b(j) == 0.0) continue;
          v(t.out) += detail::monomial_derivative(t, u, oa + static_cast<int>(i), ob + static_cast<int>(j)) * a(i) *
                      b(j);
        }
      }
    }
    return v;
  };
  f.d_xx = [=](const XVec& x, const YVec& y, const XVec& a, const XVec& b) {
    return form(detail::stack<N, M>(x, y), 0, a, 0, b);
  };
  f.d_xy = [=](const XVec& x, const YVec& y, const XVec& a, const YVec& b) {
    return form(detail::stack<N, M>(x, y), 0, a, n, b);
  };
  f.d_yy = [=](const XVec& x, const YVec& y, const YVec& a, const YVec& b) {
    return form(detail::stack<N, M>(x, y), n, a, n, b);
  };
  return f;
}

// Parses `out coeff e_1 ... e_{n+m}` terms separated by ';'.
inline std::vector<Monomial> parse_monomials(const std::string& text, int n, int m) {
  std::vector<Monomial> terms;
  std::stringstream all(text);
  std::string chunk;
  while (std::getline(all, chunk, ';')) {
    std::istringstream in(chunk);
    Monomial t;
    if (!(in >> t.out)) continue;  // blank term
    if (!(in >> t.coeff)) throw ConfigError("polynomial term '" + chunk + "': missing coefficient");
    int e = 0;
    while (in >> e) t.exps.push_back(e);
    if (!in.eof()) throw ConfigError("polynomial term '" + chunk + "': unreadable exponent");
    if (static_cast<int>(t.exps.size()) != n + m) {
      throw ConfigError("polynomial term '" + chunk + "': expected " + std::to_string(n + m) + " exponents");
    }
    terms.push_back(std::move(t));
  }
  return terms;
}

}  // namespace rcm
