#pragma once

#include <cmath>
#include <cstdint>
#include <functional>

#include "rcm/linalg.hpp"
#include "rcm/noise_paths.hpp"
#include "rcm/system_model.hpp"

namespace rcm {

// dx = eps x o dW, dy = (-y - x^2) dt + eps y o dW with one shared driver.
// Deterministic manifold y = -x^2; Lyapunov exponents 0 and -1.
// L_f is nominal: f is only locally Lipschitz, and the fixed points converge
// for any L_f because the system is triangular (f_s does not depend on y).
template <int N = 1, int M = 1>
CenterStableSpec<N, M> builtin_example(double L_f = 0.2) {
  CenterStableSpec<N, M> s;
  s.A_c = zero_mat<N, N>(1, 1);
  s.A_s = zero_mat<M, M>(1, 1);
  s.A_s(0, 0) = -1.0;
  s.L_f = L_f;
  s.f_c.value = [](const Vec<N>&, const Vec<M>&) { return zero_vec<N>(1); };
  s.f_c.d_x = [](const Vec<N>&, const Vec<M>&) { return zero_mat<N, N>(1, 1); };
  s.f_c.d_y = [](const Vec<N>&, const Vec<M>&) { return zero_mat<N, M>(1, 1); };
  s.f_c.d_xx = [](const Vec<N>&, const Vec<M>&, const Vec<N>&, const Vec<N>&) { return zero_vec<N>(1); };
  s.f_c.d_xy = [](const Vec<N>&, const Vec<M>&, const Vec<N>&, const Vec<M>&) { return zero_vec<N>(1); };
  s.f_c.d_yy = [](const Vec<N>&, const Vec<M>&, const Vec<M>&, const Vec<M>&) { return zero_vec<N>(1); };
  s.f_s.value = [](const Vec<N>& x, const Vec<M>&) {
    Vec<M> v = zero_vec<M>(1);
    v(0) = -x(0) * x(0);
    return v;
  };
  s.f_s.d_x = [](const Vec<N>& x, const Vec<M>&) {
    Mat<M, N> j = zero_mat<M, N>(1, 1);
    j(0, 0) = -2.0 * x(0);
    return j;
  };
  s.f_s.d_y = [](const Vec<N>&, const Vec<M>&) { return zero_mat<M, M>(1, 1); };
  s.f_s.d_xx = [](const Vec<N>&, const Vec<M>&, const Vec<N>& a, const Vec<N>& b) {
    Vec<M> v = zero_vec<M>(1);
    v(0) = -2.0 * a(0) * b(0);
    return v;
  };
  s.f_s.d_xy = [](const Vec<N>&, const Vec<M>&, const Vec<N>&, const Vec<M>&) { return zero_vec<M>(1); };
  s.f_s.d_yy = [](const Vec<N>&, const Vec<M>&, const Vec<M>&, const Vec<M>&) { return zero_vec<M>(1); };
  return s;
}

inline TrichotomyParams example_trichotomy() { return TrichotomyParams{1.0, 1.0, 0.0}; }

// Path functionals entering the closed forms, all over the window [-T, 0] of
// one shared Wiener path.
struct ExampleClosedForms {
  WienerPath w;
  OUPath ou;
  double T = 0.0;
  double z = 0.0;          // OU value at t = 0
  double exp_int = 0.0;    // int e^u dW_u
  double inner_exp = 0.0;  // int int_{u<v} e^u dW_u dW_v
  double wedge = 0.0;      // int int_{v<u<0} e^v (u - v) dW_u dW_v
  double exp_w2 = 0.0;     // int e^u W(u)^2 du (trapezoid on the nodes)

  static ExampleClosedForms from_path(const WienerPath& w, const OUPath& ou, double T) {
    ExampleClosedForms f{w, ou, T};
    f.recompute();
    return f;
  }

  void recompute() {
    z = ou.at_zero();
    exp_int = exp_integral(w, -T);
    inner_exp = ito_double_integral(w, IteratedKernel::inner_exp, -T);
    wedge = ito_double_integral(w, IteratedKernel::wedge, -T);
    const TimeGrid& g = w.grid;
    const std::size_t first = g.node_of(-T);
    const std::size_t last = g.zero_index();
    exp_w2 = 0.0;
    for (std::size_t k = first; k < last; ++k) {
      const double a = std::exp(g.time(k)) * w.values[k] * w.values[k];
      const double b = std::exp(g.time(k + 1)) * w.values[k + 1] * w.values[k + 1];
      exp_w2 += 0.5 * g.step() * (a + b);
    }
  }
};

inline double closed_Hd(double xi) { return -xi * xi; }

inline double closed_H1(const ExampleClosedForms& f, double xi) { return xi * xi * f.exp_int; }

// Second-order coefficient in the iterated-integral form
// xi^2 [z^2/2 - 4 inner_exp + (int e^u dW)^2 + 2 wedge].
inline double closed_H2(const ExampleClosedForms& f, double xi) {
  return xi * xi * (0.5 * f.z * f.z - 4.0 * f.inner_exp + f.exp_int * f.exp_int + 2.0 * f.wedge);
}

// Second-order coefficient obtained by expanding the exact solution
// H^eps(xi) = -xi^2 int e^u e^{eps W(u)} du of the shared-driver example:
// -(xi^2 / 2) int e^u W(u)^2 du.
inline double brownian_H2(const ExampleClosedForms& f, double xi) { return -0.5 * xi * xi * f.exp_w2; }

inline std::function<double(double)> deterministic_reference() { return [](double xi) { return closed_Hd(xi); }; }

}  // namespace rcm
