#pragma once

#include <cmath>
#include <utility>

#include "rcm/errors.hpp"
#include "rcm/noise_paths.hpp"
#include "rcm/system_model.hpp"

namespace rcm {

// Random change of variables (x, y) -> (e^{-eps z1(w)} x, e^{-eps z2(w)} y)
// between the Stratonovich system and its random ODE form.
struct ConjugacyContext {
  double eps = 0.0;
  double z1_at_0 = 0.0;
  double z2_at_0 = 0.0;
  bool shared_driver = false;

  static ConjugacyContext from_paths(double eps, const OUPath& ou1, const OUPath& ou2, bool shared) {
    ConjugacyContext ctx{eps, ou1.at_zero(), ou2.at_zero(), shared};
    ctx.validate();
    return ctx;
  }

  void validate() const {
    if (!(eps >= 0.0)) throw ConfigError("ConjugacyContext: eps must be >= 0");
    if (!std::isfinite(z1_at_0) || !std::isfinite(z2_at_0)) {
      throw ConfigError("ConjugacyContext: z values must be finite");
    }
  }
};

template <int N, int M>
std::pair<Vec<N>, Vec<M>> forward_transform(const ConjugacyContext& ctx, const Vec<N>& x, const Vec<M>& y) {
  return {std::exp(-ctx.eps * ctx.z1_at_0) * x, std::exp(-ctx.eps * ctx.z2_at_0) * y};
}

template <int N, int M>
std::pair<Vec<N>, Vec<M>> inverse_transform(const ConjugacyContext& ctx, const Vec<N>& X, const Vec<M>& Y) {
  return {std::exp(ctx.eps * ctx.z1_at_0) * X, std::exp(ctx.eps * ctx.z2_at_0) * Y};
}

// F_c = e^{-eps z1} f_c(e^{eps z1} X, e^{eps z2} Y), F_s likewise with the
// e^{-eps z2} prefactor, at given noise values z1, z2.
template <int N, int M>
std::pair<Vec<N>, Vec<M>> transformed_nonlinearity_at(const CenterStableSpec<N, M>& spec, double eps, double z1,
                                                      double z2, const Vec<N>& X, const Vec<M>& Y) {
  const double e1 = std::exp(eps * z1);
  const double e2 = std::exp(eps * z2);
  const Vec<N> x = e1 * X;
  const Vec<M> y = e2 * Y;
  return {spec.f_c.value(x, y) / e1, spec.f_s.value(x, y) / e2};
}

template <int N, int M>
std::pair<Vec<N>, Vec<M>> transformed_nonlinearity(const CenterStableSpec<N, M>& spec, const OUPath& ou1,
                                                   const OUPath& ou2, double eps, double t, const Vec<N>& X,
                                                   const Vec<M>& Y) {
  return transformed_nonlinearity_at(spec, eps, z_at(ou1, t), z_at(ou2, t), X, Y);
}

}  // namespace rcm
