#pragma once

#include <cstdint>

#include "rcm/rcm.hpp"

namespace rcm::testing {

// Coarse window shared by most unit tests.
inline ExpansionConfig coarse_config(double h = 0.02, double T = 12.0) {
  ExpansionConfig c;
  c.h = h;
  c.T_trunc = T;
  c.eta = 0.5;
  return c;
}

struct SharedPath {
  WienerPath w;
  OUPath ou;
};

inline SharedPath shared_path(std::uint64_t seed, double h, double back, double fwd = 2.0) {
  const TimeGrid g = TimeGrid::from_step(back, fwd, h);
  WienerPath w = generate_wiener(seed, g, 0);
  OUPath ou = ou_from_wiener(w, OuInit::stationary_sample);
  return SharedPath{std::move(w), std::move(ou)};
}

inline Vec<1> v1(double x) {
  Vec<1> v;
  v << x;
  return v;
}

// dx = 0, dy = -y + (linear forcing only): no nonlinearity at all.
inline CenterStableSpec<1, 1> linear_spec() {
  CenterStableSpec<1, 1> s = builtin_example<1, 1>();
  s.f_s = s.f_c;  // zero map with zero derivatives, reused for the stable block
  s.f_s.value = [](const Vec<1>&, const Vec<1>&) { return Vec<1>::Zero().eval(); };
  s.f_s.d_x = [](const Vec<1>&, const Vec<1>&) { return Mat<1, 1>::Zero().eval(); };
  s.f_s.d_y = [](const Vec<1>&, const Vec<1>&) { return Mat<1, 1>::Zero().eval(); };
  return s;
}

}  // namespace rcm::testing
