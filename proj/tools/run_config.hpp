#pragma once

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/rcm.hpp"

namespace rcm::cli {

struct SystemSection {
  std::string model = "builtin_example";  // or "polynomial"
  int n = 1;
  int m = 1;
  std::vector<double> A_c{0.0};
  std::vector<double> A_s{-1.0};
  std::string f_c;
  std::string f_s;
  double L_f = 0.2;
  std::optional<double> cutoff_R;
  bool shared_driver = true;
};

struct GridSection {
  double T_back = 25.0;
  double T_fwd = 3.0;
  double h = 0.005;
};

struct RunSection {
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> eps_list{0.2, 0.1, 0.05, 0.025};
  std::vector<double> xi_eval{0.7};
  double horizon = 2.0;
  double sample_every = 0.1;
  double lyapunov_T = 50.0;
  double lyapunov_eps = 0.05;
  std::vector<double> figure_eps{0.0, 0.05};
  std::uint64_t figure_seed = 1;
  std::vector<double> export_hierarchy_xi;
};

struct RunConfig {
  SystemSection system;
  TrichotomyParams trichotomy;
  GridSection grid;
  ExpansionConfig expansion;
  Inversion inversion = Inversion::full;
  XiAxis xi;
  RunSection run;
};

namespace detail {

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  std::vector<T> out;
  T v{};
  while (in >> v) out.push_back(v);
  if (!in.eof()) throw ConfigError("config key '" + key + "': unreadable list entry");
  return out;
}

inline double finite(const std::string& key, double v) {
  if (!std::isfinite(v)) throw ConfigError("config key '" + key + "' must be finite");
  return v;
}

class Reader {
 public:
  explicit Reader(const boost::property_tree::ptree& pt) : pt_(pt) {}

  double number(const std::string& key, double fallback) const {
    const auto s = pt_.get_optional<std::string>(key);
    if (!s) return fallback;
    try {
      std::size_t used = 0;
      const double v = std::stod(*s, &used);
      if (s->find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("trailing text");
      return finite(key, v);
    } catch (const std::logic_error&) {
      throw ConfigError("config key '" + key + "': not a number: '" + *s + "'");
    }
  }

  int integer(const std::string& key, int fallback) const {
    const double v = number(key, fallback);
    if (v != std::floor(v)) throw ConfigError("config key '" + key + "' must be an integer");
    return static_cast<int>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    return pt_.get<std::string>(key, fallback);
  }

  bool flag(const std::string& key, bool fallback) const {
    const auto s = pt_.get_optional<std::string>(key);
    if (!s) return fallback;
    if (*s == "true" || *s == "1" || *s == "yes") return true;
    if (*s == "false" || *s == "0" || *s == "no") return false;
    throw ConfigError("config key '" + key + "': expected true or false");
  }

  template <typename T>
  std::vector<T> list(const std::string& key, const std::vector<T>& fallback) const {
    const auto s = pt_.get_optional<std::string>(key);
    if (!s) return fallback;
    return parse_list<T>(key, *s);
  }

 private:
  const boost::property_tree::ptree& pt_;
};

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::ini_parser::read_ini(in, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  const detail::Reader r(pt);
  RunConfig c;

  c.system.model = r.text("system.model", c.system.model);
  if (c.system.model != "builtin_example" && c.system.model != "polynomial") {
    throw ConfigError("system.model must be builtin_example or polynomial");
  }
  c.system.L_f = r.number("system.L_f", c.system.L_f);
  c.system.shared_driver = r.flag("system.shared_driver", c.system.model == "builtin_example");
  if (pt.get_optional<std::string>("system.cutoff_R")) c.system.cutoff_R = r.number("system.cutoff_R", 0.0);
  if (c.system.model == "polynomial") {
    c.system.n = r.integer("system.n", 1);
    c.system.m = r.integer("system.m", 1);
    if (c.system.n < 1 || c.system.m < 1) throw ConfigError("system.n and system.m must be >= 1");
    c.system.A_c = r.list<double>("system.A_c", {});
    c.system.A_s = r.list<double>("system.A_s", {});
    for (double v : c.system.A_c) detail::finite("system.A_c", v);
    for (double v : c.system.A_s) detail::finite("system.A_s", v);
    if (static_cast<int>(c.system.A_c.size()) != c.system.n * c.system.n ||
        static_cast<int>(c.system.A_s.size()) != c.system.m * c.system.m) {
      throw ConfigError("system.A_c / system.A_s must list n*n / m*m entries (row-major)");
    }
    c.system.f_c = r.text("system.f_c", "");
    c.system.f_s = r.text("system.f_s", "");
  }

  c.trichotomy.K = r.number("trichotomy.K", c.trichotomy.K);
  c.trichotomy.beta = r.number("trichotomy.beta", c.trichotomy.beta);
  c.trichotomy.gamma = r.number("trichotomy.gamma", c.trichotomy.gamma);
  c.trichotomy.validate();

  c.grid.T_back = r.number("grid.T_back", c.grid.T_back);
  c.grid.T_fwd = r.number("grid.T_fwd", c.grid.T_fwd);
  c.grid.h = r.number("grid.h", c.grid.h);
  if (!(c.grid.T_back > 0.0) || !(c.grid.T_fwd >= 0.0) || !(c.grid.h > 0.0)) {
    throw ConfigError("grid: need T_back > 0, T_fwd >= 0, h > 0");
  }

  auto& e = c.expansion;
  e.h = c.grid.h;
  e.fp_tol = r.number("expansion.fp_tol", e.fp_tol);
  e.eta = r.number("expansion.eta", 0.5 * (c.trichotomy.beta + c.trichotomy.gamma));
  e.T_trunc = r.number("expansion.T_trunc",
                       ExpansionConfig::default_truncation(e.fp_tol, c.trichotomy.beta, e.eta));
  e.fp_max_iters = r.integer("expansion.fp_max_iters", e.fp_max_iters);
  e.fp_damping = r.number("expansion.fp_damping", e.fp_damping);
  e.fd_step = r.number("expansion.fd_step", e.fd_step);
  e.validate(c.trichotomy);
  if (e.T_trunc > c.grid.T_back + 1e-12) throw ConfigError("expansion.T_trunc exceeds grid.T_back");
  const std::string inv = r.text("expansion.inversion", "full");
  if (inv == "full") {
    c.inversion = Inversion::full;
  } else if (inv == "without_curvature") {
    c.inversion = Inversion::without_curvature;
  } else {
    throw ConfigError("expansion.inversion must be full or without_curvature");
  }

  c.xi.lo = r.number("xi.lo", c.xi.lo);
  c.xi.hi = r.number("xi.hi", c.xi.hi);
  const int count = r.integer("xi.count", static_cast<int>(c.xi.count));
  if (count < 3 || !(c.xi.hi > c.xi.lo)) throw ConfigError("xi: need hi > lo and count >= 3");
  c.xi.count = static_cast<std::size_t>(count);

  auto& run = c.run;
  run.seeds = r.list<std::uint64_t>("run.seeds", run.seeds);
  if (run.seeds.empty()) throw ConfigError("run.seeds must not be empty");
  run.eps_list = r.list<double>("run.eps_list", run.eps_list);
  for (double v : run.eps_list) {
    if (!(detail::finite("run.eps_list", v) >= 0.0)) throw ConfigError("run.eps_list entries must be >= 0");
  }
  run.xi_eval = r.list<double>("run.xi_eval", std::vector<double>(static_cast<std::size_t>(c.system.n), 0.7));
  if (static_cast<int>(run.xi_eval.size()) != c.system.n) throw ConfigError("run.xi_eval needs n entries");
  run.horizon = r.number("run.horizon", run.horizon);
  run.sample_every = r.number("run.sample_every", run.sample_every);
  run.lyapunov_T = r.number("run.lyapunov_T", run.lyapunov_T);
  run.lyapunov_eps = r.number("run.lyapunov_eps", run.lyapunov_eps);
  run.figure_eps = r.list<double>("run.figure_eps", run.figure_eps);
  run.figure_seed = static_cast<std::uint64_t>(r.integer("run.figure_seed", static_cast<int>(run.figure_seed)));
  run.export_hierarchy_xi = r.list<double>("run.export_hierarchy_xi", {});
  if (!run.export_hierarchy_xi.empty() && static_cast<int>(run.export_hierarchy_xi.size()) != c.system.n) {
    throw ConfigError("run.export_hierarchy_xi needs n entries");
  }
  if (!(run.horizon > 0.0) || !(run.sample_every > 0.0) || !(run.lyapunov_T > 0.0)) {
    throw ConfigError("run: horizon, sample_every and lyapunov_T must be > 0");
  }
  return c;
}

// Model described by the [system] section, with the cutoff applied if given.
template <int N, int M>
CenterStableSpec<N, M> make_spec(const SystemSection& s) {
  CenterStableSpec<N, M> spec;
  if (s.model == "builtin_example") {
    spec = builtin_example<N, M>(s.L_f);
  } else {
    spec.A_c = Eigen::Map<const Eigen::Matrix<double, Dynamic, Dynamic, Eigen::RowMajor>>(s.A_c.data(), s.n, s.n);
    spec.A_s = Eigen::Map<const Eigen::Matrix<double, Dynamic, Dynamic, Eigen::RowMajor>>(s.A_s.data(), s.m, s.m);
    spec.f_c = polynomial_map<N, M, N>(parse_monomials(s.f_c, s.n, s.m), s.n, s.m, s.n);
    spec.f_s = polynomial_map<N, M, M>(parse_monomials(s.f_s, s.n, s.m), s.n, s.m, s.m);
    spec.L_f = s.L_f;
  }
  spec.validate();
  if (s.cutoff_R) spec = apply_cutoff(spec, *s.cutoff_R);
  return spec;
}

}  // namespace rcm::cli
