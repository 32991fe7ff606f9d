// rcm: command-line runner for random center manifold expansions.

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rcm/rcm.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace rcm;
using rcm::cli::RunConfig;

namespace {

// Exit status 1: a scientific check failed (report written).
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Short form for file names (six significant digits).
std::string label(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << content;
}

// Key-value manifest; the timestamp line is the only non-reproducible entry.
class Manifest {
 public:
  void set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
  }
  void write(const fs::path& p) const {
    std::ostringstream os;
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    os << "timestamp = " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
    for (const auto& [name, entries] : sections_) {
      os << '\n' << '[' << name << "]\n";
      for (const auto& [k, v] : entries) os << k << " = " << v << '\n';
    }
    write_file(p, os.str());
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

struct Paths {
  WienerPath w1, w2;
  OUPath ou1, ou2;
};

Paths make_paths(const RunConfig& c, std::uint64_t seed, double t_back, double t_fwd) {
  const TimeGrid g = TimeGrid::from_step(t_back, t_fwd, c.grid.h);
  WienerPath w1 = generate_wiener(seed, g, 0);
  WienerPath w2 = c.system.shared_driver ? w1 : generate_wiener(seed, g, 1);
  OUPath ou1 = ou_from_wiener(w1, OuInit::stationary_sample);
  OUPath ou2 = c.system.shared_driver ? ou1 : ou_from_wiener(w2, OuInit::stationary_sample);
  return Paths{std::move(w1), std::move(w2), std::move(ou1), std::move(ou2)};
}

template <int N>
Vec<N> to_vec(const std::vector<double>& v) {
  Vec<N> out = zero_vec<N>(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

std::string seed_tag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

struct Options {
  std::string command;
  std::string config;
  std::string out = ".";
  int workers = 0;
  std::uint64_t seed_offset = 0;
};

template <int N, int M>
class Runner {
 public:
  Runner(const RunConfig& c, const Options& o)
      : c_(c), o_(o), spec_(cli::make_spec<N, M>(c.system)), workers_(resolve_workers(o.workers)) {
    for (auto s : c.run.seeds) seeds_.push_back(s + o.seed_offset);
    out_ = o.out;
    fs::create_directories(out_);
    manifest_.set("run", "command", o.command);
    manifest_.set("run", "config", o.config);
    manifest_.set("run", "workers", std::to_string(workers_));
    std::string seeds;
    for (auto s : seeds_) seeds += (seeds.empty() ? "" : " ") + std::to_string(s);
    manifest_.set("run", "seeds", seeds);
  }

  int run() {
    int status = 0;
    try {
      if (o_.command == "trichotomy") status = trichotomy();
      if (o_.command == "expand") status = expand();
      if (o_.command == "oracle") status = oracle();
      if (o_.command == "order-study") status = order_study();
      if (o_.command == "invariance") status = invariance();
      if (o_.command == "figure1") status = figure1();
    } catch (const DivergenceError& e) {
      fail(e.what());
      return 1;
    } catch (const InstabilityError& e) {
      fail(e.what());
      return 1;
    }
    manifest_.set("run", "status", status == 0 ? "ok" : "check_failed");
    manifest_.write(out_ / "manifest.ini");
    return status;
  }

 private:
  void fail(const std::string& why) {
    manifest_.set("run", "status", "failed");
    manifest_.set("run", "error", why);
    manifest_.set("run", "partial_outputs", "true");
    manifest_.write(out_ / "manifest.ini");
    std::cerr << "rcm: " << why << '\n';
  }

  XiGrid xi_grid() const { return XiGrid(std::vector<XiAxis>(static_cast<std::size_t>(spec_.n()), c_.xi)); }

  Paths paths(std::uint64_t seed) const { return make_paths(c_, seed, c_.grid.T_back, c_.grid.T_fwd); }

  const DeterministicManifold<N, M>& deterministic() {
    if (!Hd_) Hd_ = deterministic_center_manifold(spec_, xi_grid(), c_.expansion);
    return *Hd_;
  }

  ManifoldExpansion<N, M> expansion(const Paths& p) {
    return build_expansion(spec_, xi_grid(), p.ou1, p.ou2, c_.expansion, deterministic(),
                           BuildOptions{c_.inversion, 1});
  }

  int trichotomy() {
    std::vector<double> samples;
    for (int i = -100; i <= 100; ++i) samples.push_back(0.1 * i);
    const HypothesisReport hyp = verify_hypothesis_H(spec_, c_.trichotomy, samples);
    const GapReport gap = gap_condition(c_.trichotomy, spec_.L_f);
    std::vector<double> lc(seeds_.size()), ls(seeds_.size());
    const double T = c_.run.lyapunov_T;
    parallel_for(seeds_.size(), workers_, [&](std::size_t i) {
      const Paths p = make_paths(c_, seeds_[i], c_.grid.h, T);
      Eigen::VectorXd vc = Eigen::VectorXd::Zero(spec_.n() + spec_.m());
      Eigen::VectorXd vs = vc;
      vc(0) = 1.0;
      vs(spec_.n()) = 1.0;
      lc[i] = estimate_lyapunov(spec_, p.ou1, p.ou2, c_.run.lyapunov_eps, vc, T);
      ls[i] = estimate_lyapunov(spec_, p.ou1, p.ou2, c_.run.lyapunov_eps, vs, T);
    });
    double mc = 0.0, ms = 0.0;
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
      mc += lc[i] / static_cast<double>(seeds_.size());
      ms += ls[i] / static_cast<double>(seeds_.size());
    }
    std::ostringstream os;
    os << std::setprecision(17);
    os << "hypothesis_H " << (hyp.pass ? "pass" : "fail") << '\n'
       << "center_violation " << hyp.center_violation << '\n'
       << "stable_violation " << hyp.stable_violation << '\n'
       << "required_K " << hyp.required_K << '\n'
       << "gap_condition " << (gap.holds ? "pass" : "fail") << '\n'
       << "gap_margin " << gap.margin << '\n'
       << "eta_star " << gap.eta_star << '\n'
       << "seed lambda_center lambda_stable\n";
    for (std::size_t i = 0; i < seeds_.size(); ++i) os << seeds_[i] << ' ' << lc[i] << ' ' << ls[i] << '\n';
    os << "mean " << mc << ' ' << ms << '\n';
    write_file(out_ / "trichotomy.txt", os.str());
    manifest_.set("trichotomy", "hypothesis_H", hyp.pass ? "pass" : "fail");
    manifest_.set("trichotomy", "gap_margin", num(gap.margin));
    manifest_.set("trichotomy", "eta_star", num(gap.eta_star));
    manifest_.set("trichotomy", "lambda_center_mean", num(mc));
    manifest_.set("trichotomy", "lambda_stable_mean", num(ms));
    std::cout << os.str();
    return hyp.pass && gap.holds ? 0 : 1;
  }

  int expand() {
    std::vector<std::string> tables(seeds_.size()), hier(seeds_.size());
    deterministic();
    parallel_for(seeds_.size(), workers_, [&](std::size_t i) {
      const Paths p = paths(seeds_[i]);
      std::ostringstream os;
      write_expansion(os, expansion(p));
      tables[i] = os.str();
      if (!c_.run.export_hierarchy_xi.empty()) {
        const NoiseWindow nw = NoiseWindow::at_origin(p.ou1, p.ou2, c_.expansion.window_steps());
        const auto s = solve_hierarchy(spec_, to_vec<N>(c_.run.export_hierarchy_xi), *Hd_, nw, c_.expansion);
        std::ostringstream hs;
        write_hierarchy(hs, s);
        hier[i] = hs.str();
      }
    });
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
      write_file(out_ / ("expansion_" + seed_tag(seeds_[i]) + ".txt"), tables[i]);
      if (!hier[i].empty()) write_file(out_ / ("hierarchy_" + seed_tag(seeds_[i]) + ".txt"), hier[i]);
    }
    manifest_.set("expand", "inversion", c_.inversion == Inversion::full ? "full" : "without_curvature");
    manifest_.set("expand", "T_trunc", num(c_.expansion.T_trunc));
    manifest_.set("expand", "h", num(c_.expansion.h));
    return 0;
  }

  int oracle() {
    const Vec<N> xi = to_vec<N>(c_.run.xi_eval);
    std::vector<std::string> rows(seeds_.size());
    deterministic();
    parallel_for(seeds_.size(), workers_, [&](std::size_t i) {
      const Paths p = paths(seeds_[i]);
      const auto e = expansion(p);
      std::ostringstream os;
      os << std::setprecision(17);
      for (double eps : c_.run.eps_list) {
        const auto r = oracle_at(spec_, p.ou1, p.ou2, eps, xi, c_.expansion);
        const Vec<M> approx = evaluate_expansion(e, xi, eps);
        os << seeds_[i] << ' ' << eps << ' ' << (r.H - approx).norm() << ' ' << r.iterations << ' ' << r.residual;
        for (int j = 0; j < spec_.m(); ++j) os << ' ' << r.H(j) << ' ' << approx(j);
        os << '\n';
      }
      rows[i] = os.str();
    });
    std::string header = "seed eps err iterations residual";
    for (int j = 0; j < spec_.m(); ++j) {
      const std::string sfx = spec_.m() > 1 ? "_" + std::to_string(j) : "";
      header += " H_oracle" + sfx + " H_expansion" + sfx;
    }
    std::string body = header + '\n';
    for (const auto& r : rows) body += r;
    write_file(out_ / "oracle.txt", body);
    manifest_.set("oracle", "xi", join(c_.run.xi_eval));
    return 0;
  }

  int order_study() {
    const Vec<N> xi = to_vec<N>(c_.run.xi_eval);
    std::vector<OrderStudy> studies(seeds_.size());
    deterministic();
    parallel_for(seeds_.size(), workers_, [&](std::size_t i) {
      const Paths p = paths(seeds_[i]);
      studies[i] = convergence_order(spec_, p.ou1, p.ou2, expansion(p), xi, c_.run.eps_list, c_.expansion);
    });
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
      std::ostringstream os;
      write_order_study(os, studies[i]);
      write_file(out_ / ("order_" + seed_tag(seeds_[i]) + ".txt"), os.str());
      const std::string sec = "order_study." + seed_tag(seeds_[i]);
      manifest_.set(sec, "slope_full", num(studies[i].slope_full));
      manifest_.set(sec, "slope_order1", num(studies[i].slope_order1));
      manifest_.set(sec, "dropped_eps", join(studies[i].dropped));
      for (const auto& w : studies[i].warnings) std::cerr << "rcm: warning: " << w << '\n';
    }
    manifest_.set("order_study", "xi", join(c_.run.xi_eval));
    return 0;
  }

  int invariance() {
    const Vec<N> xi = to_vec<N>(c_.run.xi_eval);
    std::vector<std::string> rows(seeds_.size());
    std::vector<std::vector<double>> sup_oracle(seeds_.size()), sup_exp(seeds_.size());
    deterministic();
    parallel_for(seeds_.size(), workers_, [&](std::size_t i) {
      const Paths p = paths(seeds_[i]);
      std::ostringstream os;
      os << std::setprecision(17);
      for (double eps : c_.run.eps_list) {
        const Vec<N> xt = std::exp(-eps * p.ou1.at_zero()) * xi;
        const auto ro = invariance_defect(spec_, p.ou1, p.ou2, eps, xt, c_.run.horizon, c_.run.sample_every,
                                          oracle_evaluator(spec_, p.ou1, p.ou2, eps, c_.expansion));
        const auto re = invariance_defect(spec_, p.ou1, p.ou2, eps, xt, c_.run.horizon, c_.run.sample_every,
                                          expansion_evaluator(spec_, p.ou1, p.ou2, eps, *Hd_, c_.expansion));
        for (std::size_t k = 0; k < ro.samples.size(); ++k) {
          os << seeds_[i] << ' ' << eps << ' ' << ro.samples[k].t << ' ' << ro.samples[k].defect << ' '
             << re.samples[k].defect << '\n';
        }
        sup_oracle[i].push_back(ro.sup_defect);
        sup_exp[i].push_back(re.sup_defect);
      }
      rows[i] = os.str();
    });
    std::string body = "seed eps t defect_oracle defect_expansion\n";
    for (const auto& r : rows) body += r;
    write_file(out_ / "invariance.txt", body);
    std::vector<double> pos_eps;
    for (double e : c_.run.eps_list) {
      if (e > 0.0) pos_eps.push_back(e);
    }
    for (std::size_t i = 0; i < seeds_.size(); ++i) {
      const std::string sec = "invariance." + seed_tag(seeds_[i]);
      manifest_.set(sec, "sup_defect_oracle", join(sup_oracle[i]));
      manifest_.set(sec, "sup_defect_expansion", join(sup_exp[i]));
      std::vector<double> fit;
      for (std::size_t k = 0; k < c_.run.eps_list.size(); ++k) {
        if (c_.run.eps_list[k] > 0.0) fit.push_back(sup_exp[i][k]);
      }
      if (pos_eps.size() >= 2 && std::all_of(fit.begin(), fit.end(), [](double d) { return d > 0.0; })) {
        manifest_.set(sec, "expansion_defect_slope", num(loglog_slope(pos_eps, fit)));
      }
    }
    manifest_.set("invariance", "horizon", num(c_.run.horizon));
    manifest_.set("invariance", "bound_oracle",
                  num(10.0 * (c_.expansion.h +
                              std::exp(-(c_.trichotomy.beta - c_.expansion.eta) * c_.expansion.T_trunc))));
    return 0;
  }

  int figure1() {
    const std::uint64_t seed = c_.run.figure_seed + o_.seed_offset;
    const Paths p = paths(seed);
    const auto e = expansion(p);
    const XiGrid& g = e.grid();
    for (double eps : c_.run.figure_eps) {
      std::ostringstream os;
      os << std::setprecision(17) << "curve xi H\n";
      const char* names[] = {"deterministic", "order1", "order2"};
      for (int order = 0; order <= 2; ++order) {
        for (std::size_t k = 0; k < g.size(); ++k) {
          const Vec<N> xi = g.point<N>(k);
          Vec<M> v = e.Hd.at(k);
          if (order >= 1) v += eps * e.H1.at(k);
          if (order >= 2) v += (eps * eps) * e.H2.at(k);
          os << names[order];
          for (int j = 0; j < g.dim(); ++j) os << (j ? "," : " ") << xi(j);
          for (int j = 0; j < spec_.m(); ++j) os << (j ? "," : " ") << v(j);
          os << '\n';
        }
      }
      write_file(out_ / ("figure1_eps" + label(eps) + ".txt"), os.str());
    }
    manifest_.set("figure1", "seed", std::to_string(seed));
    manifest_.set("figure1", "z1_at_0", num(p.ou1.at_zero()));
    manifest_.set("figure1", "eps", join(c_.run.figure_eps));
    return 0;
  }

  const RunConfig& c_;
  const Options& o_;
  CenterStableSpec<N, M> spec_;
  int workers_;
  std::vector<std::uint64_t> seeds_;
  fs::path out_;
  Manifest manifest_;
  std::optional<DeterministicManifold<N, M>> Hd_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small-noise expansion of random center manifolds"};
  app.require_subcommand(1, 1);
  Options o;
  app.add_option("--config", o.config, "INI run configuration")->required()->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory");
  app.add_option("--workers", o.workers, "parallel workers (default: RCM_WORKERS or 1)")->check(CLI::PositiveNumber);
  app.add_option("--seed-offset", o.seed_offset, "added to every configured seed");
  for (const char* name : {"trichotomy", "expand", "oracle", "order-study", "invariance", "figure1"}) {
    app.add_subcommand(name)->fallthrough();
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(o.config);
    const RunConfig c = cli::parse_run_config(in);
    const bool example = c.system.model == "builtin_example";
    return example ? Runner<1, 1>(c, o).run() : Runner<Dynamic, Dynamic>(c, o).run();
  } catch (const ConfigError& e) {
    std::cerr << "rcm: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const RangeError& e) {
    std::cerr << "rcm: configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rcm: " << e.what() << '\n';
    return 1;
  }
}
