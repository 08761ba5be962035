// dickedim: command-line front end. Every subcommand prints a JSON summary on stdout and,
// with --out, writes a CSV (first line "# <metadata>") plus a .json sidecar.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "dickedim/cache.hpp"
#include "dickedim/classical.hpp"
#include "dickedim/effdim.hpp"
#include "dickedim/ensembles.hpp"
#include "dickedim/husimi.hpp"
#include "dickedim/io.hpp"
#include "dickedim/model.hpp"
#include "dickedim/participation.hpp"

using namespace dickedim;
using nlohmann::json;

namespace {

constexpr int kExitUser = 1;
constexpr int kExitNumerical = 2;

struct Options {
  double omega = 1.0, omega0 = 1.0, gamma = 1.0;
  double j = 0.0;      // 0: subcommand default
  double draws = 0.0;  // 0: subcommand default; a double so that 1e6 parses
  std::uint64_t seed = 1;
  std::string out;
  std::string cache_dir;
  int workers = 0;

  // quantum
  int n_max = 0;        // 0: ceil(10 j)
  int n_max_check = 0;  // 0: n_max + 2j
  double eps_max = 0.3;
  double tol = 1e-6;

  // per-command
  double epsilon = -0.5;
  double eps_lo = -1.0, eps_hi = -0.2;
  long level = -1;
  double half_width = 0.6;
  std::size_t grid = 41;
  std::size_t bins = 60;
  std::string points_out;
  std::size_t n_sigma = 25;
  double sigma_min = 0.0, sigma_max = 0.0;
  bool empirical = false;
  std::size_t states = 200;
  std::vector<double> widths{0.02, 0.05, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<double> scaling_j;
};

ModelParams params_of(const Options& o, double default_j) {
  ModelParams p{o.omega, o.omega0, o.gamma, o.j > 0.0 ? o.j : default_j};
  p.validate();
  return p;
}

std::uint64_t draws_of(const Options& o, double fallback) {
  const double d = o.draws > 0.0 ? o.draws : fallback;
  if (d < 2.0 || d > 1e12 || d != std::floor(d)) throw std::invalid_argument("--draws must be an integer >= 2");
  return static_cast<std::uint64_t>(d);
}

void print_warnings(const std::vector<std::string>& w) {
  for (const auto& m : w) std::cerr << "warning: " << m << '\n';
}

json base_meta(const std::string& command, const ModelParams& p, const Options& o) {
  json m = provenance(p, o.seed);
  m["command"] = command;
  return m;
}

void add_quantum_meta(json& m, const EigenDecomposition& dec, const Options& o) {
  m["n_max"] = o.n_max;
  m["n_max_check"] = o.n_max_check;
  m["convergence_tol"] = o.tol;
  m["converged_levels"] = dec.converged_count;
  m["converged_eps_max"] = dec.converged_eps_max();
}

EigenDecomposition solve(const ModelParams& p, Options& o) {
  if (o.n_max <= 0) o.n_max = default_n_max(p.j);
  if (o.n_max_check <= 0) o.n_max_check = o.n_max + p.two_j();
  std::filesystem::path dir = o.cache_dir.empty() ? default_cache_dir() : std::filesystem::path(o.cache_dir);
  std::vector<std::string> warnings;
  DiagonalizeOptions opts;
  opts.eps_max = o.eps_max;
  auto dec = cached_diagonalize_converged(dir, p, o.n_max, o.n_max_check, Parity::all, o.tol, opts, &warnings);
  print_warnings(warnings);
  if (dec.converged_count == 0) throw NumericalError("no converged level; raise --n-max");
  return dec;
}

DensityOfStates make_dos(const EigenDecomposition& dec, std::uint64_t draws, std::uint64_t seed) {
  const double lo = classical_ground_energy(dec.params) + 0.02;
  const double hi = std::max(dec.converged_eps_max(), lo + 0.1);
  return DensityOfStates(dec.params, lo, hi, 200, std::min<std::uint64_t>(draws, 20000), seed);
}

void emit(const json& summary) { std::cout << summary.dump(2) << '\n'; }

// ---------------------------------------------------------------------------------------------

int cmd_spectrum(Options& o) {
  const ModelParams p = params_of(o, 20.0);
  const auto dec = solve(p, o);
  Table t{{"k", "epsilon", "parity", "converged"}, {}};
  for (std::size_t k = 0; k < dec.n_levels(); ++k) {
    t.add({static_cast<double>(k), dec.energies(static_cast<Eigen::Index>(k)), static_cast<double>(dec.parities[k]),
           k < dec.converged_count ? 1.0 : 0.0});
  }
  json meta = base_meta("spectrum", p, o);
  add_quantum_meta(meta, dec, o);
  if (!o.out.empty()) write_table(o.out, t, meta);
  meta["levels"] = dec.n_levels();
  emit(meta);
  return 0;
}

json shell_summary(const ShellSample& s) {
  return {{"epsilon", s.epsilon},
          {"draws", s.n_draws},
          {"points", s.points.size()},
          {"volume", to_json(s.volume)},
          {"nu", to_json(s.nu)},
          {"sigma_harmonic", to_json(harmonic_mean_sigma(s))},
          {"sigma_mean", to_json(arithmetic_mean_sigma(s))},
          {"capped_mass_fraction", s.capped_mass_fraction},
          {"warnings", s.warnings}};
}

int cmd_shell(Options& o) {
  const ModelParams p = params_of(o, 100.0);
  const ShellSample s = sample_shell(o.epsilon, draws_of(o, 1e6), o.seed, p);
  print_warnings(s.warnings);
  json meta = base_meta("shell", p, o);
  meta["epsilon"] = o.epsilon;
  meta["draws"] = s.n_draws;
  if (!o.out.empty()) write_table(o.out, shell_table(s), meta);
  json summary = shell_summary(s);
  summary["provenance"] = meta;
  emit(summary);
  return 0;
}

int cmd_effdim(Options& o) {
  const ModelParams p = params_of(o, 100.0);
  const std::uint64_t n = draws_of(o, 1e6);
  const ShellSample s = sample_shell(o.epsilon, n, o.seed, p);
  print_warnings(s.warnings);
  const EffectiveDimension d = effective_dimension(s);
  json summary = {{"value", d.value.value},
                  {"stderr", d.value.error},
                  {"nu", d.nu.value},
                  {"nu_stderr", d.nu.error},
                  {"sigma_bar", d.sigma_bar.value},
                  {"sigma_bar_stderr", d.sigma_bar.error},
                  {"epsilon", o.epsilon}};
  if (!o.scaling_j.empty()) {
    const ScalingFit fit = effective_dimension_scaling(o.epsilon, p, o.scaling_j, n, o.seed);
    json pts = json::array();
    for (const auto& pt : fit.points) pts.push_back({{"j", pt.j}, {"value", pt.value.value}, {"stderr", pt.value.error}});
    summary["scaling"] = {{"points", pts}, {"slope", fit.slope}, {"slope_stderr", fit.slope_error}};
  }
  json meta = base_meta("effdim", p, o);
  meta["draws"] = n;
  summary["provenance"] = meta;
  if (!o.out.empty()) {
    Table t{{"epsilon", "value", "stderr", "nu", "sigma_bar"}, {}};
    t.add({o.epsilon, d.value.value, d.value.error, d.nu.value, d.sigma_bar.value});
    write_table(o.out, t, meta);
  }
  emit(summary);
  return 0;
}

int cmd_sigma_map(Options& o) {
  const ModelParams p = params_of(o, 100.0);
  const ShellSample s = sample_shell(o.epsilon, draws_of(o, 1e6), o.seed, p);
  print_warnings(s.warnings);
  const auto sig = sigma_values(s);
  std::vector<double> w(s.points.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = s.points[i].weight;
  const auto [mn, mx] = std::minmax_element(sig.begin(), sig.end());
  const Table hist = weighted_histogram(sig, w, *mn, *mx * (1.0 + 1e-12), o.bins);
  json meta = base_meta("sigma-map", p, o);
  meta["epsilon"] = o.epsilon;
  meta["draws"] = s.n_draws;
  if (!o.out.empty()) write_table(o.out, hist, meta);
  if (!o.points_out.empty()) {
    Table pts{{"q", "p", "Q", "P", "w", "sigma"}, {}};
    for (std::size_t i = 0; i < sig.size(); ++i) {
      const auto& x = s.points[i].x;
      pts.add({x.q, x.p, x.Q, x.P, s.points[i].weight, sig[i]});
    }
    write_table(o.points_out, pts, meta);
  }
  json summary = shell_summary(s);
  summary["sigma_min"] = *mn;
  summary["sigma_max"] = *mx;
  summary["provenance"] = meta;
  emit(summary);
  return 0;
}

int cmd_profile(Options& o) {
  const ModelParams p = params_of(o, 20.0);
  const std::uint64_t n = draws_of(o, 2e4);
  const auto dec = solve(p, o);
  std::size_t k = 0;
  if (o.level >= 0) {
    k = static_cast<std::size_t>(o.level);
  } else {
    for (std::size_t i = 1; i < dec.converged_count; ++i) {
      if (std::abs(dec.energies(static_cast<Eigen::Index>(i)) - o.epsilon) <
          std::abs(dec.energies(static_cast<Eigen::Index>(k)) - o.epsilon)) {
        k = i;
      }
    }
  }
  if (k >= dec.converged_count) throw std::invalid_argument("--level is not a converged level");
  const double eps_k = dec.energies(static_cast<Eigen::Index>(k));
  const auto prof = eigenstate_shell_profile(dec, k, profile_grid(eps_k, o.half_width, o.grid), n, o.seed);
  const double nu_k = sample_shell(eps_k, n, o.seed, p).nu.value;

  Table t{{"epsilon", "husimi", "stderr", "gaussian"}, {}};
  for (std::size_t i = 0; i < prof.grid.size(); ++i) {
    const ShellSample s = sample_shell(prof.grid[i].epsilon, n, o.seed + i, p);
    t.add({prof.grid[i].epsilon, prof.grid[i].average.value, prof.grid[i].average.error,
           gaussian_profile_average(eps_k, s, nu_k).value});
  }
  json meta = base_meta("profile", p, o);
  add_quantum_meta(meta, dec, o);
  meta["level"] = k;
  meta["eps_k"] = eps_k;
  meta["draws"] = n;
  if (!o.out.empty()) write_table(o.out, t, meta);
  json summary = {{"level", k},
                  {"eps_k", eps_k},
                  {"peak_epsilon", prof.peak_epsilon()},
                  {"argmax_epsilon", prof.grid[prof.peak_index()].epsilon},
                  {"unimodal", prof.unimodal()},
                  {"provenance", meta}};
  emit(summary);
  return 0;
}

int cmd_eigdim(Options& o) {
  const ModelParams p = params_of(o, 20.0);
  const std::uint64_t n = draws_of(o, 2e4);
  o.eps_max = std::max(o.eps_max, o.eps_hi + 0.05);
  const auto dec = solve(p, o);
  const auto rep = effdim_vs_eigenstates_report(o.eps_lo, o.eps_hi, dec, n, o.seed);
  Table t{{"k", "epsilon", "parity", "D", "D_stderr", "Deff", "Deff_stderr", "ratio"}, {}};
  for (const auto& r : rep.rows) {
    t.add({static_cast<double>(r.k), r.eps_k, static_cast<double>(r.parity), r.dimensionality.value,
           r.dimensionality.error, r.effective.value, r.effective.error, r.ratio});
  }
  json meta = base_meta("eigdim", p, o);
  add_quantum_meta(meta, dec, o);
  meta["eps_lo"] = o.eps_lo;
  meta["eps_hi"] = o.eps_hi;
  meta["draws"] = n;
  if (!o.out.empty()) write_table(o.out, t, meta);
  emit({{"rows", rep.rows.size()},
        {"median_abs_deviation", rep.median_abs_deviation},
        {"mean_ratio", rep.mean_ratio},
        {"provenance", meta}});
  return 0;
}

int cmd_dimensionality(Options& o) {
  const ModelParams p = params_of(o, o.empirical ? 20.0 : 100.0);
  const std::uint64_t n = draws_of(o, o.empirical ? 2e4 : 1e6);
  const ShellSample s = sample_shell(o.epsilon, n, o.seed, p);
  print_warnings(s.warnings);
  const EffectiveDimension deff = effective_dimension(s);
  const double sbar = deff.sigma_bar.value;
  const double lo = o.sigma_min > 0.0 ? o.sigma_min : sbar / 100.0;
  const double hi = o.sigma_max > 0.0 ? o.sigma_max : sbar * 10.0;
  if (!(hi > lo) || o.n_sigma < 2) throw std::invalid_argument("bad sigma range");

  std::optional<EigenDecomposition> dec;
  std::optional<DensityOfStates> dos;
  ShellOverlaps overlaps;
  if (o.empirical) {
    dec = solve(p, o);
    dos = make_dos(*dec, n, o.seed + 1);
    const double reach = std::sqrt(3.0) * hi;
    overlaps = compute_shell_overlaps(*dec, levels_in_window(*dec, o.epsilon - reach, o.epsilon + reach), s);
  }

  Table t{{"sigma", "D_rect_closed", "D_gauss_closed", "D_rect_empirical", "stderr", "asymptote_rect",
           "asymptote_gauss"},
          {}};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < o.n_sigma; ++i) {
    const double sigma = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(o.n_sigma - 1));
    double emp = nan, emp_err = nan;
    if (o.empirical) {
      try {
        RandomStateSpec spec{EnergyProfile::rectangular(o.epsilon, sigma), MagnitudeDistribution::exponential,
                             o.seed + 100 + i};
        const auto e = dimensionality_empirical(spec, *dec, *dos, s, overlaps, o.states);
        emp = e.dimensionality.value;
        emp_err = e.dimensionality.error;
      } catch (const std::invalid_argument&) {
        // profile outside the converged spectrum or holding no level: leave blank
      } catch (const std::out_of_range&) {
      }
    }
    t.add({sigma, dimensionality_rect_closed(sigma, s).value, dimensionality_gauss_closed(sigma, s).value, emp,
           emp_err, rect_wide_asymptote(sigma, s.nu.value), gauss_wide_asymptote(sigma, s.nu.value)});
  }
  json meta = base_meta("dimensionality", p, o);
  meta["epsilon"] = o.epsilon;
  meta["draws"] = n;
  meta["floor"] = narrow_floor(s.nu.value, sbar);
  if (dec) add_quantum_meta(meta, *dec, o);
  if (!o.out.empty()) write_table(o.out, t, meta);
  emit({{"floor", narrow_floor(s.nu.value, sbar)}, {"sigma_bar", sbar}, {"nu", s.nu.value}, {"provenance", meta}});
  return 0;
}

int cmd_pr_sweep(Options& o) {
  const ModelParams p = params_of(o, 20.0);
  const std::uint64_t n = draws_of(o, 2e4);
  const double widest = *std::max_element(o.widths.begin(), o.widths.end());
  o.eps_max = std::max(o.eps_max, o.epsilon + 0.5 * widest + 0.05);
  const auto dec = solve(p, o);
  const ShellSample s = sample_shell(o.epsilon, n, o.seed, p);
  print_warnings(s.warnings);
  const auto overlaps =
      compute_shell_overlaps(dec, levels_in_window(dec, o.epsilon - 0.5 * widest, o.epsilon + 0.5 * widest), s);
  const auto rows = pr_vs_dimensionality_sweep(dec, s, overlaps, o.widths, o.states, o.seed + 1);

  Table t{{"width", "D_empirical", "D_empirical_stderr", "D_closed", "K_size", "PR_mean", "PR_stderr", "Deff_floor",
           "K_filtered", "D_unfiltered", "D_unfiltered_stderr", "PR_unfiltered_mean", "capture"},
          {}};
  for (const auto& r : rows) {
    t.add({r.width, r.d_filtered.dimensionality.value, r.d_filtered.dimensionality.error, r.d_closed.value,
           static_cast<double>(r.k_size), r.pr_filtered.value, r.pr_filtered.error, r.deff_floor,
           static_cast<double>(r.k_filtered), r.d_unfiltered.dimensionality.value,
           r.d_unfiltered.dimensionality.error, r.pr_unfiltered.value, r.capture.value});
  }
  json meta = base_meta("pr-sweep", p, o);
  add_quantum_meta(meta, dec, o);
  meta["epsilon"] = o.epsilon;
  meta["draws"] = n;
  meta["states"] = o.states;
  if (!o.out.empty()) write_table(o.out, t, meta);
  emit({{"widths", o.widths.size()}, {"provenance", meta}});
  return 0;
}

// Flat "key = value" config; command-line flags take precedence.
void apply_config(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    auto trim = [](std::string v) {
      const auto a = v.find_first_not_of(" \t\r");
      const auto b = v.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
    };
    if (trim(line).empty()) continue;
    if (eq == std::string::npos) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    std::istringstream items(value);
    std::string item;
    while (items >> item) opt->add_result(item);
    opt->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Effective dimension of Dicke-model energy shells"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  std::string config;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--j", o.j, "pseudospin j");
    sub->add_option("--omega", o.omega, "field frequency");
    sub->add_option("--omega0", o.omega0, "atomic splitting");
    sub->add_option("--gamma", o.gamma, "coupling");
    sub->add_option("--draws", o.draws, "shell Monte Carlo draws (1e6 accepted)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "CSV output path");
    sub->add_option("--workers", o.workers, "OpenMP threads (0: runtime default)");
    sub->add_option("--config", config, "flat key = value file with defaults for any flag");
  };
  auto quantum = [&](CLI::App* sub) {
    sub->add_option("--n-max", o.n_max, "boson cutoff (default ceil(10 j))");
    sub->add_option("--n-max-check", o.n_max_check, "larger cutoff for the convergence check (default n_max + 2j)");
    sub->add_option("--eps-max", o.eps_max, "highest rescaled energy to solve for");
    sub->add_option("--tol", o.tol, "eigenvalue convergence tolerance");
    sub->add_option("--cache-dir", o.cache_dir, "eigendecomposition cache (default $DICKEDIM_CACHE_DIR)");
  };

  std::map<std::string, int (*)(Options&)> handlers;
  auto add = [&](const std::string& name, const std::string& help, int (*fn)(Options&), bool is_quantum) {
    CLI::App* sub = app.add_subcommand(name, help);
    common(sub);
    if (is_quantum) quantum(sub);
    handlers[name] = fn;
    return sub;
  };

  add("spectrum", "solve (and cache) the converged spectrum", cmd_spectrum, true);
  auto* shell = add("shell", "sample an energy shell: nu and sigma_x means", cmd_shell, false);
  shell->add_option("--epsilon", o.epsilon, "rescaled energy");
  auto* eff = add("effdim", "classical effective dimension", cmd_effdim, false);
  eff->add_option("--epsilon", o.epsilon, "rescaled energy");
  eff->add_option("--scaling-j", o.scaling_j, "also fit log D_eff against log j over these j")->delimiter(',');
  auto* prof = add("profile", "shell profile of one eigenstate", cmd_profile, true);
  prof->add_option("--epsilon", o.epsilon, "pick the converged level closest to this energy");
  prof->add_option("--level", o.level, "level index (overrides --epsilon)");
  prof->add_option("--half-width", o.half_width, "energy half-width of the profile grid");
  prof->add_option("--grid", o.grid, "profile grid points");
  auto* eig = add("eigdim", "eigenstate dimensionality next to D_eff", cmd_eigdim, true);
  eig->add_option("--eps-lo", o.eps_lo, "window start");
  eig->add_option("--eps-hi", o.eps_hi, "window end");
  auto* smap = add("sigma-map", "sigma_x over a shell and its histogram", cmd_sigma_map, false);
  smap->add_option("--epsilon", o.epsilon, "rescaled energy");
  smap->add_option("--bins", o.bins, "histogram bins");
  smap->add_option("--points-out", o.points_out, "per-point CSV (q, p, Q, P, w, sigma)");
  auto* dim = add("dimensionality", "closed-form (and empirical) dimensionality against profile width",
                  cmd_dimensionality, true);
  dim->add_option("--epsilon", o.epsilon, "profile center");
  dim->add_option("--n-sigma", o.n_sigma, "number of widths (log-spaced)");
  dim->add_option("--sigma-min", o.sigma_min, "smallest width (default sigma_bar / 100)");
  dim->add_option("--sigma-max", o.sigma_max, "largest width (default 10 sigma_bar)");
  dim->add_flag("--empirical", o.empirical, "also run random-state ensembles (diagonalizes; use a small j)");
  dim->add_option("--states", o.states, "ensemble members per width");
  auto* pr = add("pr-sweep", "participation ratio and dimensionality of GOE window states", cmd_pr_sweep, true);
  pr->add_option("--epsilon", o.epsilon, "window center");
  pr->add_option("--widths", o.widths, "window widths eps_f - eps_i")->delimiter(',');
  pr->add_option("--states", o.states, "ensemble members per width");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUser;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config.empty()) apply_config(sub, config);
#ifdef _OPENMP
    if (o.workers > 0) omp_set_num_threads(o.workers);
#endif
    return handlers.at(sub->get_name())(o);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUser;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
}
