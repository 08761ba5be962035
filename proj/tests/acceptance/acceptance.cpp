// Acceptance run: one PASS/FAIL line per criterion.
//
// Criterion 5 asks for (2 pi hbar_eff)^-2 * integral Q = 1 within 1%. The Bloch resolution of
// identity fixes that integral at 2j / (2j + 1) for every normalized state, 10/11 at j = 5,
// so the criterion cannot pass. It is still measured and printed, and is listed as known
// unattainable so it does not fail the exit code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dickedim/cache.hpp"
#include "dickedim/classical.hpp"
#include "dickedim/coherent.hpp"
#include "dickedim/effdim.hpp"
#include "dickedim/ensembles.hpp"
#include "dickedim/husimi.hpp"
#include "dickedim/model.hpp"
#include "dickedim/participation.hpp"

using namespace dickedim;

namespace {

const std::set<int> kKnownUnattainable = {5};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double target, double rel) { return std::abs(v / target - 1.0) <= rel; }

// Everything at j = 20 shares one decomposition, one shell at eps = -0.5 and one overlap table.
struct Quantum20 {
  EigenDecomposition dec;
  DensityOfStates dos;
  ShellSample shell;
  ShellOverlaps overlaps;
  double deff = 0.0;
  double sigma_bar = 0.0;
};

std::filesystem::path g_cache;

const ShellSample& shell100() {
  static const ShellSample s = sample_shell(-0.5, 1000000, 1, ModelParams{1, 1, 1, 100});
  return s;
}

const Quantum20& quantum20() {
  static const Quantum20 q = [] {
    const ModelParams p{1, 1, 1, 20};
    DiagonalizeOptions o;
    o.eps_max = 0.45;
    std::vector<std::string> warnings;
    auto dec = cached_diagonalize_converged(g_cache, p, 200, 240, Parity::all, 1e-6, o, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    DensityOfStates dos(p, classical_ground_energy(p) + 0.02, dec.converged_eps_max(), 200, 20000, 2);
    auto shell = sample_shell(-0.5, 20000, 3, p);
    // widest window used below: 1.6 around -0.5; Gaussian sigma 0.1 reaches +-0.8
    auto overlaps = compute_shell_overlaps(dec, levels_in_window(dec, -1.35, 0.45), shell);
    const auto e = effective_dimension(shell);
    return Quantum20{std::move(dec), std::move(dos), std::move(shell), std::move(overlaps), e.value.value,
                     e.sigma_bar.value};
  }();
  return q;
}

Outcome c1() {
  const auto& s = shell100();
  const auto h = harmonic_mean_sigma(s), a = arithmetic_mean_sigma(s);
  return {std::abs(h.value - 0.1389) <= 0.002 && std::abs(a.value - 0.1563) <= 0.002,
          fmt("harmonic %.5f +- %.5f (0.1389 +- 0.002), mean %.5f +- %.5f (0.1563 +- 0.002)", h.value, h.error,
              a.value, a.error)};
}

Outcome c2() {
  const auto e = effective_dimension(shell100());
  return {within(e.value.value, 4201.0, 0.02),
          fmt("D_eff = %.1f +- %.1f (4201 +- 2%%), nu = %.1f", e.value.value, e.value.error, e.nu.value)};
}

Outcome c3() {
  const auto fit = effective_dimension_scaling(-0.5, ModelParams{1, 1, 1, 1}, {20, 40, 80, 160}, 1000000, 1);
  return {std::abs(fit.slope - 1.5) <= 0.05, fmt("slope %.4f +- %.4f (1.5 +- 0.05)", fit.slope, fit.slope_error)};
}

Outcome c4() {
  const ModelParams p{1, 1, 1, 10};
  const BasisSpec b{10, 300, Parity::all};
  const auto s = sample_shell(-0.5, 20000, 4, p);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> pick(0, s.points.size() - 1);
  double worst_sigma = 0.0, worst_mean = 0.0;
  for (int found = 0; found < 20;) {
    const PhasePoint x = s.points[pick(rng)].x;
    if (x.atomic_radius2() > 3.9) continue;  // keep clear of the south-pole edge of the disk
    const auto m = coherent_moments_quantum(x, p, b);
    worst_mean = std::max(worst_mean, std::abs(m.mean - h_cl(x, p)));
    worst_sigma = std::max(worst_sigma, std::abs(sigma_x_analytic(x, p) / m.sigma - 1.0));
    ++found;
  }
  return {worst_sigma < 1e-6 && worst_mean <= 1e-10,
          fmt("20 points at j = 10: max relative sigma error %.2e (< 1e-6), max |<H>/j - h_cl| %.2e (<= 1e-10)",
              worst_sigma, worst_mean)};
}

Outcome c5() {
  const ModelParams p{1, 1, 1, 5};
  DiagonalizeOptions o;
  o.eps_max = 0.5;
  const auto dec = cached_diagonalize_converged(g_cache, p, 100, 120, Parity::all, 1e-6, o);
  const BasisSpec b{5, 100, Parity::all};
  std::vector<double> values;
  double worst_err = 0.0;
  for (int i = 0; i < 5; ++i) {
    const std::size_t k = (i + 1) * dec.converged_count / 6;
    const auto e = husimi_phase_space_integral(dec.vectors.col(static_cast<Eigen::Index>(k)).cast<std::complex<double>>(), dec.basis);
    values.push_back(e.value);
    worst_err = std::max(worst_err, e.error);
  }
  const auto s = sample_shell(-0.5, 2000, 5, p);
  for (int i = 0; i < 5; ++i) {
    const auto e = husimi_phase_space_integral(coherent_amplitudes(s.points[i * 97].x, b).full(), b);
    values.push_back(e.value);
    worst_err = std::max(worst_err, e.error);
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  bool pass = true;
  for (double v : values) pass = pass && std::abs(v - 1.0) <= 0.01;
  return {pass, fmt("10 states at j = 5: integrals in [%.4f, %.4f] (stderr <= %.4f), required 1 +- 1%%; "
                    "exact value for any state is 2j/(2j+1) = %.4f",
                    *lo, *hi, worst_err, 10.0 / 11.0)};
}

Outcome c6() {
  const auto& q = quantum20();
  const auto levels = levels_in_window(q.dec, -1.0, -0.2);
  const double tol = 0.03;  // one grid step
  bool profiles_ok = true;
  std::string peaks;
  for (int i = 0; i < 5; ++i) {
    const std::size_t k = levels[(2 * i + 1) * levels.size() / 10];
    const double ek = q.dec.energies(static_cast<Eigen::Index>(k));
    const auto prof = eigenstate_shell_profile(q.dec, k, profile_grid(ek, 0.6, 41), 20000, 60 + i);
    const double off = prof.peak_epsilon() - ek;
    const bool ok = prof.unimodal() && std::abs(off) <= tol + 1e-12;
    profiles_ok = profiles_ok && ok;
    peaks += fmt("%s%.3f:%+.3f%s", i ? " " : "", ek, off, prof.unimodal() ? "" : "(multimodal)");
  }
  const auto rep = effdim_vs_eigenstates_report(-1.0, -0.2, q.dec, 20000, 7);
  return {profiles_ok && rep.median_abs_deviation < 0.25,
          fmt("profiles unimodal, peak offsets within %.2f [%s]; median |D/D_eff - 1| = %.3f over %zu levels "
              "in [-1.0, -0.2] (< 0.25)",
              tol, peaks.c_str(), rep.median_abs_deviation, rep.rows.size())};
}

Outcome c7() {
  const auto& s = shell100();
  const auto e = effective_dimension(s);
  const double nu = e.nu.value, sb = e.sigma_bar.value, floor = narrow_floor(nu, sb);
  const double wide = 10 * sb, narrow = sb / 100;
  const double r_w = dimensionality_rect_closed(wide, s).value / rect_wide_asymptote(wide, nu) - 1;
  const double g_w = dimensionality_gauss_closed(wide, s).value / gauss_wide_asymptote(wide, nu) - 1;
  const double r_n = dimensionality_rect_closed(narrow, s).value / floor - 1;
  const double g_n = dimensionality_gauss_closed(narrow, s).value / floor - 1;
  bool pass = std::abs(r_w) <= 0.05 && std::abs(g_w) <= 0.05 && std::abs(r_n) <= 0.02 && std::abs(g_n) <= 0.02;

  const auto& q = quantum20();
  double worst = 0.0;
  std::string rows;
  auto empirical = [&](const EnergyProfile& prof, const Estimate& closed, const char* tag, std::uint64_t seed) {
    const RandomStateSpec spec{prof, MagnitudeDistribution::exponential, seed};
    const auto d = dimensionality_empirical(spec, q.dec, q.dos, q.shell, q.overlaps, 200);
    const double dev = d.dimensionality.value / closed.value - 1;
    worst = std::max(worst, std::abs(dev));
    rows += fmt(" %s%.2f:%+.3f", tag, prof.width(), dev);
  };
  std::uint64_t seed = 100;
  for (double sg : {0.01, 0.03, 0.1, 0.3})
    empirical(EnergyProfile::rectangular(-0.5, sg), dimensionality_rect_closed(sg, q.shell), "R", seed++);
  for (double sg : {0.01, 0.03, 0.1})
    empirical(EnergyProfile::gaussian(-0.5, sg), dimensionality_gauss_closed(sg, q.shell), "G", seed++);
  pass = pass && worst <= 0.10;
  return {pass, fmt("j = 100 wide: rect %+.4f gauss %+.4f (5%%); narrow: rect %+.4f gauss %+.4f (2%%); "
                    "j = 20 empirical vs closed:%s (max %.3f, 10%%)",
                    r_w, g_w, r_n, g_n, rows.c_str(), worst)};
}

Outcome c8() {
  const auto& q = quantum20();
  const auto rows = pr_vs_dimensionality_sweep(q.dec, q.shell, q.overlaps, {0.02, 0.42, 1.2, 1.6}, 200, 11);
  bool pass = true;
  std::string pr, parity;
  for (const auto& r : rows) {
    const double dp = r.d_filtered.dimensionality.value / r.d_unfiltered.dimensionality.value - 1;
    pass = pass && std::abs(dp) <= 0.10;
    parity += fmt(" %.2f:%+.3f", r.width, dp);
    if (r.k_size >= 200) {
      const double dev = r.pr_filtered.value / (r.k_size / 6.0) - 1;
      pass = pass && std::abs(dev) <= 0.05;
      pr += fmt(" |K|=%zu:%+.3f", r.k_size, dev);
    }
  }
  const auto& narrow = rows.front();
  const auto& wide = rows.back();
  const double dn = narrow.d_filtered.dimensionality.value / narrow.deff_floor - 1;
  const double dw = wide.d_filtered.dimensionality.value / static_cast<double>(wide.k_size) - 1;
  pass = pass && std::abs(dn) <= 0.10 && std::abs(dw) <= 0.10 && pr.size() > 0;
  return {pass, fmt("<P_R>/(|K|/6) - 1:%s (5%%); filtered/unfiltered D - 1:%s (10%%); "
                    "width 1.6 D/|K| - 1 = %+.3f, width 0.02 D/floor - 1 = %+.3f (10%%)",
                    pr.c_str(), parity.c_str(), dw, dn)};
}

Outcome c9() {
  const auto& q = quantum20();
  RandomStateSpec spec{EnergyProfile::rectangular(-0.5, 0.1), MagnitudeDistribution::exponential, 21};
  const auto a = dimensionality_empirical(spec, q.dec, q.dos, q.shell, q.overlaps, 400);
  spec.magnitudes = MagnitudeDistribution::squared_real_normal;
  spec.seed = 22;
  const auto b = dimensionality_empirical(spec, q.dec, q.dos, q.shell, q.overlaps, 400);
  const double err = std::hypot(a.dimensionality.error, b.dimensionality.error);
  const double diff = std::abs(a.dimensionality.value - b.dimensionality.value);
  return {diff <= 3 * err, fmt("exponential %.2f +- %.2f, squared normal %.2f +- %.2f: %.2f combined stderr (<= 3)",
                               a.dimensionality.value, a.dimensionality.error, b.dimensionality.value,
                               b.dimensionality.error, diff / err)};
}

Outcome c10() {
  bool pass = true;
  std::string out;
  std::uint64_t seed = 31;
  for (std::size_t n : {1, 4, 16, 64}) {
    const auto e = haar_overlap_average(n, 200000, seed++);
    const double z = e.error > 0 ? std::abs(e.value - 1.0 / n) / e.error : 0.0;
    pass = pass && std::abs(e.value - 1.0 / n) <= 3 * e.error + 1e-15;
    out += fmt(" N=%zu: %.5f (%.2f stderr)", n, e.value, z);
  }
  return {pass, "mean overlap vs 1/N:" + out};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string cache;
  std::vector<int> only;
  app.add_option("--cache-dir", cache, "decomposition cache (empty: none)");
  app.add_option("--only", only, "run just these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  g_cache = cache;

  const std::vector<std::function<Outcome()>> criteria = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  int hard_failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = criteria[i]();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool known = kKnownUnattainable.count(id) > 0;
    std::cout << "criterion " << id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.detail
              << fmt("  [%.1f s]", secs) << (!r.pass && known ? "  (known unattainable)" : "") << std::endl;
    if (!r.pass && !known) ++hard_failures;
  }
  return hard_failures ? 1 : 0;
}
