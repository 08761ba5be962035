#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dickedim/common.hpp"
#include "dickedim/model.hpp"

namespace dickedim {

/// Point x = (q, p; Q, P) of the classical phase space. The atomic pair lives on the
/// disk Q^2 + P^2 <= 4.
struct PhasePoint {
  double q = 0.0;
  double p = 0.0;
  double Q = 0.0;
  double P = 0.0;

  double atomic_radius2() const { return Q * Q + P * P; }
};

/// sqrt(1 - (Q^2 + P^2)/4); throws std::domain_error off the disk.
double atomic_factor(double Q, double P);

/// Classical energy <x|H|x>/j.
double h_cl(const PhasePoint& x, const ModelParams& params);

/// (dh/dq, dh/dp, dh/dQ, dh/dP).
std::array<double, 4> grad_h_cl(const PhasePoint& x, const ModelParams& params);

/// Minimum of h_cl over phase space (closed form from the stationary conditions).
double classical_ground_energy(const ModelParams& params);

/// Real solutions q of h_cl(q, p, Q, P) = eps (h_cl is quadratic in q).
struct QRoots {
  int count = 0;
  std::array<double, 2> q{};
};
QRoots q_roots_on_shell(double p, double Q, double P, double eps, const ModelParams& params);

/// Weighted point on an energy shell; weight = 1/|dh/dq|, capped (see ShellSample).
struct ShellPoint {
  PhasePoint x;
  double weight = 0.0;
  std::uint32_t draw = 0;  // index of the raw (p, Q, P) draw that produced it
};

struct ShellOptions {
  /// Quantile of the raw weight distribution used as a cap.
  double cap_quantile = 0.9999;
  /// Warn when more than this fraction of raw weight sits above the cap.
  double capped_mass_warning = 0.01;
};

/// Monte Carlo representation of the surface measure dx delta(h_cl(x) - eps).
struct ShellSample {
  double epsilon = 0.0;
  ModelParams params;
  std::uint64_t seed = 0;
  std::uint64_t n_draws = 0;
  double p_max = 0.0;
  double box_volume = 0.0;  // measure of the (p, Q, P) sampling region
  double weight_cap = 0.0;
  double capped_mass_fraction = 0.0;
  std::vector<ShellPoint> points;
  Estimate volume;  // integral of delta(h_cl - eps) dx
  Estimate nu;      // volume / (2 pi hbar_eff)^2
  std::vector<std::string> warnings;

  bool empty() const { return points.empty(); }
};

/// Draws (p, Q, P) uniformly from {|p| <= p_max} x {Q^2 + P^2 <= 4} and resolves the delta
/// function along q. Deterministic for a given seed regardless of thread count: draws are
/// split into fixed-size chunks, each with its own seeded substream.
ShellSample sample_shell(double eps, std::uint64_t n_draws, std::uint64_t seed, const ModelParams& params,
                         const ShellOptions& opts = {});

/// Ratio estimator sum(w f)/sum(w) with a delta-method standard error over draws.
Estimate shell_average(const ShellSample& s, const std::function<double(const PhasePoint&)>& f);

/// Same estimator for precomputed per-point values f_i (aligned with s.points).
Estimate shell_average_values(const ShellSample& s, const std::vector<double>& values);

/// Per-draw totals (sum of weights, sum of weight*value) for custom estimators.
struct DrawTotals {
  std::vector<double> weight;
  std::vector<double> weighted_value;
};
DrawTotals draw_totals(const ShellSample& s, const std::vector<double>& values);

/// nu(eps) / <f>_eps from one sample, with a delta-method error that keeps the correlation
/// between the shell volume and the average (both are built from the same draws).
Estimate nu_over_average(const ShellSample& s, const std::vector<double>& values);

/// Phase-space volume of {h_cl <= eps} divided by (2 pi hbar_eff)^2: the semiclassical
/// count of levels below eps. The q-extent is integrated exactly for each (p, Q, P) draw.
Estimate level_count_below(double eps, std::uint64_t n_draws, std::uint64_t seed, const ModelParams& params);

/// Smooth nu(eps) on a uniform grid, built from shell volumes with common random numbers
/// (one seed for every grid energy) and interpolated with a cubic B-spline.
class DensityOfStates {
 public:
  DensityOfStates(const ModelParams& params, double eps_lo, double eps_hi, std::size_t n_grid,
                  std::uint64_t n_draws, std::uint64_t seed);

  double operator()(double eps) const;
  double eps_lo() const { return eps_lo_; }
  double eps_hi() const { return eps_hi_; }
  const std::vector<double>& grid_values() const { return values_; }

 private:
  double eps_lo_;
  double eps_hi_;
  double step_;
  std::vector<double> values_;
  std::function<double(double)> spline_;
};

}  // namespace dickedim
