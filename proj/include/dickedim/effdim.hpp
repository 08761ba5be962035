#pragma once

#include <cstdint>
#include <vector>

#include "dickedim/classical.hpp"
#include "dickedim/model.hpp"

namespace dickedim {

/// sigma_x (closed form) at every point of the shell sample.
std::vector<double> sigma_values(const ShellSample& s);

/// Harmonic mean <sigma_x^-1>^-1 over the shell.
Estimate harmonic_mean_sigma(const ShellSample& s);

/// Standard (arithmetic) mean <sigma_x> over the shell.
Estimate arithmetic_mean_sigma(const ShellSample& s);

struct EffectiveDimension {
  double epsilon = 0.0;
  double j = 0.0;
  Estimate value;       // sqrt(2 pi) nu sigma_bar
  Estimate nu;
  Estimate sigma_bar;   // harmonic mean
  Estimate sigma_mean;  // arithmetic mean
};

/// Effective dimension from an existing shell sample. The standard error of the product
/// accounts for the correlation between nu and sigma_bar (both come from the same draws).
EffectiveDimension effective_dimension(const ShellSample& s);

/// Purely classical: builds a shell sample and evaluates sqrt(2 pi) nu(eps) sigma_bar(eps).
EffectiveDimension effective_dimension(double eps, const ModelParams& params, std::uint64_t n_draws,
                                       std::uint64_t seed);

/// Least-squares slope of log D_eff against log j (same seed for every j).
struct ScalingFit {
  std::vector<double> j;
  std::vector<EffectiveDimension> points;
  double slope = 0.0;
  double slope_error = 0.0;
};
ScalingFit effective_dimension_scaling(double eps, const ModelParams& base, const std::vector<double>& js,
                                       std::uint64_t n_draws, std::uint64_t seed);

struct EigenDimensionRow {
  std::size_t k = 0;
  double eps_k = 0.0;
  int parity = 0;
  Estimate dimensionality;  // D(eps_k, phi_k)
  Estimate effective;       // D_eff(eps_k)
  double ratio = 0.0;       // D / D_eff
};

struct EigenDimensionReport {
  std::vector<EigenDimensionRow> rows;
  double median_abs_deviation = 0.0;  // median |D/D_eff - 1|
  double mean_ratio = 0.0;
};

/// For every converged level in [eps_lo, eps_hi]: D(eps_k, phi_k) on a fresh shell at eps_k,
/// next to the classical D_eff(eps_k) from the same sample.
EigenDimensionReport effdim_vs_eigenstates_report(double eps_lo, double eps_hi, const EigenDecomposition& dec,
                                                  std::uint64_t n_draws, std::uint64_t seed);

}  // namespace dickedim
