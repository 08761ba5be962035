#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dickedim/classical.hpp"
#include "dickedim/coherent.hpp"
#include "dickedim/model.hpp"

namespace dickedim {

/// Overlaps <phi_k|x_i> for the requested levels (rows) and phase points (columns).
/// Points and levels are processed in blocks; each eigenvector is contracted in its
/// (n, m) grid form against the factorized coherent amplitudes.
Eigen::MatrixXcd eigen_overlaps(const EigenDecomposition& dec, const std::vector<std::size_t>& levels,
                                const std::vector<PhasePoint>& points);

std::vector<PhasePoint> shell_points(const ShellSample& s);

/// Shell average of the Husimi function of eigenstate k.
Estimate eigenstate_shell_average(const EigenDecomposition& dec, std::size_t k, const ShellSample& s);

/// D(eps_k, phi_k): reciprocal of the Husimi shell average, evaluated on a shell at eps_k.
Estimate eigenstate_dimensionality(const EigenDecomposition& dec, std::size_t k, const ShellSample& s);

/// Gaussian semiclassical estimate of the shell-averaged eigenstate Husimi function:
/// <exp(-(eps_k - eps)^2 / (2 sigma_x^2)) / sigma_x>_eps / (sqrt(2 pi) nu(eps_k)).
Estimate gaussian_profile_average(double eps_k, const ShellSample& s, double nu_at_eps_k);

struct ProfilePoint {
  double epsilon = 0.0;
  Estimate average;
};

/// <Q_phi_k>_eps over an energy grid.
struct EigenstateShellProfile {
  std::size_t k = 0;
  double eps_k = 0.0;
  std::vector<ProfilePoint> grid;

  std::size_t peak_index() const;
  /// Vertex of a weighted parabola through the points above top_fraction of the maximum.
  /// Steadier than the raw argmax when the profile is much wider than the grid step.
  double peak_epsilon(double top_fraction = 0.9) const;
  /// Monotone rise to the peak and monotone fall after it, allowing steps against the
  /// trend of up to `n_sigma` combined standard errors.
  bool unimodal(double n_sigma = 3.0) const;
};

/// Uniform grid of n points spanning eps_k +- half_width.
std::vector<double> profile_grid(double eps_k, double half_width, std::size_t n = 41);

/// Samples a shell at every grid energy (seeded by `seed` and the grid index) and averages the
/// Husimi function of level k over each.
EigenstateShellProfile eigenstate_shell_profile(const EigenDecomposition& dec, std::size_t k,
                                                const std::vector<double>& grid, std::uint64_t n_draws,
                                                std::uint64_t seed);

struct PhaseSpaceIntegralOptions {
  double half_width = 0.0;         // |q|, |p| <= half_width; 0 picks it from mass_outside
  double mass_outside = 1e-6;      // Husimi mass allowed outside the automatic bosonic box
  std::size_t boson_points = 2000; // per batch
  std::size_t atom_points = 2000;  // per batch
  std::size_t batches = 8;
  std::uint64_t seed = 1;
};

/// Half-width of a (q, p) box holding all but `mass_outside` of the Husimi weight of psi,
/// from its photon-number distribution.
double husimi_box_half_width(const Eigen::Ref<const Eigen::VectorXcd>& psi, const BasisSpec& basis,
                             double mass_outside = 1e-6);

/// (2 pi hbar_eff)^-2 * integral of |<psi|x>|^2 over the whole phase space, by Monte Carlo on
/// a bosonic box times the atomic disk. For any normalized state the exact value is
/// 2j / (2j + 1): the Bloch states resolve the identity with weight (2j + 1) / (4 pi), not
/// j / (2 pi). Each batch evaluates every pair of an independent
/// bosonic and atomic point set, which the factorized amplitudes turn into one matrix product.
Estimate husimi_phase_space_integral(const Eigen::Ref<const Eigen::VectorXcd>& psi, const BasisSpec& basis,
                                     const PhaseSpaceIntegralOptions& opts = {});

}  // namespace dickedim
