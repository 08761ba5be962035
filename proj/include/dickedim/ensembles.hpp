#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dickedim/classical.hpp"
#include "dickedim/model.hpp"

namespace dickedim {

enum class ProfileKind { delta, rectangular, gaussian, custom };

/// Normalized energy profile rho_R(eps). Rectangular profiles are parameterized by their
/// standard deviation: support [c - sqrt(3) sigma, c + sqrt(3) sigma].
class EnergyProfile {
 public:
  static EnergyProfile delta(double center);
  static EnergyProfile rectangular(double center, double sigma);
  static EnergyProfile gaussian(double center, double sigma);
  /// Piecewise-linear tabulated density, normalized by the trapezoid rule.
  static EnergyProfile custom(std::vector<double> eps, std::vector<double> density);

  ProfileKind kind() const { return kind_; }
  double center() const { return center_; }
  double width() const { return width_; }

  double density(double eps) const;
  /// Interval outside of which the density is zero (+-8 sigma for Gaussians).
  std::pair<double, double> support() const;
  /// Integral of the density above eps.
  double mass_above(double eps) const;

 private:
  ProfileKind kind_ = ProfileKind::delta;
  double center_ = 0.0;
  double width_ = 0.0;
  std::vector<double> table_eps_;
  std::vector<double> table_rho_;
};

enum class MagnitudeDistribution {
  exponential,             // r ~ Exp(1)
  squared_real_normal,     // r = z^2, z real standard normal
  squared_complex_normal,  // r = |z|^2, z complex standard normal (unit variance)
};

struct RandomStateSpec {
  EnergyProfile profile = EnergyProfile::delta(0.0);
  MagnitudeDistribution magnitudes = MagnitudeDistribution::exponential;
  std::uint64_t seed = 0;
};

/// Levels carrying the profile and their expected occupations rho(eps_k)/nu(eps_k),
/// normalized to unit sum.
struct ProfileWeights {
  std::vector<std::size_t> levels;
  std::vector<double> weights;
};

/// Throws std::invalid_argument if more than 1e-6 of the profile mass lies above the
/// converged spectrum, or if no converged level carries weight.
ProfileWeights profile_weights(const EnergyProfile& profile, const EigenDecomposition& dec,
                               const DensityOfStates& nu);

/// |c_k|^2 = r_k rho(eps_k) / (M nu(eps_k)) with uniform phases; exact normalization M.
/// Returns coefficients on all levels of `dec`. `member` selects the ensemble member.
Eigen::VectorXcd sample_random_state(const RandomStateSpec& spec, const EigenDecomposition& dec,
                                     const DensityOfStates& nu, std::uint64_t member = 0);

/// Overlaps <phi_k|x_i> between a set of levels and the points of one shell sample.
struct ShellOverlaps {
  std::vector<std::size_t> levels;
  Eigen::MatrixXcd values;  // levels x points

  /// Row of `values` holding level k; throws if k was not computed.
  Eigen::Index row_of(std::size_t k) const;
};
ShellOverlaps compute_shell_overlaps(const EigenDecomposition& dec, const std::vector<std::size_t>& levels,
                                     const ShellSample& s);
/// Every converged level with eps in [eps_lo, eps_hi].
std::vector<std::size_t> levels_in_window(const EigenDecomposition& dec, double eps_lo, double eps_hi);

struct EnsembleDimensionality {
  Estimate dimensionality;  // 1 / <<Q_psi>_eps>_psi
  Estimate mean_husimi;     // <<Q_psi>_eps>_psi
  std::size_t n_states = 0;
  std::size_t n_levels = 0;
};

/// Ensemble estimate of D(eps, rho_R). Each member is a fresh random state; its Husimi
/// function is averaged over the shell sample, then averaged over members.
EnsembleDimensionality dimensionality_empirical(const RandomStateSpec& spec, const EigenDecomposition& dec,
                                                const DensityOfStates& nu, const ShellSample& s,
                                                const ShellOverlaps& overlaps, std::size_t n_states);

/// Ensemble dimensionality of explicitly given coefficient vectors (rows, over `levels`).
EnsembleDimensionality dimensionality_of_states(const Eigen::MatrixXcd& coefficients,
                                                const std::vector<std::size_t>& levels, const ShellSample& s,
                                                const ShellOverlaps& overlaps);

/// (sum_k w_k <Q_phi_k>_eps)^-1 with the Gaussian shell approximation for each eigenstate.
Estimate dimensionality_semianalytic(const EnergyProfile& profile, const EigenDecomposition& dec,
                                     const DensityOfStates& nu, const ShellSample& s);

/// 2 sqrt(3) nu sigma_r / <erf(sqrt(3/2) sigma_r / sigma_x)>.
Estimate dimensionality_rect_closed(double sigma_r, const ShellSample& s);
/// sqrt(2 pi) nu sigma_g / <(1 + (sigma_x/sigma_g)^2)^(-1/2)>.
Estimate dimensionality_gauss_closed(double sigma_g, const ShellSample& s);

/// Wide-profile asymptotes and the common narrow-profile floor.
double rect_wide_asymptote(double sigma_r, double nu);
double gauss_wide_asymptote(double sigma_g, double nu);
double narrow_floor(double nu, double sigma_bar);

/// Mean of |<Psi|Phi>|^2 over Haar-random unit vectors Phi in C^N, Psi = e_0.
Estimate haar_overlap_average(std::size_t n, std::size_t n_samples, std::uint64_t seed);

/// Mean of |<Psi|phi>|^2 for phi Haar-random in the span of the first `subspace_dim` basis
/// vectors of C^N, with Psi a fixed unit vector of C^N.
Estimate haar_subspace_overlap_average(const Eigen::VectorXcd& psi, std::size_t subspace_dim,
                                       std::size_t n_samples, std::uint64_t seed);

/// Average over independent uniform phases theta_k of |sum_k a_k e^{i theta_k}|^2.
Estimate random_phase_intensity(const Eigen::VectorXcd& amplitudes, std::size_t n_samples, std::uint64_t seed);

}  // namespace dickedim
