#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "dickedim/classical.hpp"
#include "dickedim/ensembles.hpp"
#include "dickedim/model.hpp"

namespace dickedim {

/// (sum |c_k|^4)^-1 for a normalized state; non-normalized input is normalized first.
double participation_ratio(const Eigen::Ref<const Eigen::VectorXcd>& c);

enum class AmplitudeKind { goe, gue };  // real / complex standard normal z_k

/// Converged levels with eps in [eps_i, eps_f]; with `positive_parity_only` the negative-parity
/// levels are dropped.
std::vector<std::size_t> window_indices(const EigenDecomposition& dec, double eps_i, double eps_f,
                                        bool positive_parity_only);

/// c_k = z_k / sqrt(sum |z_l|^2) on the window (zero elsewhere), over all levels of `dec`.
Eigen::VectorXcd rect_window_random_state(const EigenDecomposition& dec, double eps_i, double eps_f,
                                          AmplitudeKind kind, bool positive_parity_only, std::uint64_t seed,
                                          std::uint64_t member = 0);

/// n_states x levels.size() coefficients; row r is member r of the same substream family
/// as rect_window_random_state.
Eigen::MatrixXcd window_random_coefficients(std::size_t n_levels, AmplitudeKind kind, std::size_t n_states,
                                            std::uint64_t seed);

/// <|z|^4> / <|z|^2>^2 for the amplitude distribution, with a delta-method error.
Estimate amplitude_moment_ratio(AmplitudeKind kind, std::size_t n_samples, std::uint64_t seed);

struct PrSweepRow {
  double width = 0.0;       // eps_f - eps_i
  std::size_t k_size = 0;   // |K|
  std::size_t k_filtered = 0;  // |K'|
  EnsembleDimensionality d_filtered;    // GOE, positive parity only
  EnsembleDimensionality d_unfiltered;  // GOE, whole window
  Estimate d_closed;        // rectangular closed form with sigma_r = width / (2 sqrt 3)
  Estimate pr_filtered;     // <P_R> over the filtered ensemble
  Estimate pr_unfiltered;
  double deff_floor = 0.0;  // sqrt(2 pi) nu sigma_bar at the center
  Estimate capture;         // sum over K of <Q_phi_k>_eps; D -> |K| once this reaches 1
};

/// Windows centered on the shell energy of `s`, one per width. `overlaps` must cover every
/// level of the widest window.
std::vector<PrSweepRow> pr_vs_dimensionality_sweep(const EigenDecomposition& dec, const ShellSample& s,
                                                   const ShellOverlaps& overlaps, const std::vector<double>& widths,
                                                   std::size_t n_states, std::uint64_t seed);

}  // namespace dickedim
