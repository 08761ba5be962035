#pragma once

#include <complex>

#include <Eigen/Dense>

#include "dickedim/classical.hpp"
#include "dickedim/model.hpp"

namespace dickedim {

/// Expansion of |x> = |q,p> (x) |Q,P> on the truncated Fock (x) pseudospin basis. The state is
/// a product, so it is stored as its two factors: C(n, m) = boson(n) * atom(j + m).
struct CoherentAmplitudes {
  PhasePoint x;
  double j = 0.0;
  Eigen::VectorXcd boson;  // <n|q,p>, n = 0..n_max
  Eigen::VectorXcd atom;   // <j,m|Q,P>, index j + m = 0..2j
  double boson_tail = 0.0; // 1 - sum_n |<n|q,p>|^2 beyond the cutoff

  bool truncated(double tol = 1e-10) const { return boson_tail > tol; }
  /// Flattened coefficients in the n-major, m-minor basis order.
  Eigen::VectorXcd full() const;
};

/// Glauber and Bloch amplitudes assembled in log-magnitude / phase form (no factorial or
/// binomial is ever formed directly). Requires Q^2 + P^2 < 4.
CoherentAmplitudes coherent_amplitudes(const PhasePoint& x, const BasisSpec& basis);

/// <psi|x> for a real state on the full truncated basis.
std::complex<double> coherent_overlap(const Eigen::Ref<const Eigen::VectorXd>& psi, const CoherentAmplitudes& amps);
/// <psi|x> for a complex state on the full truncated basis.
std::complex<double> coherent_overlap(const Eigen::Ref<const Eigen::VectorXcd>& psi, const CoherentAmplitudes& amps);

/// Husimi function |<psi|x>|^2.
double husimi_overlap(const Eigen::Ref<const Eigen::VectorXd>& psi, const CoherentAmplitudes& amps);
double husimi_overlap(const Eigen::Ref<const Eigen::VectorXcd>& psi, const CoherentAmplitudes& amps);

/// The two pieces of j^2 sigma_x^2 = Omega1 + Omega2.
struct EnergyVarianceTerms {
  double omega1 = 0.0;
  double omega2 = 0.0;
};
EnergyVarianceTerms energy_variance_terms(const PhasePoint& x, const ModelParams& params);

/// Closed-form energy standard deviation of |x>, rescaled by 1/j.
double sigma_x_analytic(const PhasePoint& x, const ModelParams& params);

/// Brute-force mean and spread of H in |x> from the truncated basis.
struct CoherentMoments {
  double mean = 0.0;   // <x|H|x> / j
  double sigma = 0.0;  // sqrt(<H^2> - <H>^2) / j
};
/// Throws NumericalError when the Glauber tail beyond n_max exceeds 1e-12.
CoherentMoments coherent_moments_quantum(const PhasePoint& x, const ModelParams& params, const BasisSpec& basis);

double sigma_x_quantum(const PhasePoint& x, const ModelParams& params, const BasisSpec& basis);

}  // namespace dickedim
