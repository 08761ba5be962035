#include "dickedim/coherent.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "dickedim/special.hpp"

namespace dickedim {

namespace {

using RowGrid = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowGridC = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// sum_{n > n_max} e^{-|a|^2} |a|^{2n} / n!, summed directly in log form.
double poisson_tail(double mean, int n_max) {
  if (mean == 0.0) return 0.0;
  const double log_mean = std::log(mean);
  double tail = 0.0;
  for (int n = n_max + 1;; ++n) {
    const double term = std::exp(-mean + n * log_mean - log_factorial(n));
    tail += term;
    if (n > mean && term < 1e-300 + 1e-18 * tail) break;
  }
  return tail;
}

void check_state_size(Eigen::Index size, const CoherentAmplitudes& amps) {
  if (size != amps.boson.size() * amps.atom.size()) {
    throw std::invalid_argument("state dimension does not match the coherent-state basis");
  }
}

}  // namespace

Eigen::VectorXcd CoherentAmplitudes::full() const {
  Eigen::VectorXcd out(boson.size() * atom.size());
  for (Eigen::Index n = 0; n < boson.size(); ++n) out.segment(n * atom.size(), atom.size()) = boson(n) * atom;
  return out;
}

CoherentAmplitudes coherent_amplitudes(const PhasePoint& x, const BasisSpec& basis) {
  basis.validate();
  const double r2 = x.atomic_radius2();
  if (!(r2 < 4.0)) throw std::domain_error("coherent state undefined on the boundary Q^2 + P^2 = 4");

  const double j = basis.j;
  const int two_j = basis.two_j();
  CoherentAmplitudes amps;
  amps.x = x;
  amps.j = j;

  // Glauber factor: alpha = sqrt(j/2) (q + i p).
  const std::complex<double> alpha = std::sqrt(j / 2.0) * std::complex<double>(x.q, x.p);
  const double abs2 = std::norm(alpha);
  const double log_abs = abs2 > 0.0 ? 0.5 * std::log(abs2) : 0.0;
  const double arg = std::arg(alpha);
  amps.boson.resize(basis.n_max + 1);
  for (int n = 0; n <= basis.n_max; ++n) {
    if (abs2 == 0.0) {
      amps.boson(n) = n == 0 ? 1.0 : 0.0;
      continue;
    }
    const double log_mag = -0.5 * abs2 + n * log_abs - 0.5 * log_factorial(n);
    amps.boson(n) = std::polar(std::exp(log_mag), n * arg);
  }
  amps.boson_tail = poisson_tail(abs2, basis.n_max);

  // Bloch factor: zeta = (Q + i P) / sqrt(4 - Q^2 - P^2); k = j + m.
  const double log_base = j * std::log1p(-r2 / 4.0);
  const double zeta_abs2 = r2 / (4.0 - r2);
  const double log_zeta = zeta_abs2 > 0.0 ? 0.5 * std::log(zeta_abs2) : 0.0;
  const double zeta_arg = std::atan2(x.P, x.Q);
  amps.atom.resize(two_j + 1);
  for (int k = 0; k <= two_j; ++k) {
    if (zeta_abs2 == 0.0) {
      amps.atom(k) = k == 0 ? 1.0 : 0.0;
      continue;
    }
    const double log_mag = 0.5 * log_binomial(two_j, k) + log_base + k * log_zeta;
    amps.atom(k) = std::polar(std::exp(log_mag), k * zeta_arg);
  }
  return amps;
}

std::complex<double> coherent_overlap(const Eigen::Ref<const Eigen::VectorXd>& psi, const CoherentAmplitudes& amps) {
  check_state_size(psi.size(), amps);
  Eigen::Map<const RowGrid> grid(psi.data(), amps.boson.size(), amps.atom.size());
  return amps.boson.transpose() * (grid.cast<std::complex<double>>() * amps.atom);
}

std::complex<double> coherent_overlap(const Eigen::Ref<const Eigen::VectorXcd>& psi, const CoherentAmplitudes& amps) {
  check_state_size(psi.size(), amps);
  Eigen::Map<const RowGridC> grid(psi.data(), amps.boson.size(), amps.atom.size());
  return amps.boson.transpose() * (grid.conjugate() * amps.atom);
}

double husimi_overlap(const Eigen::Ref<const Eigen::VectorXd>& psi, const CoherentAmplitudes& amps) {
  return std::norm(coherent_overlap(psi, amps));
}

double husimi_overlap(const Eigen::Ref<const Eigen::VectorXcd>& psi, const CoherentAmplitudes& amps) {
  return std::norm(coherent_overlap(psi, amps));
}

EnergyVarianceTerms energy_variance_terms(const PhasePoint& x, const ModelParams& params) {
  const double a = atomic_factor(x.Q, x.P);
  const double a2 = a * a;
  const double r2 = x.atomic_radius2();
  const double g = params.gamma;
  const double w = params.omega;
  const double w0 = params.omega0;
  const double half = 1.0 - r2 / 2.0;

  EnergyVarianceTerms t;
  const double omega2_over_g2 = x.P * x.P * a2 + half * half;
  t.omega2 = g * g * omega2_over_g2;
  t.omega1 = params.j * (0.5 * w * w * (x.q * x.q + x.p * x.p) + 0.5 * w0 * w0 * r2 * a2 +
                         2.0 * g * g * (x.q * x.q * omega2_over_g2 + x.Q * x.Q * a2) +
                         2.0 * g * x.q * x.Q * (w + w0 * half) * a);
  return t;
}

double sigma_x_analytic(const PhasePoint& x, const ModelParams& params) {
  params.validate();
  const auto t = energy_variance_terms(x, params);
  const double radicand = t.omega1 + t.omega2;
  if (radicand < 0.0) throw NumericalError("negative coherent-state energy variance");
  return std::sqrt(radicand) / params.j;
}

CoherentMoments coherent_moments_quantum(const PhasePoint& x, const ModelParams& params, const BasisSpec& basis) {
  BasisSpec full = basis;
  full.sector = Parity::all;
  const auto amps = coherent_amplitudes(x, full);
  if (amps.boson_tail > 1e-12) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", amps.boson_tail);
    throw NumericalError(std::string("bosonic truncation too small for coherent-state moments (tail ") + buf + ")");
  }
  const Eigen::VectorXcd c = amps.full();
  const Eigen::SparseMatrix<double> h = build_hamiltonian_sparse(params, full);
  const Eigen::VectorXcd hc = h.cast<std::complex<double>>() * c;
  const double mean = c.dot(hc).real();
  const double second = hc.squaredNorm();
  const double var = std::max(second - mean * mean, 0.0);
  return {mean / params.j, std::sqrt(var) / params.j};
}

double sigma_x_quantum(const PhasePoint& x, const ModelParams& params, const BasisSpec& basis) {
  return coherent_moments_quantum(x, params, basis).sigma;
}

}  // namespace dickedim
