#include "dickedim/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include "dickedim/effdim.hpp"
#include "dickedim/husimi.hpp"
#include "dickedim/rng.hpp"

namespace dickedim {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kGaussianReach = 8.0;  // sigmas kept on each side of a Gaussian profile
constexpr std::size_t kStateBlock = 64;

// Neumaier-compensated running sum, so ensemble means do not depend on reduction order
// beyond rounding of the final result.
struct CompensatedSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x) {
    const double t = sum + x;
    c += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + c; }
};

double draw_magnitude(MagnitudeDistribution d, std::mt19937_64& rng) {
  switch (d) {
    case MagnitudeDistribution::exponential: {
      std::exponential_distribution<double> e(1.0);
      return e(rng);
    }
    case MagnitudeDistribution::squared_real_normal: {
      std::normal_distribution<double> n(0.0, 1.0);
      const double z = n(rng);
      return z * z;
    }
    case MagnitudeDistribution::squared_complex_normal: {
      std::normal_distribution<double> n(0.0, std::sqrt(0.5));
      const double a = n(rng), b = n(rng);
      return a * a + b * b;
    }
  }
  throw std::logic_error("unknown magnitude distribution");
}

// Coefficients on w.levels (same order) for one ensemble member.
Eigen::VectorXcd draw_coefficients(const ProfileWeights& w, MagnitudeDistribution d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const auto n = static_cast<Eigen::Index>(w.levels.size());
  Eigen::VectorXd mag(n);
  Eigen::VectorXd th(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    mag(i) = draw_magnitude(d, rng) * w.weights[static_cast<std::size_t>(i)];
    th(i) = phase(rng);
  }
  const double m = mag.sum();
  if (!(m > 0.0)) throw NumericalError("random state has zero norm");
  Eigen::VectorXcd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = std::polar(std::sqrt(mag(i) / m), th(i));
  return c;
}

double mean_of(const std::vector<double>& v) {
  CompensatedSum s;
  for (double x : v) s.add(x);
  return s.value() / static_cast<double>(v.size());
}

Estimate mean_and_error(const std::vector<double>& v) {
  const double m = mean_of(v);
  if (v.size() < 2) return {m, 0.0};
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  var /= static_cast<double>(v.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

EnergyProfile EnergyProfile::delta(double center) {
  EnergyProfile p;
  p.kind_ = ProfileKind::delta;
  p.center_ = center;
  return p;
}

EnergyProfile EnergyProfile::rectangular(double center, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("rectangular profile width must be positive");
  EnergyProfile p;
  p.kind_ = ProfileKind::rectangular;
  p.center_ = center;
  p.width_ = sigma;
  return p;
}

EnergyProfile EnergyProfile::gaussian(double center, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian profile width must be positive");
  EnergyProfile p;
  p.kind_ = ProfileKind::gaussian;
  p.center_ = center;
  p.width_ = sigma;
  return p;
}

EnergyProfile EnergyProfile::custom(std::vector<double> eps, std::vector<double> density) {
  if (eps.size() < 2 || eps.size() != density.size()) {
    throw std::invalid_argument("tabulated profile needs matching grids of at least two points");
  }
  double area = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (density[i] < 0.0) throw std::invalid_argument("profile density must be non-negative");
    if (i > 0) {
      if (!(eps[i] > eps[i - 1])) throw std::invalid_argument("profile grid must be increasing");
      area += 0.5 * (density[i] + density[i - 1]) * (eps[i] - eps[i - 1]);
    }
  }
  if (!(area > 0.0)) throw std::invalid_argument("profile density integrates to zero");
  EnergyProfile p;
  p.kind_ = ProfileKind::custom;
  double first = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    density[i] /= area;
    if (i > 0) first += 0.25 * (density[i] + density[i - 1]) * (eps[i] * eps[i] - eps[i - 1] * eps[i - 1]);
  }
  p.center_ = first;  // approximate mean, only used for labels
  p.table_eps_ = std::move(eps);
  p.table_rho_ = std::move(density);
  return p;
}

double EnergyProfile::density(double eps) const {
  switch (kind_) {
    case ProfileKind::delta:
      return 0.0;  // singular; handled by callers
    case ProfileKind::rectangular:
      return std::abs(eps - center_) <= kSqrt3 * width_ ? 1.0 / (2.0 * kSqrt3 * width_) : 0.0;
    case ProfileKind::gaussian: {
      const double u = (eps - center_) / width_;
      if (std::abs(u) > kGaussianReach) return 0.0;
      return std::exp(-0.5 * u * u) / (kSqrtTwoPi * width_);
    }
    case ProfileKind::custom: {
      if (eps < table_eps_.front() || eps > table_eps_.back()) return 0.0;
      const auto it = std::upper_bound(table_eps_.begin(), table_eps_.end(), eps);
      if (it == table_eps_.end()) return table_rho_.back();
      const auto i = static_cast<std::size_t>(it - table_eps_.begin());
      const double t = (eps - table_eps_[i - 1]) / (table_eps_[i] - table_eps_[i - 1]);
      return (1.0 - t) * table_rho_[i - 1] + t * table_rho_[i];
    }
  }
  return 0.0;
}

std::pair<double, double> EnergyProfile::support() const {
  switch (kind_) {
    case ProfileKind::delta:
      return {center_, center_};
    case ProfileKind::rectangular:
      return {center_ - kSqrt3 * width_, center_ + kSqrt3 * width_};
    case ProfileKind::gaussian:
      return {center_ - kGaussianReach * width_, center_ + kGaussianReach * width_};
    case ProfileKind::custom:
      return {table_eps_.front(), table_eps_.back()};
  }
  return {center_, center_};
}

double EnergyProfile::mass_above(double eps) const {
  switch (kind_) {
    case ProfileKind::delta:
      return center_ > eps ? 1.0 : 0.0;
    case ProfileKind::rectangular: {
      const auto [lo, hi] = support();
      return std::clamp((hi - eps) / (hi - lo), 0.0, 1.0);
    }
    case ProfileKind::gaussian:
      return 0.5 * std::erfc((eps - center_) / (std::sqrt(2.0) * width_));
    case ProfileKind::custom: {
      double m = 0.0;
      for (std::size_t i = 1; i < table_eps_.size(); ++i) {
        const double a = std::max(eps, table_eps_[i - 1]);
        const double b = table_eps_[i];
        if (b <= a) continue;
        m += 0.5 * (density(a) + density(b)) * (b - a);
      }
      return m;
    }
  }
  return 0.0;
}

ProfileWeights profile_weights(const EnergyProfile& profile, const EigenDecomposition& dec,
                               const DensityOfStates& nu) {
  if (dec.converged_count == 0) throw std::invalid_argument("decomposition has no converged levels");
  const double top = dec.converged_eps_max();
  if (profile.mass_above(top) > 1e-6) {
    throw std::invalid_argument("energy profile extends beyond the converged spectrum (eps <= " +
                                std::to_string(top) + ")");
  }
  ProfileWeights w;
  if (profile.kind() == ProfileKind::delta) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < dec.converged_count; ++k) {
      if (std::abs(dec.energies(static_cast<Eigen::Index>(k)) - profile.center()) <
          std::abs(dec.energies(static_cast<Eigen::Index>(best)) - profile.center())) {
        best = k;
      }
    }
    w.levels = {best};
    w.weights = {1.0};
    return w;
  }
  double total = 0.0;
  for (std::size_t k = 0; k < dec.converged_count; ++k) {
    const double e = dec.energies(static_cast<Eigen::Index>(k));
    const double rho = profile.density(e);
    if (rho <= 0.0) continue;
    const double v = nu(e);
    if (!(v > 0.0)) throw NumericalError("density of states vanishes inside the profile");
    w.levels.push_back(k);
    w.weights.push_back(rho / v);
    total += rho / v;
  }
  if (w.levels.empty() || !(total > 0.0)) throw std::invalid_argument("no converged level inside the energy profile");
  for (double& x : w.weights) x /= total;
  return w;
}

Eigen::VectorXcd sample_random_state(const RandomStateSpec& spec, const EigenDecomposition& dec,
                                     const DensityOfStates& nu, std::uint64_t member) {
  const ProfileWeights w = profile_weights(spec.profile, dec, nu);
  auto rng = substream(spec.seed, member);
  const Eigen::VectorXcd c = draw_coefficients(w, spec.magnitudes, rng);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dec.n_levels()));
  for (std::size_t i = 0; i < w.levels.size(); ++i) out(static_cast<Eigen::Index>(w.levels[i])) = c(static_cast<Eigen::Index>(i));
  return out;
}

Eigen::Index ShellOverlaps::row_of(std::size_t k) const {
  const auto it = std::find(levels.begin(), levels.end(), k);
  if (it == levels.end()) throw std::out_of_range("level " + std::to_string(k) + " has no precomputed overlaps");
  return static_cast<Eigen::Index>(it - levels.begin());
}

ShellOverlaps compute_shell_overlaps(const EigenDecomposition& dec, const std::vector<std::size_t>& levels,
                                     const ShellSample& s) {
  if (s.params.j != dec.params.j) throw std::invalid_argument("shell sample and decomposition use different j");
  return {levels, eigen_overlaps(dec, levels, shell_points(s))};
}

std::vector<std::size_t> levels_in_window(const EigenDecomposition& dec, double eps_lo, double eps_hi) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < dec.converged_count; ++k) {
    const double e = dec.energies(static_cast<Eigen::Index>(k));
    if (e >= eps_lo && e <= eps_hi) out.push_back(k);
  }
  return out;
}

EnsembleDimensionality dimensionality_of_states(const Eigen::MatrixXcd& coefficients,
                                                const std::vector<std::size_t>& levels, const ShellSample& s,
                                                const ShellOverlaps& overlaps) {
  if (coefficients.cols() != static_cast<Eigen::Index>(levels.size())) {
    throw std::invalid_argument("coefficient columns do not match the level list");
  }
  if (coefficients.rows() < 1) throw std::invalid_argument("need at least one state");
  const auto n_points = static_cast<Eigen::Index>(s.points.size());
  if (overlaps.values.cols() != n_points) throw std::invalid_argument("overlaps were computed on another sample");

  Eigen::MatrixXcd ov(static_cast<Eigen::Index>(levels.size()), n_points);
  for (std::size_t i = 0; i < levels.size(); ++i) ov.row(static_cast<Eigen::Index>(i)) = overlaps.values.row(overlaps.row_of(levels[i]));

  const auto n_states = static_cast<std::size_t>(coefficients.rows());
  std::vector<double> per_state(n_states);
  std::vector<double> pooled(s.points.size(), 0.0);
  for (std::size_t b0 = 0; b0 < n_states; b0 += kStateBlock) {
    const std::size_t nb = std::min(kStateBlock, n_states - b0);
    // <psi|x_i> = sum_k conj(c_k) <phi_k|x_i>
    const Eigen::MatrixXcd amp =
        coefficients.middleRows(static_cast<Eigen::Index>(b0), static_cast<Eigen::Index>(nb)).conjugate() * ov;
    const Eigen::MatrixXd q = amp.cwiseAbs2();
    for (std::size_t r = 0; r < nb; ++r) {
      std::vector<double> row(q.cols());
      for (Eigen::Index i = 0; i < q.cols(); ++i) row[static_cast<std::size_t>(i)] = q(static_cast<Eigen::Index>(r), i);
      per_state[b0 + r] = shell_average_values(s, row).value;
    }
    for (Eigen::Index i = 0; i < q.cols(); ++i) pooled[static_cast<std::size_t>(i)] += q.col(i).sum();
  }
  for (double& v : pooled) v /= static_cast<double>(n_states);

  // Spread over members, plus the shell-sampling error of the pooled (ensemble-mean) Husimi.
  const Estimate members = mean_and_error(per_state);
  const Estimate shell = shell_average_values(s, pooled);
  EnsembleDimensionality out;
  out.n_states = n_states;
  out.n_levels = levels.size();
  out.mean_husimi = {members.value, std::hypot(members.error, shell.error)};
  if (!(out.mean_husimi.value > 0.0)) throw NumericalError("ensemble has zero Husimi weight on the shell");
  const double m = out.mean_husimi.value;
  out.dimensionality = {1.0 / m, out.mean_husimi.error / (m * m)};
  return out;
}

EnsembleDimensionality dimensionality_empirical(const RandomStateSpec& spec, const EigenDecomposition& dec,
                                                const DensityOfStates& nu, const ShellSample& s,
                                                const ShellOverlaps& overlaps, std::size_t n_states) {
  if (n_states < 1) throw std::invalid_argument("need at least one ensemble member");
  const ProfileWeights w = profile_weights(spec.profile, dec, nu);
  Eigen::MatrixXcd coeffs(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(w.levels.size()));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_states); ++i) {
    auto rng = substream(spec.seed, static_cast<std::uint64_t>(i));
    coeffs.row(i) = draw_coefficients(w, spec.magnitudes, rng).transpose();
  }
  return dimensionality_of_states(coeffs, w.levels, s, overlaps);
}

Estimate dimensionality_semianalytic(const EnergyProfile& profile, const EigenDecomposition& dec,
                                     const DensityOfStates& nu, const ShellSample& s) {
  const ProfileWeights w = profile_weights(profile, dec, nu);
  const auto sig = sigma_values(s);
  std::vector<double> eps_k(w.levels.size()), scale(w.levels.size());
  for (std::size_t i = 0; i < w.levels.size(); ++i) {
    eps_k[i] = dec.energies(static_cast<Eigen::Index>(w.levels[i]));
    scale[i] = w.weights[i] / (kSqrtTwoPi * nu(eps_k[i]));
  }
  // Sum over levels first, so the shell error of the whole sum comes out of one estimator.
  std::vector<double> values(sig.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(sig.size()); ++i) {
    const double sx = sig[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (std::size_t l = 0; l < eps_k.size(); ++l) {
      const double d = (eps_k[l] - s.epsilon) / sx;
      acc += scale[l] * std::exp(-0.5 * d * d);
    }
    values[static_cast<std::size_t>(i)] = acc / sx;
  }
  const Estimate avg = shell_average_values(s, values);
  if (!(avg.value > 0.0)) throw NumericalError("profile has no Husimi weight on the shell");
  return {1.0 / avg.value, avg.error / (avg.value * avg.value)};
}

Estimate dimensionality_rect_closed(double sigma_r, const ShellSample& s) {
  if (!(sigma_r > 0.0)) throw std::invalid_argument("sigma_r must be positive");
  auto v = sigma_values(s);
  for (double& x : v) x = std::erf(std::sqrt(1.5) * sigma_r / x);
  const Estimate r = nu_over_average(s, v);
  const double c = 2.0 * kSqrt3 * sigma_r;
  return {c * r.value, c * r.error};
}

Estimate dimensionality_gauss_closed(double sigma_g, const ShellSample& s) {
  if (!(sigma_g > 0.0)) throw std::invalid_argument("sigma_g must be positive");
  auto v = sigma_values(s);
  for (double& x : v) {
    const double t = x / sigma_g;
    x = 1.0 / std::sqrt(1.0 + t * t);
  }
  const Estimate r = nu_over_average(s, v);
  const double c = kSqrtTwoPi * sigma_g;
  return {c * r.value, c * r.error};
}

double rect_wide_asymptote(double sigma_r, double nu) { return 2.0 * kSqrt3 * nu * sigma_r; }
double gauss_wide_asymptote(double sigma_g, double nu) { return kSqrtTwoPi * nu * sigma_g; }
double narrow_floor(double nu, double sigma_bar) { return kSqrtTwoPi * nu * sigma_bar; }

Estimate haar_overlap_average(std::size_t n, std::size_t n_samples, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("dimension must be at least 1");
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  std::vector<double> v(n_samples);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(n_samples); ++t) {
    auto rng = substream(seed, static_cast<std::uint64_t>(t));
    std::normal_distribution<double> g(0.0, 1.0);
    double first = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double a = g(rng), b = g(rng);
      const double p = a * a + b * b;
      if (i == 0) first = p;
      total += p;
    }
    v[static_cast<std::size_t>(t)] = first / total;
  }
  return mean_and_error(v);
}

Estimate haar_subspace_overlap_average(const Eigen::VectorXcd& psi, std::size_t subspace_dim,
                                       std::size_t n_samples, std::uint64_t seed) {
  if (subspace_dim < 1 || subspace_dim > static_cast<std::size_t>(psi.size())) {
    throw std::invalid_argument("subspace dimension out of range");
  }
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("reference state is zero");
  const Eigen::VectorXcd ref = psi.head(static_cast<Eigen::Index>(subspace_dim)) / norm;
  std::vector<double> v(n_samples);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(n_samples); ++t) {
    auto rng = substream(seed, static_cast<std::uint64_t>(t));
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::VectorXcd phi(ref.size());
    for (Eigen::Index i = 0; i < phi.size(); ++i) phi(i) = {g(rng), g(rng)};
    phi.normalize();
    v[static_cast<std::size_t>(t)] = std::norm(ref.dot(phi));
  }
  return mean_and_error(v);
}

Estimate random_phase_intensity(const Eigen::VectorXcd& amplitudes, std::size_t n_samples, std::uint64_t seed) {
  std::vector<double> v(n_samples);
#pragma omp parallel for schedule(static)
  for (std::int64_t t = 0; t < static_cast<std::int64_t>(n_samples); ++t) {
    auto rng = substream(seed, static_cast<std::uint64_t>(t));
    std::uniform_real_distribution<double> phase(0.0, kTwoPi);
    std::complex<double> acc = 0.0;
    for (Eigen::Index k = 0; k < amplitudes.size(); ++k) acc += amplitudes(k) * std::polar(1.0, phase(rng));
    v[static_cast<std::size_t>(t)] = std::norm(acc);
  }
  return mean_and_error(v);
}

}  // namespace dickedim
