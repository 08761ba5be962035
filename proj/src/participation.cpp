#include "dickedim/participation.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "dickedim/effdim.hpp"
#include "dickedim/rng.hpp"

namespace dickedim {

namespace {

std::complex<double> draw_amplitude(AmplitudeKind kind, std::normal_distribution<double>& g, std::mt19937_64& rng) {
  if (kind == AmplitudeKind::goe) return {g(rng), 0.0};
  // unit variance overall: E|z|^2 = 1
  return {g(rng) * std::sqrt(0.5), g(rng) * std::sqrt(0.5)};
}

Estimate mean_and_error(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  if (v.size() < 2) return {m, 0.0};
  double var = 0.0;
  for (double x : v) var += (x - m) * (x - m);
  return {m, std::sqrt(var / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()))};
}

}  // namespace

double participation_ratio(const Eigen::Ref<const Eigen::VectorXcd>& c) {
  const double n2 = c.squaredNorm();
  if (!(n2 > 0.0)) throw std::invalid_argument("participation ratio of a zero vector");
  const double n4 = c.cwiseAbs2().squaredNorm();
  return n2 * n2 / n4;
}

std::vector<std::size_t> window_indices(const EigenDecomposition& dec, double eps_i, double eps_f,
                                        bool positive_parity_only) {
  if (!(eps_f > eps_i)) throw std::invalid_argument("window must have eps_f > eps_i");
  if (eps_f > dec.converged_eps_max()) throw std::invalid_argument("window extends beyond the converged spectrum");
  std::vector<std::size_t> out;
  for (auto k : levels_in_window(dec, eps_i, eps_f)) {
    if (positive_parity_only && dec.parities[k] != 1) continue;
    out.push_back(k);
  }
  return out;
}

Eigen::MatrixXcd window_random_coefficients(std::size_t n_levels, AmplitudeKind kind, std::size_t n_states,
                                            std::uint64_t seed) {
  if (n_levels == 0) throw std::invalid_argument("empty window");
  Eigen::MatrixXcd c(static_cast<Eigen::Index>(n_states), static_cast<Eigen::Index>(n_levels));
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < static_cast<std::int64_t>(n_states); ++r) {
    auto rng = substream(seed, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> g(0.0, 1.0);
    for (Eigen::Index k = 0; k < c.cols(); ++k) c(r, k) = draw_amplitude(kind, g, rng);
    c.row(r).normalize();
  }
  return c;
}

Eigen::VectorXcd rect_window_random_state(const EigenDecomposition& dec, double eps_i, double eps_f,
                                          AmplitudeKind kind, bool positive_parity_only, std::uint64_t seed,
                                          std::uint64_t member) {
  const auto levels = window_indices(dec, eps_i, eps_f, positive_parity_only);
  if (levels.empty()) throw std::invalid_argument("no level inside the window");
  auto rng = substream(seed, member);
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd z(static_cast<Eigen::Index>(levels.size()));
  for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = draw_amplitude(kind, g, rng);
  z.normalize();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dec.n_levels()));
  for (std::size_t i = 0; i < levels.size(); ++i) out(static_cast<Eigen::Index>(levels[i])) = z(static_cast<Eigen::Index>(i));
  return out;
}

Estimate amplitude_moment_ratio(AmplitudeKind kind, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("need at least two samples");
  auto rng = substream(seed, 0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> a(n_samples), b(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double p = std::norm(draw_amplitude(kind, g, rng));
    a[i] = p * p;
    b[i] = p;
  }
  const Estimate m4 = mean_and_error(a), m2 = mean_and_error(b);
  double cov = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) cov += (a[i] - m4.value) * (b[i] - m2.value);
  cov /= static_cast<double>(n_samples - 1) * static_cast<double>(n_samples);
  // r = m4 / m2^2
  const double r = m4.value / (m2.value * m2.value);
  const double ga = 1.0 / (m2.value * m2.value);
  const double gb = -2.0 * m4.value / (m2.value * m2.value * m2.value);
  const double var = ga * ga * m4.error * m4.error + gb * gb * m2.error * m2.error + 2.0 * ga * gb * cov;
  return {r, std::sqrt(std::max(var, 0.0))};
}

std::vector<PrSweepRow> pr_vs_dimensionality_sweep(const EigenDecomposition& dec, const ShellSample& s,
                                                   const ShellOverlaps& overlaps, const std::vector<double>& widths,
                                                   std::size_t n_states, std::uint64_t seed) {
  const double center = s.epsilon;
  const EffectiveDimension deff = effective_dimension(s);
  std::vector<PrSweepRow> rows;
  for (std::size_t w = 0; w < widths.size(); ++w) {
    const double width = widths[w];
    PrSweepRow row;
    row.width = width;
    row.deff_floor = deff.value.value;
    const auto all = window_indices(dec, center - 0.5 * width, center + 0.5 * width, false);
    const auto pos = window_indices(dec, center - 0.5 * width, center + 0.5 * width, true);
    row.k_size = all.size();
    row.k_filtered = pos.size();
    if (pos.empty()) throw std::invalid_argument("window of width " + std::to_string(width) + " holds no level");

    const Eigen::MatrixXcd c_all = window_random_coefficients(all.size(), AmplitudeKind::goe, n_states, seed + 2 * w);
    const Eigen::MatrixXcd c_pos = window_random_coefficients(pos.size(), AmplitudeKind::goe, n_states, seed + 2 * w + 1);
    row.d_unfiltered = dimensionality_of_states(c_all, all, s, overlaps);
    row.d_filtered = dimensionality_of_states(c_pos, pos, s, overlaps);
    std::vector<double> pr_all(n_states), pr_pos(n_states);
    for (std::size_t r = 0; r < n_states; ++r) {
      pr_all[r] = participation_ratio(c_all.row(static_cast<Eigen::Index>(r)).transpose());
      pr_pos[r] = participation_ratio(c_pos.row(static_cast<Eigen::Index>(r)).transpose());
    }
    row.pr_unfiltered = mean_and_error(pr_all);
    row.pr_filtered = mean_and_error(pr_pos);
    std::vector<double> captured(s.points.size(), 0.0);
    for (auto k : all) {
      const auto r = overlaps.row_of(k);
      for (std::size_t i = 0; i < captured.size(); ++i) captured[i] += std::norm(overlaps.values(r, static_cast<Eigen::Index>(i)));
    }
    row.capture = shell_average_values(s, captured);
    row.d_closed = dimensionality_rect_closed(width / (2.0 * std::sqrt(3.0)), s);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dickedim
