#include "dickedim/effdim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dickedim/coherent.hpp"
#include "dickedim/husimi.hpp"

namespace dickedim {

std::vector<double> sigma_values(const ShellSample& s) {
  std::vector<double> out(s.points.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigma_x_analytic(s.points[i].x, s.params);
  return out;
}

Estimate harmonic_mean_sigma(const ShellSample& s) {
  auto inv = sigma_values(s);
  for (double& v : inv) {
    if (!(v > 0.0)) throw NumericalError("sigma_x vanishes at a shell point");
    v = 1.0 / v;
  }
  const Estimate u = shell_average_values(s, inv);
  return {1.0 / u.value, u.error / (u.value * u.value)};
}

Estimate arithmetic_mean_sigma(const ShellSample& s) { return shell_average_values(s, sigma_values(s)); }

EffectiveDimension effective_dimension(const ShellSample& s) {
  auto sig = sigma_values(s);
  std::vector<double> inv(sig.size());
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (!(sig[i] > 0.0)) throw NumericalError("sigma_x vanishes at a shell point");
    inv[i] = 1.0 / sig[i];
  }

  EffectiveDimension out;
  out.epsilon = s.epsilon;
  out.j = s.params.j;
  out.nu = s.nu;
  out.sigma_bar = harmonic_mean_sigma(s);
  out.sigma_mean = shell_average_values(s, sig);

  const Estimate ratio = nu_over_average(s, inv);
  out.value = {kSqrtTwoPi * ratio.value, kSqrtTwoPi * ratio.error};
  return out;
}

EffectiveDimension effective_dimension(double eps, const ModelParams& params, std::uint64_t n_draws,
                                       std::uint64_t seed) {
  return effective_dimension(sample_shell(eps, n_draws, seed, params));
}

ScalingFit effective_dimension_scaling(double eps, const ModelParams& base, const std::vector<double>& js,
                                       std::uint64_t n_draws, std::uint64_t seed) {
  if (js.size() < 2) throw std::invalid_argument("scaling fit needs at least two system sizes");
  ScalingFit fit;
  fit.j = js;
  std::vector<double> x, y, sy;
  for (double j : js) {
    ModelParams p = base;
    p.j = j;
    fit.points.push_back(effective_dimension(eps, p, n_draws, seed));
    x.push_back(std::log(j));
    y.push_back(std::log(fit.points.back().value.value));
    sy.push_back(fit.points.back().value.relative_error());
  }
  const double m = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / m;
    my += y[i] / m;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  fit.slope = sxy / sxx;
  // Conservative: treats the per-point errors as independent.
  double var = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) var += std::pow((x[i] - mx) / sxx * sy[i], 2);
  fit.slope_error = std::sqrt(var);
  return fit;
}

EigenDimensionReport effdim_vs_eigenstates_report(double eps_lo, double eps_hi, const EigenDecomposition& dec,
                                                  std::uint64_t n_draws, std::uint64_t seed) {
  if (dec.params.gamma == 0.0) {
    throw std::invalid_argument("the uncoupled (gamma = 0) model is integrable; the Gaussian shell ansatz does not apply");
  }
  EigenDimensionReport rep;
  std::vector<double> dev;
  for (std::size_t k = 0; k < dec.converged_count; ++k) {
    const double e = dec.energies(static_cast<Eigen::Index>(k));
    if (e < eps_lo || e > eps_hi) continue;
    const ShellSample s = sample_shell(e, n_draws, seed + k, dec.params);
    EigenDimensionRow row;
    row.k = k;
    row.eps_k = e;
    row.parity = dec.parities[k];
    row.dimensionality = eigenstate_dimensionality(dec, k, s);
    row.effective = effective_dimension(s).value;
    row.ratio = row.dimensionality.value / row.effective.value;
    dev.push_back(std::abs(row.ratio - 1.0));
    rep.mean_ratio += row.ratio;
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) throw std::invalid_argument("no converged level inside the requested window");
  rep.mean_ratio /= static_cast<double>(rep.rows.size());
  std::sort(dev.begin(), dev.end());
  const std::size_t h = dev.size() / 2;
  rep.median_abs_deviation = dev.size() % 2 ? dev[h] : 0.5 * (dev[h - 1] + dev[h]);
  return rep;
}

}  // namespace dickedim
