#include "dickedim/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "dickedim/rng.hpp"

namespace dickedim {

namespace {

constexpr std::uint64_t kChunkDraws = 1u << 15;

struct RawDraw {
  double p;
  double Q;
  double P;
};

// Uniform (p, Q, P) on [-p_max, p_max] x disk of radius 2. Three uniforms per draw, in a fixed
// order, so that shells at different energies share random numbers for the same seed.
RawDraw next_draw(std::mt19937_64& rng, double p_max) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double up = unit(rng);
  const double ur = unit(rng);
  const double ut = unit(rng);
  const double r = 2.0 * std::sqrt(ur);
  const double theta = kTwoPi * ut;
  return {(2.0 * up - 1.0) * p_max, r * std::cos(theta), r * std::sin(theta)};
}

double p_extent(double eps, const ModelParams& params) {
  return std::sqrt(2.0 * (eps - classical_ground_energy(params)) / params.omega);
}

}  // namespace

double atomic_factor(double Q, double P) {
  const double r2 = Q * Q + P * P;
  if (r2 > 4.0) throw std::domain_error("atomic variables outside the disk Q^2 + P^2 <= 4");
  return std::sqrt(1.0 - r2 / 4.0);
}

double h_cl(const PhasePoint& x, const ModelParams& params) {
  const double a = atomic_factor(x.Q, x.P);
  return 0.5 * params.omega * (x.q * x.q + x.p * x.p) + 0.5 * params.omega0 * x.atomic_radius2() - params.omega0 +
         2.0 * params.gamma * x.q * x.Q * a;
}

std::array<double, 4> grad_h_cl(const PhasePoint& x, const ModelParams& params) {
  const double a = atomic_factor(x.Q, x.P);
  const double g = params.gamma;
  // dA/dQ = -Q/(4A), dA/dP = -P/(4A); the coupling term 2 g q Q A.
  const double da_scale = a > 0.0 ? 1.0 / (4.0 * a) : 0.0;
  if (a == 0.0 && x.q != 0.0) throw std::domain_error("gradient undefined on the atomic boundary");
  return {
      params.omega * x.q + 2.0 * g * x.Q * a,
      params.omega * x.p,
      params.omega0 * x.Q + 2.0 * g * x.q * (a - x.Q * x.Q * da_scale),
      params.omega0 * x.P - 2.0 * g * x.q * x.Q * x.P * da_scale,
  };
}

double classical_ground_energy(const ModelParams& params) {
  params.validate();
  // q = -2 g Q A / w and P = 0 at the minimum; with u = Q^2 the remaining function is
  // -(2 g^2 / w) u (1 - u/4) + w0 u / 2 - w0, stationary at u = 2 (1 - w w0 / (4 g^2)).
  const double g2 = params.gamma * params.gamma;
  if (g2 <= 0.0) return -params.omega0;
  const double u = 2.0 * (1.0 - params.omega * params.omega0 / (4.0 * g2));
  if (u <= 0.0) return -params.omega0;
  return -(2.0 * g2 / params.omega) * u * (1.0 - u / 4.0) + 0.5 * params.omega0 * u - params.omega0;
}

QRoots q_roots_on_shell(double p, double Q, double P, double eps, const ModelParams& params) {
  const double a_fac = atomic_factor(Q, P);
  const double a = 0.5 * params.omega;
  const double b = 2.0 * params.gamma * Q * a_fac;
  const double c = 0.5 * params.omega * p * p + 0.5 * params.omega0 * (Q * Q + P * P) - params.omega0 - eps;
  const double disc = b * b - 4.0 * a * c;
  QRoots out;
  if (disc < 0.0) return out;
  if (disc == 0.0) {
    out.count = 1;
    out.q[0] = -b / (2.0 * a);
    return out;
  }
  const double t = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = t / a;
  double r2 = (t != 0.0) ? c / t : -r1;
  if (r1 > r2) std::swap(r1, r2);
  out.count = 2;
  out.q = {r1, r2};
  return out;
}

ShellSample sample_shell(double eps, std::uint64_t n_draws, std::uint64_t seed, const ModelParams& params,
                         const ShellOptions& opts) {
  params.validate();
  const double eps_gs = classical_ground_energy(params);
  if (!(eps > eps_gs)) throw std::invalid_argument("shell energy must lie above the classical ground energy");
  if (n_draws == 0) throw std::invalid_argument("n_draws must be positive");

  ShellSample s;
  s.epsilon = eps;
  s.params = params;
  s.seed = seed;
  s.n_draws = n_draws;
  s.p_max = p_extent(eps, params);
  s.box_volume = 2.0 * s.p_max * 4.0 * std::numbers::pi;

  const std::uint64_t n_chunks = (n_draws + kChunkDraws - 1) / kChunkDraws;
  std::vector<std::vector<ShellPoint>> chunks(n_chunks);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
    auto rng = substream(seed, static_cast<std::uint64_t>(c));
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunkDraws;
    const std::uint64_t end = std::min(begin + kChunkDraws, n_draws);
    auto& out = chunks[static_cast<std::size_t>(c)];
    for (std::uint64_t d = begin; d < end; ++d) {
      const RawDraw raw = next_draw(rng, s.p_max);
      const QRoots roots = q_roots_on_shell(raw.p, raw.Q, raw.P, eps, params);
      if (roots.count < 2) continue;  // tangent draws have measure zero
      for (int i = 0; i < roots.count; ++i) {
        PhasePoint x{roots.q[static_cast<std::size_t>(i)], raw.p, raw.Q, raw.P};
        const double dq = params.omega * x.q + 2.0 * params.gamma * x.Q * atomic_factor(x.Q, x.P);
        out.push_back({x, 1.0 / std::abs(dq), static_cast<std::uint32_t>(d)});
      }
    }
  }

  std::size_t total = 0;
  for (const auto& c : chunks) total += c.size();
  s.points.reserve(total);
  for (auto& c : chunks) s.points.insert(s.points.end(), c.begin(), c.end());

  if (!s.points.empty()) {
    std::vector<double> raw(s.points.size());
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = s.points[i].weight;
    auto nth = raw.begin() + static_cast<std::ptrdiff_t>(std::floor(opts.cap_quantile * static_cast<double>(raw.size() - 1)));
    std::nth_element(raw.begin(), nth, raw.end());
    s.weight_cap = *nth;
    double raw_mass = 0.0, excess = 0.0;
    for (auto& pt : s.points) {
      raw_mass += pt.weight;
      if (pt.weight > s.weight_cap) {
        excess += pt.weight - s.weight_cap;
        pt.weight = s.weight_cap;
      }
    }
    s.capped_mass_fraction = excess / raw_mass;
    if (s.capped_mass_fraction > opts.capped_mass_warning) {
      s.warnings.push_back("capped weight fraction " + std::to_string(s.capped_mass_fraction) +
                           " exceeds threshold; shell volume is biased low");
    }
  }

  // Volume: box * mean over draws of the per-draw weight sum.
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < s.points.size();) {
    double wd = 0.0;
    const auto draw = s.points[i].draw;
    for (; i < s.points.size() && s.points[i].draw == draw; ++i) wd += s.points[i].weight;
    sum += wd;
    sum2 += wd * wd;
  }
  const double n = static_cast<double>(n_draws);
  const double mean = sum / n;
  const double var = n > 1 ? (sum2 / n - mean * mean) * n / (n - 1.0) : 0.0;
  s.volume = {s.box_volume * mean, s.box_volume * std::sqrt(std::max(var, 0.0) / n)};
  const double cell = kTwoPi * params.hbar_eff();
  s.nu = {s.volume.value / (cell * cell), s.volume.error / (cell * cell)};
  if (!(s.nu.value > 0.0)) throw NumericalError("shell sample has no points; increase n_draws");
  return s;
}

DrawTotals draw_totals(const ShellSample& s, const std::vector<double>& values) {
  if (values.size() != s.points.size()) throw std::invalid_argument("values must align with shell points");
  DrawTotals t;
  for (std::size_t i = 0; i < s.points.size();) {
    double w = 0.0, wf = 0.0;
    const auto draw = s.points[i].draw;
    for (; i < s.points.size() && s.points[i].draw == draw; ++i) {
      w += s.points[i].weight;
      wf += s.points[i].weight * values[i];
    }
    t.weight.push_back(w);
    t.weighted_value.push_back(wf);
  }
  return t;
}

Estimate shell_average_values(const ShellSample& s, const std::vector<double>& values) {
  if (s.points.empty()) throw std::invalid_argument("shell_average: empty shell sample");
  const DrawTotals t = draw_totals(s, values);
  double sw = 0.0, swf = 0.0;
  for (std::size_t d = 0; d < t.weight.size(); ++d) {
    sw += t.weight[d];
    swf += t.weighted_value[d];
  }
  const double ratio = swf / sw;
  // Draws without roots contribute zero residual; n counts every raw draw.
  double resid2 = 0.0;
  for (std::size_t d = 0; d < t.weight.size(); ++d) {
    const double r = t.weighted_value[d] - ratio * t.weight[d];
    resid2 += r * r;
  }
  const double n = static_cast<double>(s.n_draws);
  const double var = n > 1 ? resid2 / (sw * sw) * n / (n - 1.0) : 0.0;
  return {ratio, std::sqrt(var)};
}

Estimate shell_average(const ShellSample& s, const std::function<double(const PhasePoint&)>& f) {
  std::vector<double> values(s.points.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = f(s.points[i].x);
  return shell_average_values(s, values);
}

Estimate level_count_below(double eps, std::uint64_t n_draws, std::uint64_t seed, const ModelParams& params) {
  params.validate();
  if (!(eps > classical_ground_energy(params))) return {0.0, 0.0};
  const double p_max = p_extent(eps, params);
  const double box = 2.0 * p_max * 4.0 * std::numbers::pi;
  const std::uint64_t n_chunks = (n_draws + kChunkDraws - 1) / kChunkDraws;
  std::vector<double> sums(n_chunks, 0.0), sums2(n_chunks, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
    auto rng = substream(seed, static_cast<std::uint64_t>(c));
    const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunkDraws;
    const std::uint64_t end = std::min(begin + kChunkDraws, n_draws);
    for (std::uint64_t d = begin; d < end; ++d) {
      const RawDraw raw = next_draw(rng, p_max);
      const QRoots roots = q_roots_on_shell(raw.p, raw.Q, raw.P, eps, params);
      const double len = roots.count == 2 ? roots.q[1] - roots.q[0] : 0.0;
      sums[static_cast<std::size_t>(c)] += len;
      sums2[static_cast<std::size_t>(c)] += len * len;
    }
  }
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t c = 0; c < n_chunks; ++c) {
    sum += sums[c];
    sum2 += sums2[c];
  }
  const double n = static_cast<double>(n_draws);
  const double mean = sum / n;
  const double var = std::max(sum2 / n - mean * mean, 0.0) * n / std::max(n - 1.0, 1.0);
  const double cell = kTwoPi * params.hbar_eff();
  const double scale = box / (cell * cell);
  return {scale * mean, scale * std::sqrt(var / n)};
}

DensityOfStates::DensityOfStates(const ModelParams& params, double eps_lo, double eps_hi, std::size_t n_grid,
                                 std::uint64_t n_draws, std::uint64_t seed)
    : eps_lo_(eps_lo), eps_hi_(eps_hi) {
  if (n_grid < 4 || !(eps_hi > eps_lo)) throw std::invalid_argument("DensityOfStates: need eps_hi > eps_lo and >= 4 points");
  if (!(eps_lo > classical_ground_energy(params))) {
    throw std::invalid_argument("DensityOfStates: grid must start above the classical ground energy");
  }
  step_ = (eps_hi - eps_lo) / static_cast<double>(n_grid - 1);
  values_.resize(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    values_[i] = sample_shell(eps_lo + step_ * static_cast<double>(i), n_draws, seed, params).nu.value;
  }
  auto spline = std::make_shared<boost::math::interpolators::cardinal_cubic_b_spline<double>>(
      values_.begin(), values_.end(), eps_lo_, step_);
  spline_ = [spline](double e) { return (*spline)(e); };
}

double DensityOfStates::operator()(double eps) const {
  if (eps < eps_lo_ - 1e-12 || eps > eps_hi_ + 1e-12) {
    throw std::out_of_range("density of states requested outside its tabulated range");
  }
  return spline_(eps);
}

}  // namespace dickedim

namespace dickedim {

Estimate nu_over_average(const ShellSample& s, const std::vector<double>& values) {
  // nu / <f> = c * Wbar^2 / Fbar with per-draw W_d = sum w and F_d = sum w f.
  const DrawTotals t = draw_totals(s, values);
  const double n = static_cast<double>(s.n_draws);
  if (n < 2) throw std::invalid_argument("need at least two draws");
  double sw = 0.0, sf = 0.0;
  for (std::size_t d = 0; d < t.weight.size(); ++d) {
    sw += t.weight[d];
    sf += t.weighted_value[d];
  }
  const double wbar = sw / n, fbar = sf / n;
  if (!(fbar > 0.0)) throw NumericalError("shell average vanishes");
  double cww = 0.0, cff = 0.0, cwf = 0.0;
  for (std::size_t d = 0; d < t.weight.size(); ++d) {
    const double dw = t.weight[d] - wbar, df = t.weighted_value[d] - fbar;
    cww += dw * dw;
    cff += df * df;
    cwf += dw * df;
  }
  const double empty = n - static_cast<double>(t.weight.size());
  cww = (cww + empty * wbar * wbar) / (n - 1.0);
  cff = (cff + empty * fbar * fbar) / (n - 1.0);
  cwf = (cwf + empty * wbar * fbar) / (n - 1.0);

  const double cell = kTwoPi * s.params.hbar_eff();
  const double c = s.box_volume / (cell * cell);
  const double gw = 2.0 * c * wbar / fbar;
  const double gf = -c * wbar * wbar / (fbar * fbar);
  const double var = (gw * gw * cww + gf * gf * cff + 2.0 * gw * gf * cwf) / n;
  return {c * wbar * wbar / fbar, std::sqrt(std::max(var, 0.0))};
}

}  // namespace dickedim
