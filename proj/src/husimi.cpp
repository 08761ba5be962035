#include "dickedim/husimi.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <random>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "dickedim/effdim.hpp"
#include "dickedim/rng.hpp"

namespace dickedim {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr Eigen::Index kPointBlock = 64;
constexpr std::size_t kLevelBlock = 96;

}  // namespace

std::vector<PhasePoint> shell_points(const ShellSample& s) {
  std::vector<PhasePoint> out;
  out.reserve(s.points.size());
  for (const auto& p : s.points) out.push_back(p.x);
  return out;
}

Eigen::MatrixXcd eigen_overlaps(const EigenDecomposition& dec, const std::vector<std::size_t>& levels,
                                const std::vector<PhasePoint>& points) {
  const Eigen::Index n_boson = dec.basis.n_max + 1;
  const Eigen::Index n_atom = dec.basis.atomic_dim();
  const auto n_points = static_cast<Eigen::Index>(points.size());
  const auto n_levels = static_cast<Eigen::Index>(levels.size());
  for (auto k : levels) {
    if (k >= dec.n_levels()) throw std::out_of_range("eigen_overlaps: level index out of range");
  }
  BasisSpec full = dec.basis;
  full.sector = Parity::all;

  Eigen::MatrixXcd out(n_levels, n_points);

#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index p0 = 0; p0 < n_points; p0 += kPointBlock) {
    const Eigen::Index np = std::min(kPointBlock, n_points - p0);
    Eigen::MatrixXcd boson(n_boson, np);
    Eigen::MatrixXd atom_re(n_atom, np), atom_im(n_atom, np);
    for (Eigen::Index i = 0; i < np; ++i) {
      const auto amps = coherent_amplitudes(points[static_cast<std::size_t>(p0 + i)], full);
      boson.col(i) = amps.boson;
      atom_re.col(i) = amps.atom.real();
      atom_im.col(i) = amps.atom.imag();
    }
    for (std::size_t l0 = 0; l0 < levels.size(); l0 += kLevelBlock) {
      const std::size_t nl = std::min(kLevelBlock, levels.size() - l0);
      // Stack the (n, m) grids of the block's eigenvectors: row (k, n) holds phi_k(n, .).
      RowMatrix stacked(static_cast<Eigen::Index>(nl) * n_boson, n_atom);
      for (std::size_t b = 0; b < nl; ++b) {
        stacked.middleRows(static_cast<Eigen::Index>(b) * n_boson, n_boson) = dec.grid(levels[l0 + b]);
      }
      const Eigen::MatrixXd t_re = stacked * atom_re;
      const Eigen::MatrixXd t_im = stacked * atom_im;
      for (std::size_t b = 0; b < nl; ++b) {
        const Eigen::Index r0 = static_cast<Eigen::Index>(b) * n_boson;
        for (Eigen::Index i = 0; i < np; ++i) {
          std::complex<double> acc = 0.0;
          for (Eigen::Index n = 0; n < n_boson; ++n) {
            acc += boson(n, i) * std::complex<double>(t_re(r0 + n, i), t_im(r0 + n, i));
          }
          out(static_cast<Eigen::Index>(l0 + b), p0 + i) = acc;
        }
      }
    }
  }
  return out;
}

Estimate eigenstate_shell_average(const EigenDecomposition& dec, std::size_t k, const ShellSample& s) {
  if (s.params.j != dec.params.j) throw std::invalid_argument("shell sample and decomposition use different j");
  const Eigen::MatrixXcd ov = eigen_overlaps(dec, {k}, shell_points(s));
  std::vector<double> values(s.points.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::norm(ov(0, static_cast<Eigen::Index>(i)));
  return shell_average_values(s, values);
}

Estimate eigenstate_dimensionality(const EigenDecomposition& dec, std::size_t k, const ShellSample& s) {
  const Estimate avg = eigenstate_shell_average(dec, k, s);
  if (!(avg.value > 0.0)) throw NumericalError("eigenstate has zero Husimi weight on the shell");
  return {1.0 / avg.value, avg.error / (avg.value * avg.value)};
}

Estimate gaussian_profile_average(double eps_k, const ShellSample& s, double nu_at_eps_k) {
  const auto sigmas = sigma_values(s);
  std::vector<double> values(sigmas.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = eps_k - s.epsilon;
    values[i] = std::exp(-d * d / (2.0 * sigmas[i] * sigmas[i])) / sigmas[i];
  }
  const Estimate avg = shell_average_values(s, values);
  const double scale = 1.0 / (kSqrtTwoPi * nu_at_eps_k);
  return {scale * avg.value, scale * avg.error};
}

std::size_t EigenstateShellProfile::peak_index() const {
  if (grid.empty()) throw std::logic_error("empty profile");
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i].average.value > grid[best].average.value) best = i;
  }
  return best;
}

double EigenstateShellProfile::peak_epsilon(double top_fraction) const {
  const std::size_t best = peak_index();
  const double cut = top_fraction * grid[best].average.value;
  std::size_t lo = best, hi = best;
  while (lo > 0 && grid[lo - 1].average.value >= cut) --lo;
  while (hi + 1 < grid.size() && grid[hi + 1].average.value >= cut) ++hi;
  if (hi - lo < 2) return grid[best].epsilon;
  // weighted least-squares parabola in t = eps - eps_best
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  Eigen::Vector3d b = Eigen::Vector3d::Zero();
  for (std::size_t i = lo; i <= hi; ++i) {
    const double t = grid[i].epsilon - grid[best].epsilon;
    const double err = grid[i].average.error;
    const double w = err > 0.0 ? 1.0 / (err * err) : 1.0;
    const Eigen::Vector3d row(1.0, t, t * t);
    a += w * row * row.transpose();
    b += w * grid[i].average.value * row;
  }
  const Eigen::Vector3d c = a.ldlt().solve(b);
  if (!(c(2) < 0.0)) return grid[best].epsilon;
  const double t = std::clamp(-c(1) / (2.0 * c(2)), grid[lo].epsilon - grid[best].epsilon,
                              grid[hi].epsilon - grid[best].epsilon);
  return grid[best].epsilon + t;
}

bool EigenstateShellProfile::unimodal(double n_sigma) const {
  const std::size_t peak = peak_index();
  auto against = [&](std::size_t from, std::size_t to) {
    const double drop = grid[from].average.value - grid[to].average.value;
    const double err = std::hypot(grid[from].average.error, grid[to].average.error);
    return drop > n_sigma * err;
  };
  for (std::size_t i = 0; i < peak; ++i) {
    if (against(i, i + 1)) return false;  // fell while climbing
  }
  for (std::size_t i = peak; i + 1 < grid.size(); ++i) {
    if (against(i + 1, i)) return false;  // rose while descending
  }
  return true;
}

std::vector<double> profile_grid(double eps_k, double half_width, std::size_t n) {
  if (n < 2) throw std::invalid_argument("profile grid needs at least two points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = eps_k - half_width + 2.0 * half_width * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

EigenstateShellProfile eigenstate_shell_profile(const EigenDecomposition& dec, std::size_t k,
                                                const std::vector<double>& grid, std::uint64_t n_draws,
                                                std::uint64_t seed) {
  EigenstateShellProfile prof;
  prof.k = k;
  prof.eps_k = dec.energies(static_cast<Eigen::Index>(k));
  const double eps_gs = classical_ground_energy(dec.params);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > eps_gs)) continue;  // no shell below the classical minimum
    const ShellSample s = sample_shell(grid[i], n_draws, seed + i, dec.params);
    prof.grid.push_back({grid[i], eigenstate_shell_average(dec, k, s)});
  }
  return prof;
}

double husimi_box_half_width(const Eigen::Ref<const Eigen::VectorXcd>& psi, const BasisSpec& basis, double mass_outside) {
  BasisSpec full = basis;
  full.sector = Parity::all;
  const Eigen::Index n_boson = full.n_max + 1;
  const Eigen::Index n_atom = full.atomic_dim();
  if (psi.size() != n_boson * n_atom) throw std::invalid_argument("state dimension does not match basis");
  // Radial Husimi mass beyond |alpha| = A is sum_n P(n) Q(n + 1, A^2) (regularized upper gamma).
  std::vector<double> pn(static_cast<std::size_t>(n_boson));
  for (Eigen::Index n = 0; n < n_boson; ++n) pn[static_cast<std::size_t>(n)] = psi.segment(n * n_atom, n_atom).squaredNorm();
  const double total = std::accumulate(pn.begin(), pn.end(), 0.0);
  auto outside = [&](double a) {
    double m = 0.0;
    for (std::size_t n = 0; n < pn.size(); ++n) {
      if (pn[n] > 0.0) m += pn[n] * boost::math::gamma_q(static_cast<double>(n) + 1.0, a * a);
    }
    return m / total;
  };
  double a = 1.0;
  while (outside(a) > mass_outside) a *= 1.25;
  // |alpha| = sqrt(j/2) r; the box must contain the disk of radius r.
  return a * std::sqrt(2.0 / full.j);
}

Estimate husimi_phase_space_integral(const Eigen::Ref<const Eigen::VectorXcd>& psi, const BasisSpec& basis,
                                     const PhaseSpaceIntegralOptions& opts) {
  BasisSpec full = basis;
  full.sector = Parity::all;
  const Eigen::Index n_boson = full.n_max + 1;
  const Eigen::Index n_atom = full.atomic_dim();
  if (psi.size() != n_boson * n_atom) throw std::invalid_argument("state dimension does not match basis");
  if (opts.batches < 2) throw std::invalid_argument("need at least two batches for an error estimate");

  // psi*(n, m) as an (n, m) grid.
  Eigen::MatrixXcd grid(n_boson, n_atom);
  for (Eigen::Index n = 0; n < n_boson; ++n) {
    for (Eigen::Index m = 0; m < n_atom; ++m) grid(n, m) = std::conj(psi(n * n_atom + m));
  }

  const double L = opts.half_width > 0.0 ? opts.half_width : husimi_box_half_width(psi, full, opts.mass_outside);
  const double box = (2.0 * L) * (2.0 * L) * 4.0 * std::numbers::pi;
  const double cell = kTwoPi / full.j;
  // One uniform point per cell of an m x m grid (jittered sampling): still an unbiased
  // Monte Carlo estimate over the box, with far less variance for smooth integrands.
  const auto mb = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(opts.boson_points))));
  const auto ma = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(opts.atom_points))));
  std::vector<double> batch_means(opts.batches);

  for (std::size_t b = 0; b < opts.batches; ++b) {
    auto rng = substream(opts.seed, b);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::MatrixXcd boson(static_cast<Eigen::Index>(mb * mb), n_boson);
    for (std::size_t i = 0; i < mb * mb; ++i) {
      const double u = (static_cast<double>(i / mb) + unit(rng)) / static_cast<double>(mb);
      const double v = (static_cast<double>(i % mb) + unit(rng)) / static_cast<double>(mb);
      const PhasePoint x{(2.0 * u - 1.0) * L, (2.0 * v - 1.0) * L, 0.0, 0.0};
      boson.row(static_cast<Eigen::Index>(i)) = coherent_amplitudes(x, full).boson.transpose();
    }
    // dQ dP = dR dphi / 2 with R = Q^2 + P^2, so (R, phi) uniform on [0, 4) x [0, 2 pi) is
    // uniform on the disk.
    Eigen::MatrixXcd atom(n_atom, static_cast<Eigen::Index>(ma * ma));
    for (std::size_t i = 0; i < ma * ma; ++i) {
      const double R = 4.0 * (static_cast<double>(i / ma) + unit(rng)) / static_cast<double>(ma);
      const double th = kTwoPi * (static_cast<double>(i % ma) + unit(rng)) / static_cast<double>(ma);
      const double r = std::sqrt(std::min(R, 4.0 - 1e-12));
      const PhasePoint x{0.0, 0.0, r * std::cos(th), r * std::sin(th)};
      atom.col(static_cast<Eigen::Index>(i)) = coherent_amplitudes(x, full).atom;
    }
    const Eigen::MatrixXcd overlaps = boson * grid * atom;  // every (bosonic, atomic) pair
    batch_means[b] = overlaps.cwiseAbs2().mean();
  }

  double mean = 0.0;
  for (double m : batch_means) mean += m;
  mean /= static_cast<double>(opts.batches);
  double var = 0.0;
  for (double m : batch_means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(opts.batches - 1);
  const double scale = box / (cell * cell);
  return {scale * mean, scale * std::sqrt(var / static_cast<double>(opts.batches))};
}

}  // namespace dickedim
