#include <doctest.h>

#include <cmath>

#include "dickedim/classical.hpp"
#include "dickedim/coherent.hpp"
#include "dickedim/effdim.hpp"
#include "dickedim/husimi.hpp"
#include "dickedim/model.hpp"

using namespace dickedim;

namespace {

const EigenDecomposition& small_dec() {
  static const EigenDecomposition dec = [] {
    DiagonalizeOptions o;
    o.eps_max = 0.3;
    return diagonalize_converged(ModelParams{1, 1, 1, 6}, 60, 72, Parity::all, 1e-6, o);
  }();
  return dec;
}

}  // namespace

TEST_CASE("blocked overlaps equal one-by-one overlaps") {
  const auto& dec = small_dec();
  const auto s = sample_shell(-0.5, 300, 3, dec.params);
  const auto pts = shell_points(s);
  std::vector<std::size_t> levels;
  for (std::size_t k = 0; k < dec.converged_count; k += 3) levels.push_back(k);
  const auto ov = eigen_overlaps(dec, levels, pts);
  BasisSpec full = dec.basis;
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); i += 17) {
    const auto a = coherent_amplitudes(pts[i], full);
    for (std::size_t l = 0; l < levels.size(); ++l) {
      const Eigen::VectorXd v = dec.vectors.col(levels[l]);
      worst = std::max(worst, std::abs(ov(l, i) - coherent_overlap(v, a)));
    }
  }
  CHECK(worst < 1e-13);
  CHECK_THROWS_AS(eigen_overlaps(dec, {dec.n_levels()}, pts), std::out_of_range);
}

TEST_CASE("completeness on the shell") {
  // Summing the Husimi functions of every level gives <x|x> = 1 wherever the truncated
  // spectrum covers the coherent states of the shell.
  ModelParams p{1, 1, 1, 4};
  const auto dec = diagonalize(p, BasisSpec{4, 80, Parity::all});
  const auto s = sample_shell(-1.0, 2000, 8, p);
  std::vector<std::size_t> all(dec.n_levels());
  for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
  const auto ov = eigen_overlaps(dec, all, shell_points(s));
  std::vector<double> total(s.points.size());
  for (std::size_t i = 0; i < total.size(); ++i) total[i] = ov.col(i).squaredNorm();
  CHECK(shell_average_values(s, total).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("phase-space integral of the Husimi function is 2j/(2j+1)") {
  // The Bloch states resolve the identity with measure (2j+1)/(4 pi) dQ dP, so with the
  // (2 pi / j)^-2 cell the integral falls short of one by a factor 2j/(2j+1).
  ModelParams p{1, 1, 1, 5};
  BasisSpec b{5, 50, Parity::all};
  const auto dec = diagonalize(p, b);
  PhaseSpaceIntegralOptions o;
  o.boson_points = 900;
  o.atom_points = 900;
  const double exact = 10.0 / 11.0;
  for (std::size_t k : {3, 60}) {
    const Eigen::VectorXcd psi = dec.vectors.col(k).cast<std::complex<double>>();
    const auto e = husimi_phase_space_integral(psi, b, o);
    CHECK(std::abs(e.value - exact) < 4 * e.error + 2e-3);
  }
  const auto coh = coherent_amplitudes(PhasePoint{1.0, -0.5, 0.8, 0.4}, b).full();
  const auto e = husimi_phase_space_integral(coh, b, o);
  CHECK(std::abs(e.value - exact) < 4 * e.error + 2e-3);
  CHECK(husimi_box_half_width(coh, b) > std::hypot(1.0, 0.5));
}

TEST_CASE("gaussian shell profile") {
  ModelParams p{1, 1, 1, 100};
  const auto s = sample_shell(-0.5, 100000, 2, p);
  // at eps = eps_k it is the reciprocal of the effective dimension
  const auto g = gaussian_profile_average(-0.5, s, s.nu.value);
  const auto d = effective_dimension(s);
  CHECK(g.value * d.value.value == doctest::Approx(1.0).epsilon(1e-9));
  // Gaussian decay far from the shell
  const double far = gaussian_profile_average(-0.5 + 6 * 1.5, s, s.nu.value).value;
  CHECK(far < 1e-6 * g.value);
}

TEST_CASE("unimodality check") {
  EigenstateShellProfile prof;
  for (int i = 0; i < 21; ++i) {
    const double e = -1.0 + 0.1 * i;
    prof.grid.push_back({e, {std::exp(-e * e), 0.01}});
  }
  CHECK(prof.peak_index() == 10);
  CHECK(prof.unimodal());
  prof.grid[3].average.value += 0.5;  // a second bump
  CHECK_FALSE(prof.unimodal());
  CHECK(profile_grid(0.0, 1.0, 5) == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
}

TEST_CASE("eigenstate profile peaks at its own energy") {
  const auto& dec = small_dec();
  std::size_t k = 0;
  for (std::size_t i = 0; i < dec.converged_count; ++i)
    if (std::abs(dec.energies(i) + 0.5) < std::abs(dec.energies(k) + 0.5)) k = i;
  const double ek = dec.energies(k);
  const auto prof = eigenstate_shell_profile(dec, k, profile_grid(ek, 1.2, 13), 4000, 6);
  CHECK(prof.unimodal());
  CHECK(std::abs(prof.grid[prof.peak_index()].epsilon - ek) <= 0.2 + 1e-12);
  const auto d = eigenstate_dimensionality(dec, k, sample_shell(ek, 4000, 1, dec.params));
  CHECK(d.value > 1.0);
}

TEST_CASE("parabolic peak location resolves below the grid step") {
  EigenstateShellProfile prof;
  for (double e : profile_grid(0.0, 0.6, 41)) {
    const double v = std::exp(-std::pow(e - 0.013, 2) / (2 * 0.3 * 0.3));
    prof.grid.push_back({e, Estimate{v, 1e-3}});
  }
  CHECK(prof.grid[prof.peak_index()].epsilon == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(prof.peak_epsilon() == doctest::Approx(0.013).epsilon(1e-3));
  // a flat-topped two-point profile falls back to the argmax
  EigenstateShellProfile tiny;
  tiny.grid = {{0.0, Estimate{1.0, 0.1}}, {0.1, Estimate{0.5, 0.1}}};
  CHECK(tiny.peak_epsilon() == 0.0);
}
