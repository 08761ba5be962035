#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "dickedim/model.hpp"
#include "dickedim/participation.hpp"

using namespace dickedim;
using cd = std::complex<double>;

namespace {

const EigenDecomposition& dec10() {
  static const EigenDecomposition dec = [] {
    DiagonalizeOptions o;
    o.eps_max = 0.3;
    return diagonalize_converged(ModelParams{1, 1, 1, 10}, 150, 180, Parity::all, 1e-6, o);
  }();
  return dec;
}

}  // namespace

TEST_CASE("participation ratio basics") {
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(9);
  e(4) = 1.0;
  CHECK(participation_ratio(e) == doctest::Approx(1.0));
  const Eigen::VectorXcd u = Eigen::VectorXcd::Constant(9, cd(1.0 / 3.0, 0.0));
  CHECK(participation_ratio(u) == doctest::Approx(9.0));
  CHECK_THROWS_AS(participation_ratio(Eigen::VectorXcd::Zero(3)), std::invalid_argument);

  Eigen::VectorXcd c(6);
  c << cd(0.1, 0.2), cd(-0.5, 0.1), cd(0.3, 0.3), cd(0.0, -0.4), cd(0.2, 0.0), cd(0.1, -0.1);
  c.normalize();
  const double pr = participation_ratio(c);
  CHECK(pr >= 1.0);
  CHECK(pr <= 6.0);
  CHECK(participation_ratio(c * std::polar(1.0, 0.7)) == doctest::Approx(pr).epsilon(1e-14));
  Eigen::VectorXcd perm = c;
  std::reverse(perm.data(), perm.data() + perm.size());
  CHECK(participation_ratio(perm) == doctest::Approx(pr).epsilon(1e-14));
}

TEST_CASE("amplitude moment ratios") {
  const auto goe = amplitude_moment_ratio(AmplitudeKind::goe, 400000, 1);
  const auto gue = amplitude_moment_ratio(AmplitudeKind::gue, 400000, 2);
  CHECK(std::abs(goe.value - 3.0) < 3 * goe.error);
  CHECK(std::abs(gue.value - 2.0) < 3 * gue.error);
}

TEST_CASE("window states and parity filtering") {
  const auto& dec = dec10();
  const auto all = window_indices(dec, -0.8, -0.2, false);
  const auto pos = window_indices(dec, -0.8, -0.2, true);
  CHECK(std::abs(2.0 * pos.size() - all.size()) <= 4.0);
  for (auto k : pos) CHECK(dec.parities[k] == 1);

  const auto c = rect_window_random_state(dec, -0.8, -0.2, AmplitudeKind::goe, true, 5, 3);
  CHECK(c.squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
  std::size_t nonzero = 0;
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (c(k) == cd(0.0)) continue;
    ++nonzero;
    CHECK(std::find(pos.begin(), pos.end(), std::size_t(k)) != pos.end());
    CHECK(c(k).imag() == 0.0);
  }
  CHECK(nonzero == pos.size());
  // same substream as the batched generator
  const auto batch = window_random_coefficients(pos.size(), AmplitudeKind::goe, 4, 5);
  for (std::size_t i = 0; i < pos.size(); ++i) CHECK(std::abs(batch(3, i) - c(pos[i])) < 1e-15);

  CHECK_THROWS_AS(window_indices(dec, -0.2, -0.8, false), std::invalid_argument);
  CHECK_THROWS_AS(window_indices(dec, -0.5, 5.0, false), std::invalid_argument);
}

TEST_CASE("ensemble participation ratios: N/3 for real, N/2 for complex amplitudes") {
  const std::size_t n = 600;
  for (auto [kind, factor] : {std::pair{AmplitudeKind::goe, 3.0}, {AmplitudeKind::gue, 2.0}}) {
    const auto c = window_random_coefficients(n, kind, 400, 11);
    double mean = 0.0;
    for (Eigen::Index r = 0; r < c.rows(); ++r) mean += participation_ratio(c.row(r).transpose()) / c.rows();
    CHECK(mean == doctest::Approx(n / factor).epsilon(0.02));
  }
}
