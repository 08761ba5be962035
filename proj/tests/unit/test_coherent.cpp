#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "dickedim/classical.hpp"
#include "dickedim/coherent.hpp"
#include "dickedim/model.hpp"

using namespace dickedim;
using cd = std::complex<double>;

namespace {

// Textbook amplitudes with plain factorials; fine for small n and j.
cd glauber(int n, double j, double q, double p) {
  const cd alpha = std::sqrt(j / 2) * cd(q, p);
  return std::exp(-std::norm(alpha) / 2) * std::pow(alpha, n) / std::sqrt(std::tgamma(n + 1.0));
}

cd bloch(int k, double j, double Q, double P) {
  const double R = Q * Q + P * P;
  const cd z = cd(Q, P) / std::sqrt(4 - R);
  const int two_j = static_cast<int>(std::lround(2 * j));
  const double binom = std::tgamma(two_j + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(two_j - k + 1.0));
  return std::pow(1 - R / 4, j) * std::sqrt(binom) * std::pow(z, k);
}

std::vector<PhasePoint> interior_points(double eps, int count, std::uint64_t seed, const ModelParams& p) {
  const auto s = sample_shell(eps, 5000, seed, p);
  std::vector<PhasePoint> out;
  for (const auto& pt : s.points) {
    if (pt.x.atomic_radius2() < 3.9) out.push_back(pt.x);
    if (static_cast<int>(out.size()) == count) break;
  }
  return out;
}

}  // namespace

TEST_CASE("coherent amplitudes against textbook formulas") {
  const double j = 3.0;
  BasisSpec b{j, 25, Parity::all};
  for (PhasePoint x : {PhasePoint{0.3, -0.7, 0.5, 1.1}, PhasePoint{-1.0, 0.2, -1.4, -0.9}}) {
    const auto a = coherent_amplitudes(x, b);
    for (int n = 0; n <= 25; ++n) CHECK(std::abs(a.boson(n) - glauber(n, j, x.q, x.p)) < 1e-12);
    for (int k = 0; k <= 6; ++k) CHECK(std::abs(a.atom(k) - bloch(k, j, x.Q, x.P)) < 1e-12);
    CHECK(a.atom.squaredNorm() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(a.boson.squaredNorm() + a.boson_tail == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(a.full().size() == static_cast<Eigen::Index>(b.full_dimension()));
  }
  CHECK_THROWS(coherent_amplitudes(PhasePoint{0, 0, 2, 0}, b));
}

TEST_CASE("large-j amplitudes stay finite and normalized") {
  BasisSpec b{100, 1000, Parity::all};
  const auto a = coherent_amplitudes(PhasePoint{2.5, -1.0, 1.9, 0.3}, b);
  CHECK(a.atom.allFinite());
  CHECK(a.boson.allFinite());
  CHECK(a.atom.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.boson.squaredNorm() + a.boson_tail == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("expectation of H in a coherent state is the classical energy") {
  for (double j : {5.0, 10.0}) {
    ModelParams p{1, 1, 1, j};
    BasisSpec b{j, static_cast<int>(30 * j), Parity::all};
    for (const auto& x : interior_points(-0.5, 10, 21, p)) {
      const auto m = coherent_moments_quantum(x, p, b);
      CHECK(std::abs(m.mean - h_cl(x, p)) < 1e-10);
    }
  }
}

TEST_CASE("closed-form energy width matches brute force") {
  ModelParams p{1.0, 1.0, 1.0, 10};
  BasisSpec b{10, 100, Parity::all};
  for (const auto& x : interior_points(-0.3, 10, 5, p)) {
    const double a = sigma_x_analytic(x, p), q = sigma_x_quantum(x, p, b);
    CHECK(std::abs(a - q) / q < 1e-6);
  }
  // off-resonant couplings too
  ModelParams r{0.7, 1.4, 0.9, 4};
  BasisSpec br{4, 200, Parity::all};
  for (const auto& x : interior_points(0.1, 5, 8, r)) {
    CHECK(std::abs(sigma_x_analytic(x, r) - sigma_x_quantum(x, r, br)) < 1e-7);
  }
}

TEST_CASE("husimi of a basis state and overlap conventions") {
  BasisSpec b{2, 10, Parity::all};
  const PhasePoint x{0.4, 0.1, -0.3, 0.8};
  const auto a = coherent_amplitudes(x, b);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(b.full_dimension());
  e(3 * 5 + 2) = 1.0;  // n = 3, k = 2
  CHECK(husimi_overlap(e, a) == doctest::Approx(std::norm(a.boson(3) * a.atom(2))));
  // <psi|x> conjugates psi
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(b.full_dimension());
  c(3 * 5 + 2) = cd(0, 1);
  CHECK(std::abs(coherent_overlap(c, a) - cd(0, -1) * a.boson(3) * a.atom(2)) < 1e-15);
  // a coherent state overlaps itself with unit weight (up to the truncated tail)
  CHECK(husimi_overlap(a.full(), a) == doctest::Approx(1.0).epsilon(1e-9));
}
