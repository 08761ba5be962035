#include <doctest.h>

#include <cmath>
#include <random>

#include "dickedim/classical.hpp"
#include "dickedim/model.hpp"

using namespace dickedim;

namespace {

const ModelParams kParams{1.0, 1.0, 1.0, 100.0};

// Brute-force minimum of h_cl: for fixed (Q, P) the energy is a quadratic in q, p with a
// known minimum, so scan the atomic disk on a fine polar grid and refine locally.
double brute_force_ground(const ModelParams& p) {
  double best = 1e300, bq = 0, bp = 0;
  auto h_min_qp = [&](double Q, double P) {
    const double R = Q * Q + P * P;
    if (R > 4.0) return 1e300;
    const double A = std::sqrt(1.0 - R / 4.0);
    const double q = -2.0 * p.gamma * Q * A / p.omega;
    return h_cl({q, 0.0, Q, P}, p);
  };
  for (int i = 0; i <= 400; ++i)
    for (int k = 0; k < 64; ++k) {
      const double r = 2.0 * i / 400.0, th = 2 * M_PI * k / 64.0;
      const double v = h_min_qp(r * std::cos(th), r * std::sin(th));
      if (v < best) best = v, bq = r * std::cos(th), bp = r * std::sin(th);
    }
  for (double step = 1e-2; step > 1e-10; step *= 0.5) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (auto [dq, dp] : {std::pair{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}) {
        const double v = h_min_qp(bq + dq, bp + dp);
        if (v < best) best = v, bq += dq, bp += dp, moved = true;
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("classical energy at reference points") {
  CHECK(h_cl({0, 0, 0, 0}, kParams) == doctest::Approx(-1.0));
  // atoms fully excited, field empty: R = 4
  CHECK(h_cl({0, 0, 2, 0}, kParams) == doctest::Approx(1.0));
  CHECK(h_cl({1, 2, 0, 0}, kParams) == doctest::Approx(2.5 - 1.0));
  CHECK_THROWS_AS(atomic_factor(2.0, 0.1), std::domain_error);
}

TEST_CASE("gradient agrees with central finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  ModelParams p{1.2, 0.8, 0.7, 10};
  for (int t = 0; t < 50; ++t) {
    PhasePoint x{u(rng), u(rng), u(rng), u(rng)};
    const auto g = grad_h_cl(x, p);
    const double h = 1e-6;
    for (int c = 0; c < 4; ++c) {
      PhasePoint a = x, b = x;
      double* pa[] = {&a.q, &a.p, &a.Q, &a.P};
      double* pb[] = {&b.q, &b.p, &b.Q, &b.P};
      *pa[c] += h;
      *pb[c] -= h;
      CHECK(g[c] == doctest::Approx((h_cl(a, p) - h_cl(b, p)) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("ground-state energy") {
  CHECK(classical_ground_energy(kParams) == doctest::Approx(-2.125).epsilon(1e-12));
  CHECK(classical_ground_energy(kParams) == doctest::Approx(brute_force_ground(kParams)).epsilon(1e-9));
  ModelParams p{1.0, 1.5, 1.3, 10};
  CHECK(classical_ground_energy(p) == doctest::Approx(brute_force_ground(p)).epsilon(1e-9));
  ModelParams normal{1.0, 1.0, 0.3, 10};  // gamma < gamma_c: atoms stay down
  CHECK(classical_ground_energy(normal) == doctest::Approx(-1.0));
  CHECK(brute_force_ground(normal) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("q roots lie on the shell") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int found = 0;
  for (int t = 0; t < 2000; ++t) {
    const double p = 2 * u(rng), Q = u(rng), P = u(rng);
    const auto r = q_roots_on_shell(p, Q, P, -0.5, kParams);
    for (int i = 0; i < r.count; ++i, ++found) CHECK(h_cl({r.q[i], p, Q, P}, kParams) == doctest::Approx(-0.5).epsilon(1e-12));
  }
  CHECK(found > 100);
}

TEST_CASE("shell sample: points on the shell, determinism") {
  const auto s = sample_shell(-0.5, 20000, 11, kParams);
  REQUIRE(!s.empty());
  double worst = 0.0;
  for (const auto& pt : s.points) worst = std::max(worst, std::abs(h_cl(pt.x, kParams) + 0.5));
  CHECK(worst < 1e-10);
  const auto again = sample_shell(-0.5, 20000, 11, kParams);
  REQUIRE(again.points.size() == s.points.size());
  bool same = again.nu.value == s.nu.value;
  for (std::size_t i = 0; i < s.points.size(); ++i) same = same && again.points[i].x.q == s.points[i].x.q && again.points[i].weight == s.points[i].weight;
  CHECK(same);
  CHECK_THROWS(sample_shell(-3.0, 100, 1, kParams));
}

TEST_CASE("uncoupled shell volume has a closed form") {
  // gamma = 0: h = w u + w0 v - w0 with u = (q^2+p^2)/2, v = R/2 in [0, 2], and
  // dq dp = 2 pi du, dQ dP = 2 pi dv, so volume = (2 pi)^2 / w * min(2, (eps + w0)/w0).
  ModelParams p{1.0, 1.0, 0.0, 10};
  for (double eps : {-0.5, 0.2, 1.5}) {
    const auto s = sample_shell(eps, 400000, 5, p);
    const double exact = 4 * M_PI * M_PI * std::min(2.0, eps + 1.0);
    CHECK(std::abs(s.volume.value - exact) < std::max(4 * s.volume.error, 0.02 * exact));
  }
}

TEST_CASE("density of states: j scaling, interpolation, level counting") {
  const auto a = sample_shell(-0.5, 100000, 2, ModelParams{1, 1, 1, 10});
  const auto b = sample_shell(-0.5, 100000, 2, ModelParams{1, 1, 1, 100});
  CHECK(b.nu.value / a.nu.value == doctest::Approx(100.0).epsilon(1e-12));

  ModelParams p{1, 1, 1, 10};
  DensityOfStates dos(p, -1.5, 0.0, 40, 50000, 9);
  const auto direct = sample_shell(-0.73, 50000, 9, p);
  CHECK(std::abs(dos(-0.73) - direct.nu.value) < 3 * direct.nu.error + 0.01 * direct.nu.value);
  CHECK_THROWS_AS(dos(0.5), std::out_of_range);

  // d N(eps) / d eps = nu(eps)
  const double h = 0.05;
  const auto up = level_count_below(-0.5 + h, 400000, 4, p), dn = level_count_below(-0.5 - h, 400000, 4, p);
  const auto mid = sample_shell(-0.5, 400000, 4, p);
  CHECK((up.value - dn.value) / (2 * h) == doctest::Approx(mid.nu.value).epsilon(0.03));
}

TEST_CASE("shell averages") {
  const auto s = sample_shell(-0.5, 50000, 1, kParams);
  const auto one = shell_average(s, [](const PhasePoint&) { return 1.0; });
  CHECK(one.value == doctest::Approx(1.0));
  // <Q^2 + P^2 + q^2> is positive and finite
  const auto r = shell_average(s, [](const PhasePoint& x) { return x.atomic_radius2(); });
  CHECK(r.value > 0.0);
  CHECK(r.value < 4.0);
  std::vector<double> ones(s.points.size(), 1.0);
  const auto nu = nu_over_average(s, ones);
  CHECK(nu.value == doctest::Approx(s.nu.value).epsilon(1e-12));
}
