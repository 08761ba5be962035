#include "dickedim/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <lapacke.h>

#include "dickedim/common.hpp"

namespace dickedim {

namespace {

int checked_two_j(double j) {
  const double twice = 2.0 * j;
  const double rounded = std::round(twice);
  if (!(j >= 0.5) || std::abs(twice - rounded) > 1e-12) {
    throw std::invalid_argument("j must be a positive integer or half-integer, got " + std::to_string(j));
  }
  return static_cast<int>(rounded);
}

// <k'|J+ + J-|k> for k' = k +- 1, with k = j + m.
double ladder_element(int two_j, int k, int k_prime) {
  const double j = 0.5 * two_j;
  const double m = k - j;
  const double mp = k_prime - j;
  return std::sqrt(j * (j + 1.0) - m * mp);
}

bool in_sector(Parity sector, int parity) {
  switch (sector) {
    case Parity::all: return true;
    case Parity::positive: return parity > 0;
    case Parity::negative: return parity < 0;
  }
  return false;
}

struct SectorSolve {
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;  // full-basis coordinates
  int parity = 0;
};

SectorSolve solve_sector(const ModelParams& params, const BasisSpec& basis, double eps_max) {
  Eigen::MatrixXd h = build_hamiltonian(params, basis);
  const auto n = static_cast<lapack_int>(h.rows());
  SectorSolve out;
  if (n == 0) return out;

  const bool all_levels = !std::isfinite(eps_max);
  // Gershgorin bound for the lower end of the search interval.
  double lower = 0.0;
  for (lapack_int i = 0; i < n; ++i) {
    lower = std::min(lower, h(i, i) - (h.col(i).cwiseAbs().sum() - std::abs(h(i, i))));
  }

  Eigen::VectorXd w(n);
  Eigen::MatrixXd z(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', all_levels ? 'A' : 'V', 'U', n, h.data(), n, lower - 1.0,
      eps_max * params.j, 0, 0, 0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0) {
    throw NumericalError("eigensolver failed to converge (dsyevr info=" + std::to_string(info) + ")");
  }

  const auto idx = basis.full_indices();
  out.energies = w.head(found) / params.j;
  out.vectors = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.full_dimension()), found);
  for (lapack_int c = 0; c < found; ++c) {
    for (lapack_int r = 0; r < n; ++r) out.vectors(static_cast<Eigen::Index>(idx[r]), c) = z(r, c);
  }
  return out;
}

}  // namespace

double ModelParams::gamma_c() const { return std::sqrt(omega * omega0) / 2.0; }

int ModelParams::two_j() const { return checked_two_j(j); }

void ModelParams::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be positive");
  if (!std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite");
  checked_two_j(j);
}

int BasisSpec::two_j() const { return checked_two_j(j); }

std::size_t BasisSpec::full_dimension() const {
  return static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(atomic_dim());
}

void BasisSpec::validate() const {
  checked_two_j(j);
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
}

std::vector<BasisState> BasisSpec::states() const {
  validate();
  std::vector<BasisState> out;
  out.reserve(full_dimension());
  for (int n = 0; n <= n_max; ++n) {
    for (int k = 0; k <= two_j(); ++k) {
      BasisState s{n, k};
      if (in_sector(sector, parity_of_basis_state(s))) out.push_back(s);
    }
  }
  return out;
}

std::vector<std::size_t> BasisSpec::full_indices() const {
  std::vector<std::size_t> out;
  const auto d = static_cast<std::size_t>(atomic_dim());
  for (const auto& s : states()) out.push_back(static_cast<std::size_t>(s.n) * d + static_cast<std::size_t>(s.k));
  return out;
}

std::size_t BasisSpec::dimension() const {
  if (sector == Parity::all) return full_dimension();
  return states().size();
}

int parity_of_basis_state(const BasisState& s) { return ((s.n + s.k) % 2 == 0) ? 1 : -1; }

int parity_of_basis_state(int n, double m, double j) {
  const int two_j = checked_two_j(j);
  const double k = m + j;
  const double rounded = std::round(k);
  if (n < 0 || std::abs(k - rounded) > 1e-12 || rounded < 0 || rounded > two_j) {
    throw std::invalid_argument("invalid basis state (n, m)");
  }
  return parity_of_basis_state(BasisState{n, static_cast<int>(rounded)});
}

Eigen::MatrixXd build_hamiltonian(const ModelParams& params, const BasisSpec& basis) {
  params.validate();
  basis.validate();
  if (checked_two_j(params.j) != basis.two_j()) throw std::invalid_argument("basis j differs from params j");

  const auto states = basis.states();
  const int two_j = basis.two_j();
  const int d = two_j + 1;
  // full index -> sector position (-1 when outside the sector)
  std::vector<long> position(basis.full_dimension(), -1);
  for (std::size_t i = 0; i < states.size(); ++i) {
    position[static_cast<std::size_t>(states[i].n * d + states[i].k)] = static_cast<long>(i);
  }

  const auto dim = static_cast<Eigen::Index>(states.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  const double coupling = params.gamma / std::sqrt(static_cast<double>(two_j));
  for (Eigen::Index i = 0; i < dim; ++i) {
    const auto& s = states[static_cast<std::size_t>(i)];
    h(i, i) = params.omega * s.n + params.omega0 * (s.k - 0.5 * two_j);
    if (s.n == basis.n_max) continue;
    // a^+ raises n by one; J+ + J- moves k by one. Only the upper triangle is generated
    // and mirrored, so the matrix is symmetric bit for bit.
    for (int dk : {-1, 1}) {
      const int kp = s.k + dk;
      if (kp < 0 || kp > two_j) continue;
      const long col = position[static_cast<std::size_t>((s.n + 1) * d + kp)];
      if (col < 0) continue;
      const double v = coupling * std::sqrt(static_cast<double>(s.n + 1)) * ladder_element(two_j, s.k, kp);
      h(i, col) = v;
      h(col, i) = v;
    }
  }
  return h;
}

Eigen::SparseMatrix<double> build_hamiltonian_sparse(const ModelParams& params, const BasisSpec& basis) {
  params.validate();
  basis.validate();
  const int two_j = basis.two_j();
  const int d = two_j + 1;
  const auto dim = static_cast<Eigen::Index>(basis.full_dimension());
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(dim) * 5);
  const double coupling = params.gamma / std::sqrt(static_cast<double>(two_j));
  for (int n = 0; n <= basis.n_max; ++n) {
    for (int k = 0; k <= two_j; ++k) {
      const int row = n * d + k;
      entries.emplace_back(row, row, params.omega * n + params.omega0 * (k - 0.5 * two_j));
      if (n == basis.n_max) continue;
      for (int dk : {-1, 1}) {
        const int kp = k + dk;
        if (kp < 0 || kp > two_j) continue;
        const int col = (n + 1) * d + kp;
        const double v = coupling * std::sqrt(static_cast<double>(n + 1)) * ladder_element(two_j, k, kp);
        entries.emplace_back(row, col, v);
        entries.emplace_back(col, row, v);
      }
    }
  }
  Eigen::SparseMatrix<double> h(dim, dim);
  h.setFromTriplets(entries.begin(), entries.end());
  return h;
}

double EigenDecomposition::converged_eps_max() const {
  if (converged_count == 0) return -std::numeric_limits<double>::infinity();
  return energies(static_cast<Eigen::Index>(converged_count - 1));
}

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
EigenDecomposition::grid(std::size_t k) const {
  return {vectors.col(static_cast<Eigen::Index>(k)).data(), basis.n_max + 1, basis.atomic_dim()};
}

EigenDecomposition diagonalize(const ModelParams& params, const BasisSpec& basis, const DiagonalizeOptions& opts) {
  params.validate();
  basis.validate();

  std::vector<SectorSolve> solves;
  if (basis.sector == Parity::all) {
    BasisSpec pos = basis;
    pos.sector = Parity::positive;
    BasisSpec neg = basis;
    neg.sector = Parity::negative;
    solves.push_back(solve_sector(params, pos, opts.eps_max));
    solves.push_back(solve_sector(params, neg, opts.eps_max));
  } else {
    solves.push_back(solve_sector(params, basis, opts.eps_max));
  }

  struct Level {
    double eps;
    std::size_t solve;
    Eigen::Index col;
  };
  std::vector<Level> levels;
  for (std::size_t s = 0; s < solves.size(); ++s) {
    for (Eigen::Index c = 0; c < solves[s].energies.size(); ++c) levels.push_back({solves[s].energies(c), s, c});
  }
  // Stable ordering: energy, then positive sector first.
  std::stable_sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.eps < b.eps; });

  EigenDecomposition dec;
  dec.params = params;
  dec.basis = basis;
  const auto n_levels = static_cast<Eigen::Index>(levels.size());
  dec.energies.resize(n_levels);
  dec.vectors.resize(static_cast<Eigen::Index>(basis.full_dimension()), n_levels);
  dec.parities.resize(levels.size());

  BasisSpec full = basis;
  full.sector = Parity::all;
  Eigen::VectorXd parity_diag(static_cast<Eigen::Index>(full.full_dimension()));
  {
    Eigen::Index i = 0;
    for (const auto& s : full.states()) parity_diag(i++) = parity_of_basis_state(s);
  }

  for (Eigen::Index i = 0; i < n_levels; ++i) {
    const auto& lv = levels[static_cast<std::size_t>(i)];
    dec.energies(i) = lv.eps;
    dec.vectors.col(i) = solves[lv.solve].vectors.col(lv.col);
    const double expectation = dec.vectors.col(i).cwiseAbs2().dot(parity_diag);
    if (std::abs(expectation - 1.0) <= opts.parity_tol) {
      dec.parities[static_cast<std::size_t>(i)] = 1;
    } else if (std::abs(expectation + 1.0) <= opts.parity_tol) {
      dec.parities[static_cast<std::size_t>(i)] = -1;
    } else {
      throw NumericalError("parity expectation " + std::to_string(expectation) + " of level " + std::to_string(i) +
                           " is not +-1");
    }
  }
  dec.converged_count = levels.size();
  return dec;
}

std::size_t converged_levels(const EigenDecomposition& lo, const EigenDecomposition& hi, double tol) {
  if (hi.basis.n_max <= lo.basis.n_max) throw std::invalid_argument("converged_levels: hi must use the larger cutoff");
  auto sector_lists = [](const EigenDecomposition& dec) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t k = 0; k < dec.n_levels(); ++k) (dec.parities[k] > 0 ? pos : neg).push_back(k);
    return std::pair{pos, neg};
  };
  const auto [lo_pos, lo_neg] = sector_lists(lo);
  const auto [hi_pos, hi_neg] = sector_lists(hi);

  // n-major ordering: the smaller basis is a prefix of the larger one.
  const Eigen::Index rows = lo.vectors.rows();
  auto infidelity = [&](std::size_t a, std::size_t b) {
    const double ov = lo.vectors.col(static_cast<Eigen::Index>(a)).dot(hi.vectors.col(static_cast<Eigen::Index>(b)).head(rows));
    return 1.0 - std::abs(ov);
  };

  // Per level of `lo`: converged inside its own sector?
  std::vector<bool> ok(lo.n_levels(), false);
  auto mark = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      if (std::abs(lo.energies(static_cast<Eigen::Index>(a[i])) - hi.energies(static_cast<Eigen::Index>(b[i]))) >= tol)
        break;
      if (infidelity(a[i], b[i]) >= 1e-8) break;
      ok[a[i]] = true;
    }
  };
  mark(lo_pos, hi_pos);
  mark(lo_neg, hi_neg);

  std::size_t k = 0;
  while (k < ok.size() && ok[k]) ++k;
  return k;
}

int default_n_max(double j) { return static_cast<int>(std::ceil(10.0 * j)); }

EigenDecomposition diagonalize_converged(const ModelParams& params, int n_max, int n_max_check, Parity sector,
                                         double tol, const DiagonalizeOptions& opts) {
  if (n_max_check <= n_max) throw std::invalid_argument("n_max_check must exceed n_max");
  const auto lo = diagonalize(params, BasisSpec{params.j, n_max, sector}, opts);
  auto hi = diagonalize(params, BasisSpec{params.j, n_max_check, sector}, opts);
  hi.converged_count = std::min(converged_levels(lo, hi, tol), hi.n_levels());
  return hi;
}

}  // namespace dickedim
