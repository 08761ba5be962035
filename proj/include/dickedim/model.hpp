#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dickedim {

/// Couplings of the Dicke Hamiltonian H = w a^+a + w0 Jz + (g/sqrt(2j))(a^+ + a)(J+ + J-).
/// Energies are rescaled by j throughout (eps = E/j), so hbar_eff = 1/j.
struct ModelParams {
  double omega = 1.0;
  double omega0 = 1.0;
  double gamma = 1.0;
  double j = 100.0;

  double hbar_eff() const { return 1.0 / j; }
  double gamma_c() const;
  int two_j() const;
  /// Throws std::invalid_argument unless omega, omega0 > 0 and j is a positive half-integer.
  void validate() const;
};

enum class Parity { all, positive, negative };

/// One element |n> (x) |j, m> of the Fock (x) pseudospin basis; k = j + m runs over 0..2j.
struct BasisState {
  int n = 0;
  int k = 0;
};

/// Truncated product basis. Ordering is n-major, m-minor: index = n*(2j+1) + (j+m) in the
/// full basis; a parity sector keeps the same relative order.
struct BasisSpec {
  double j = 100.0;
  int n_max = 0;
  Parity sector = Parity::all;

  int two_j() const;
  int atomic_dim() const { return two_j() + 1; }
  std::size_t full_dimension() const;
  /// Number of states in the selected sector.
  std::size_t dimension() const;
  std::vector<BasisState> states() const;
  /// Positions of the sector states inside the full basis.
  std::vector<std::size_t> full_indices() const;
  void validate() const;
};

/// (-1)^(n + m + j), evaluated with integer arithmetic on k = j + m.
int parity_of_basis_state(int n, double m, double j);
int parity_of_basis_state(const BasisState& s);

/// Dense, exactly symmetric Hamiltonian restricted to basis.sector (in the sector ordering).
Eigen::MatrixXd build_hamiltonian(const ModelParams& params, const BasisSpec& basis);

/// Same operator on the full truncated basis in sparse form (used for brute-force moments).
Eigen::SparseMatrix<double> build_hamiltonian_sparse(const ModelParams& params, const BasisSpec& basis);

struct DiagonalizeOptions {
  /// Keep only levels with rescaled energy <= eps_max (upper end of the requested window).
  double eps_max = std::numeric_limits<double>::infinity();
  /// Tolerance on |<Pi> - (+-1)| before a level's parity is snapped.
  double parity_tol = 1e-6;
};

/// Eigenpairs of the truncated Hamiltonian. Vectors are always expressed on the *full*
/// truncated basis (n-major, m-minor) so that sectors and cached runs are interchangeable.
struct EigenDecomposition {
  ModelParams params;
  BasisSpec basis;
  Eigen::VectorXd energies;  // rescaled, ascending
  Eigen::MatrixXd vectors;   // full_dimension x n_levels
  std::vector<int> parities;
  /// Levels [0, converged_count) are trusted; equals n_levels until a convergence check runs.
  std::size_t converged_count = 0;

  std::size_t n_levels() const { return static_cast<std::size_t>(energies.size()); }
  /// Upper edge of the trusted spectrum (rescaled energy of the last converged level).
  double converged_eps_max() const;
  /// Column k reshaped as an (n_max+1) x (2j+1) coefficient grid.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
  grid(std::size_t k) const;
};

/// Full symmetric eigendecomposition. For Parity::all the two parity blocks are solved
/// separately and merged, so every level carries an exact parity label.
EigenDecomposition diagonalize(const ModelParams& params, const BasisSpec& basis,
                               const DiagonalizeOptions& opts = {});

/// Largest K such that levels 0..K-1 of `lo` agree with `hi` to `tol` (matched level by
/// level inside each parity sector) and whose eigenvectors agree, 1 - |<v_lo|v_hi>| < 1e-8.
std::size_t converged_levels(const EigenDecomposition& lo, const EigenDecomposition& hi, double tol);

/// Default bosonic cutoff for a given j: ceil(10 j).
int default_n_max(double j);

/// Solve at n_max and at n_max_check (> n_max), and return the larger solve with
/// converged_count set from converged_levels.
EigenDecomposition diagonalize_converged(const ModelParams& params, int n_max, int n_max_check,
                                         Parity sector, double tol = 1e-6,
                                         const DiagonalizeOptions& opts = {});

}  // namespace dickedim
