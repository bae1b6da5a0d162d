#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ionxy {

using Complex = std::complex<double>;

// Normalisation. The ion-trap effective Hamiltonian sums over ordered pairs,
//   H = Σ_{i≠j} J_ij (σˣσˣ + σʸσʸ) + Σ_j h_j σᶻ,
// so with J from coupling_matrix() the pair coefficient is 2J and the
// single-excitation hop |i⟩ ↔ |j⟩ is 4J. build_sector() takes pair
// coefficients K (H = Σ_{i<j} K_ij (σˣσˣ + σʸσʸ) + Σ h σᶻ, hop 2K);
// build_single_excitation() takes the hopping matrix directly.

/// K = 2J: pair coefficients for build_sector from coupling_matrix() output.
Eigen::MatrixXd xy_pair_couplings(const Eigen::MatrixXd& J);
/// 4J: single-excitation hopping matrix from coupling_matrix() output.
Eigen::MatrixXd single_excitation_hopping(const Eigen::MatrixXd& J);

/// A fixed-excitation block of the XY Hamiltonian.
struct XYSector {
  int n_sites = 0;
  int excitations = 0;
  std::vector<std::uint64_t> basis;  // occupation bitmasks, ascending
  Eigen::MatrixXd dense;             // used when dimension ≤ dense_limit
  Eigen::SparseMatrix<double> sparse;
  bool is_dense = true;

  static constexpr int dense_limit = 4096;

  int dimension() const { return static_cast<int>(basis.size()); }
  /// Index of a bitmask in basis, or -1.
  int index_of(std::uint64_t mask) const;
  /// Dense copy regardless of storage.
  Eigen::MatrixXd to_dense() const;
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  std::string id() const;
};

struct StateVector {
  Eigen::VectorXcd amplitudes;
  std::string basis_id;

  double norm() const { return amplitudes.norm(); }
};

/// Walk Hamiltonian: off-diagonal = hopping, diagonal = per-site
/// energies (empty for none).
XYSector build_single_excitation(const Eigen::MatrixXd& hopping,
                                 const Eigen::VectorXd& site_energies = {});

/// s-excitation block of Σ_{i<j} K_ij (σˣσˣ + σʸσʸ) + Σ_j h_j σᶻ. The sparse
/// representation is used above XYSector::dense_limit.
XYSector build_sector(const Eigen::MatrixXd& pair_couplings, const Eigen::VectorXd& fields,
                      int excitations);

/// Basis state |mask⟩ of a sector.
StateVector basis_state(const XYSector& sector, std::uint64_t mask);
/// Single excitation on `site` (0-based) of a single-excitation sector.
StateVector site_state(const XYSector& sector, int site);

/// Cached spectral decomposition for repeated evolution of dense sectors.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Eigen::MatrixXd& hamiltonian);

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi0, double t) const;
  /// Evolution of a state given by its eigenbasis coefficients c = Vᵀψ₀.
  Eigen::VectorXcd evolve_coefficients(const Eigen::VectorXcd& coefficients, double t) const;
  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& psi0) const;

  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

struct KrylovOptions {
  int subspace = 30;
  double tolerance = 1e-12;
};

/// exp(−iHt)ψ by short-iterative Lanczos steps; H given as sparse symmetric.
Eigen::VectorXcd krylov_evolve(const Eigen::SparseMatrix<double>& hamiltonian,
                               const Eigen::VectorXcd& psi0, double t,
                               const KrylovOptions& options = {});

/// ψ(t) = exp(−iHt)ψ₀: spectral for dense sectors, Lanczos for sparse ones.
StateVector evolve(const XYSector& sector, const StateVector& psi0, double t);

/// |⟨target|ψ⟩|² where target is the basis index (the site for s = 1).
double transfer_fidelity(const StateVector& psi, int target_index);

/// Per-site occupation ⟨n_i⟩ of a state in `sector`.
Eigen::VectorXd site_occupations(const XYSector& sector, const StateVector& psi);

/// ⟨ψ|H|ψ⟩.
double energy(const XYSector& sector, const StateVector& psi);

/// Samples |⟨i|ψ(t)⟩|² for every site on a time grid (single-excitation
/// sector) plus the fidelity on `target_site`.
struct SiteTrace {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> site_probabilities;
  std::vector<double> fidelity;
};
SiteTrace site_trace(const XYSector& sector, const StateVector& psi0,
                     const std::vector<double>& times, int target_site);

}  // namespace ionxy
