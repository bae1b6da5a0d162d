#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "ionxy/chain_geometry.hpp"
#include "ionxy/xy_dynamics.hpp"

namespace ionxy {

/// Which part of the spin ⊗ phonon space is kept.
struct TruncationPolicy {
  std::vector<int> modes{0};  // included phonon modes (0 = COM)
  int fock_cutoff = 4;        // max phonons per mode
  int excitations = 1;        // s, spin excitations of the initial state
  /// Keep |k + Σp − s| ≤ quanta_window (k spin excitations, p phonons);
  /// negative disables the bound.
  int quanta_window = 2;
  /// Keep only k + Σp ≡ s (mod 2). Every term of the interaction changes
  /// k + Σp by 0 or ±2, so this sector is closed under the dynamics.
  bool parity_sector = true;

  void validate(int n_ions) const;
};

/// (spin bitmask, phonon occupations) states admitted by a policy, sorted
/// lexicographically.
class ProductBasis {
 public:
  ProductBasis() = default;
  ProductBasis(int n_ions, const TruncationPolicy& policy);

  int dimension() const { return static_cast<int>(spins_.size()); }
  int n_ions() const { return n_ions_; }
  int n_modes() const { return static_cast<int>(modes_.size()); }
  const std::vector<int>& modes() const { return modes_; }
  int fock_cutoff() const { return fock_cutoff_; }

  std::uint64_t spin(int k) const { return spins_[k]; }
  int phonons(int k, int mode_slot) const { return phonons_[k * n_modes() + mode_slot]; }
  int total_phonons(int k) const;
  /// Index of (mask, occupations) or -1.
  int index_of(std::uint64_t mask, const std::vector<int>& occupations) const;
  std::string id() const;

 private:
  int n_ions_ = 0;
  int fock_cutoff_ = 0;
  std::vector<int> modes_;
  std::vector<std::uint64_t> spins_;
  std::vector<int> phonons_;  // row-major, dimension × n_modes
};

/// Interaction-picture model on a truncated basis:
///   H_I(t) = e^{iH₀t} V e^{−iH₀t},  V = −Σ_{i,m} (Ωη_im/2)(a_m + a_m†)σˣ_i,
///   H₀ = Σ_m ω_m n_m + (ω_eff/2) Σ_i σᶻ_i,
/// which expands to the four rotating terms e^{∓i(ω_eff ± ω_m)t}.
struct SpinPhononModel {
  ProductBasis basis;
  Eigen::VectorXd h0;              // diagonal of H₀
  Eigen::SparseMatrix<double> v;   // V, real symmetric
  Eigen::VectorXd mode_freqs;      // included modes only
  Eigen::MatrixXd eta;             // N × included modes
  double rabi = 0.0;
  double omega_eff = 0.0;
};

SpinPhononModel make_spin_phonon_model(const TrapConfig& trap, const ChainSolution& chain,
                                       const TruncationPolicy& policy);

/// Dense H_I(t) on the model basis.
Eigen::MatrixXcd build_interaction_hamiltonian(const SpinPhononModel& model, double t);
Eigen::MatrixXcd build_interaction_hamiltonian(const TrapConfig& trap, const ChainSolution& chain,
                                               const TruncationPolicy& policy, double t);

/// Product state with the given spin mask and no phonons.
StateVector product_state(const ProductBasis& basis, std::uint64_t spin_mask);
/// Excitations on the first s ions, no phonons.
StateVector default_initial_state(const ProductBasis& basis, int excitations);

enum class PropagationMethod {
  Adaptive,  // Dormand–Prince 5(4) on the time-dependent H_I(t)
  Exact,     // U_I(t) = e^{iH₀t} e^{−i(H₀+V)t} by diagonalisation
};

struct PropagationOptions {
  PropagationMethod method = PropagationMethod::Adaptive;
  double tolerance = 1e-9;      // local error per step (adaptive)
  double min_step = 1e-16;      // StepUnderflow below this, seconds
  /// Upper bound on the step as a fraction of 2π/(ω_eff + ω_max).
  double max_step_fraction = 1.0 / 40.0;
};

struct Trajectory {
  std::string basis_id;
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
};

/// Streams ψ(t_k) for every requested output time (ascending, ≥ 0).
using StateObserver = std::function<void(double t, const Eigen::VectorXcd& psi)>;
void propagate(const SpinPhononModel& model, const StateVector& psi0, const std::vector<double>& times,
               const StateObserver& observer, const PropagationOptions& options = {});
Trajectory propagate(const SpinPhononModel& model, const StateVector& psi0, const std::vector<double>& times,
                     const PropagationOptions& options = {});

/// Population with every spin down, E(t) = ⟨0|Tr_ph ρ(t)|0⟩.
double vacuum_overlap(const ProductBasis& basis, const Eigen::VectorXcd& psi);
std::vector<double> vacuum_overlap(const ProductBasis& basis, const Trajectory& trajectory);

/// n̄(t) = Σ_m ⟨n_m⟩ over included modes.
double phonon_occupation(const ProductBasis& basis, const Eigen::VectorXcd& psi);
std::vector<double> phonon_occupation(const ProductBasis& basis, const Trajectory& trajectory);

/// Tr[ρ (1 ⊗ |φ⟩⟨φ|)] for an XY state φ in `sector`. Throws BasisMismatch if
/// the site counts differ.
double model_fidelity(const ProductBasis& basis, const Eigen::VectorXcd& psi, const XYSector& sector,
                      const Eigen::VectorXcd& xy_state);
std::vector<double> model_fidelity(const ProductBasis& basis, const Trajectory& trajectory,
                                   const XYSector& sector, const std::vector<Eigen::VectorXcd>& xy_states);

/// The `count` most significant modes: COM first, then by descending
/// Σ_i |Ω η_im / (ω_eff − ω_m)|.
std::vector<int> significant_modes(const TrapConfig& trap, const ChainSolution& chain, int count);

/// CSV with columns t, E, nbar and, when given, F.
void write_trajectory_csv(std::ostream& out, const std::vector<double>& times, const std::vector<double>& leakage,
                          const std::vector<double>& occupation, const std::vector<double>& fidelity = {});

/// Versioned checkpoint: one JSON header line, then 2·dim little-endian
/// doubles (re, im).
void write_checkpoint(std::ostream& out, const ProductBasis& basis, double t, const Eigen::VectorXcd& psi);
struct Checkpoint {
  std::string basis_id;
  double time = 0.0;
  Eigen::VectorXcd amplitudes;
};
Checkpoint read_checkpoint(std::istream& in);

}  // namespace ionxy
