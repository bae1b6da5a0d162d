#pragma once

#include <Eigen/Dense>

#include "ionxy/constants.hpp"
#include "ionxy/fit_convention.hpp"

namespace ionxy {

/// Physical trap and laser parameters. All frequencies are angular (rad/s).
struct TrapConfig {
  int n_ions = 1;
  double ion_mass = 0.0;     // kg
  double omega_x = 0.0;      // transverse, laser-coupled axis
  double omega_y = 0.0;      // transverse, uncoupled axis
  double omega_z = 0.0;      // axial
  double delta_k = 0.0;      // Raman wave-vector difference, 1/m
  double rabi_total = 0.0;   // Ω_total; per-ion Ω = Ω_total / n_ions
  double detuning_mu = 0.0;  // μ

  double rabi_per_ion() const { return rabi_total / n_ions; }

  /// Throws InvalidArgument unless n_ions ≥ 1, all frequencies and the mass
  /// are positive, and omega_z < min(omega_x, omega_y). δk, Ω and μ may be
  /// zero (geometry-only use).
  void validate() const;
};

enum class TransverseAxis { X, Y };

/// Equilibrium configuration and (optionally) transverse normal modes.
///
/// positions are dimensionless axial coordinates u_i in units of
/// length_scale. mode_matrix(i, m) = b_im with orthonormal columns,
/// mode_freqs(m) = ω_m in rad/s sorted descending, so m = 0 is the
/// centre-of-mass mode. The mode fields are empty for a positions-only
/// solution.
struct ChainSolution {
  Eigen::VectorXd positions;
  double length_scale = 0.0;
  Eigen::MatrixXd mode_matrix;
  Eigen::VectorXd mode_freqs;
  TransverseAxis axis = TransverseAxis::X;

  int n_ions() const { return static_cast<int>(positions.size()); }
  bool has_modes() const { return mode_freqs.size() > 0; }
  Eigen::VectorXd positions_m() const { return positions * length_scale; }
};

/// ℓ = (e² / (4πε₀ M ω_z²))^(1/3). In units of M ω_z² ℓ² the axial potential
/// is ½Σu_i² + Σ_{i<j} 1/|u_i − u_j|.
double length_scale(const TrapConfig& trap);

struct EquilibriumOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-13;  // raised to the gradient rounding floor when larger
};

/// Dimensionless axial gradient ∂V/∂u_i of the chain potential.
Eigen::VectorXd axial_gradient(const Eigen::VectorXd& positions);

/// Minimises the axial potential by damped Newton iteration starting from an
/// evenly spaced guess of half-width ~N^0.56. The result is symmetrised so
/// u_i = −u_{N+1−i} holds to rounding. Throws NonConvergence.
ChainSolution solve_equilibrium(const TrapConfig& trap, const EquilibriumOptions& options = {});

/// Transverse Hessian of the trap + Coulomb potential divided by M, in rad²/s²,
/// for the requested axis.
Eigen::MatrixXd transverse_hessian(const TrapConfig& trap, const Eigen::VectorXd& positions,
                                   TransverseAxis axis = TransverseAxis::X);

/// Normal modes of the transverse Hessian at an equilibrium. Eigenvalues are
/// sorted descending (ties broken by the index of the largest-magnitude
/// component); each column's first significant component is made positive.
/// Throws UnstableChain when any eigenvalue is ≤ 0.
ChainSolution transverse_phonon_modes(const TrapConfig& trap, const ChainSolution& equilibrium,
                                      TransverseAxis axis = TransverseAxis::X);

/// Convenience: equilibrium followed by x-axis modes.
ChainSolution solve_chain(const TrapConfig& trap);

struct StabilityReport {
  bool stable = false;
  double margin = 0.0;  // lowest transverse ω² over both transverse axes, rad²/s²
  TransverseAxis binding_axis = TransverseAxis::X;
};

/// Linear-chain stability. Both transverse axes are checked; the weaker one
/// sets the zig-zag threshold.
StabilityReport is_linear_stable(const TrapConfig& trap);

/// Axial frequency at which the linear chain of trap.n_ions buckles along
/// the weaker transverse axis. The dimensionless equilibrium does not depend
/// on ω_z, so the threshold is ω_t / sqrt(−κ_min) with κ_min the lowest
/// eigenvalue of the Coulomb part of the transverse Hessian. Returns +inf for
/// a single ion. trap.omega_z is ignored.
double critical_axial_frequency(const TrapConfig& trap);

struct AxialScanOptions {
  double omega_min = constants::two_pi * 0.05e6;
  double omega_max = constants::two_pi * 5.0e6;
  int points = 600;
  /// A grid point counts as stable if the chain is still linear with ω_z
  /// multiplied by this factor (margin on the critical aspect ratio).
  double safety_factor = 1.05;
  /// Detuning at which β is compared, as μ / ω_COM.
  double detuning_ratio = 1.0002;
  FitConvention convention = FitConvention::EndIonChainIndex;
};

struct AxialChoice {
  double omega_z = 0.0;
  double beta = 0.0;  // NaN when undefined (n_ions < 3)
  int stable_points = 0;
};

/// Picks ω_z on a logarithmic grid: among stable points, the one whose
/// coupling matrix at the requested detuning has the smallest fitted
/// exponential factor β. For n_ions < 3 β is undefined and the largest
/// stable grid value is returned. Throws NoStablePoint.
AxialChoice choose_axial_frequency(const TrapConfig& trap_template, int n_ions,
                                   const AxialScanOptions& options = {});

}  // namespace ionxy
