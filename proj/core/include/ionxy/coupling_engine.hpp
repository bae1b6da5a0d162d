#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ionxy/chain_geometry.hpp"
#include "ionxy/fit_convention.hpp"

namespace ionxy {

/// ω_eff = sqrt(Ω² + μ²) with the per-ion Rabi frequency Ω.
double effective_frequency(const TrapConfig& trap);

/// η_im = δk · b_im · sqrt(ħ / (2 M ω_m)). Requires chain.has_modes().
Eigen::MatrixXd lamb_dicke(const TrapConfig& trap, const ChainSolution& chain);

struct ModeSumOptions {
  /// Modes entering the sums; empty means all modes.
  std::vector<int> mode_subset;
  /// ResonantDetuning is raised when |ω_eff − ω_m| < resonance_rel · ω_m.
  double resonance_rel = 1e-6;
};

/// XY couplings J_ij = Σ_m Ω² η_im η_jm ω_m / (8(ω_eff² − ω_m²)), i ≠ j.
/// Symmetric by construction with an exactly zero diagonal.
Eigen::MatrixXd coupling_matrix(const TrapConfig& trap, const Eigen::MatrixXd& eta,
                                const Eigen::VectorXd& mode_freqs,
                                const ModeSumOptions& options = {});

/// Same sum with ω_eff supplied directly (used for renormalised couplings).
Eigen::MatrixXd coupling_matrix_at(double rabi, double omega_eff, const Eigen::MatrixXd& eta,
                                   const Eigen::VectorXd& mode_freqs,
                                   const ModeSumOptions& options = {});

/// h_j = Σ_m Ω² η_jm² ω_eff (2n + 1) / (4(ω_eff² − ω_m²)).
Eigen::VectorXd local_fields(const TrapConfig& trap, const Eigen::MatrixXd& eta,
                             const Eigen::VectorXd& mode_freqs, int n_init = 0,
                             const ModeSumOptions& options = {});

struct PowerLawFit {
  double alpha = 0.0;
  double beta = 0.0;           // per unit of the convention's distance
  double log_amplitude = 0.0;  // c in ln|J| = c − α ln r − β r
  double residual = 0.0;       // RMS of the log-space residuals
  int points = 0;
  int negative_entries = 0;    // entries fitted through |J|
};

/// Least-squares fit of ln|J| = c − α ln r − β r over the pairs selected by
/// `convention`. With fit_beta = false β is pinned to 0. Axial conventions
/// need the chain's axial positions in metres. Throws DegenerateFit when
/// fewer than two distinct distances (three with β) are available, or when
/// a selected coupling is exactly zero.
PowerLawFit fit_alpha_beta(const Eigen::MatrixXd& J,
                           FitConvention convention = FitConvention::EndIonChainIndex,
                           bool fit_beta = true,
                           const Eigen::VectorXd* axial_positions_m = nullptr);

/// μ such that ω_eff(μ) = 3 Ω η_COM + ω_COM, with η_COM the end-ion
/// Lamb-Dicke factor of the centre-of-mass mode. Clamped to ≥ 0.
double min_detuning(const TrapConfig& trap, const ChainSolution& chain);

struct DetuningSearchOptions {
  double alpha_tolerance = 1e-3;
  /// Upper end of the search window as a multiple of ω_COM.
  double mu_max_ratio = 20.0;
  int max_iterations = 200;
  FitConvention convention = FitConvention::EndIonChainIndex;
};

struct DetuningChoice {
  double mu = 0.0;
  double mu_min = 0.0;
  double achieved_alpha = 0.0;
  /// Set when the target cannot be met inside [μ_min, μ_max] and the search
  /// clamped to the nearer end.
  bool target_unreachable = false;
};

/// Bisection (in log of ω_eff − ω_COM) for the detuning whose pure power-law
/// α matches the target, restricted to μ ≥ μ_min.
DetuningChoice detuning_for_alpha(const TrapConfig& trap, const ChainSolution& chain,
                                  double alpha_target, const DetuningSearchOptions& options = {});

/// Everything the XY layer needs from a configured chain.
struct CouplingModel {
  Eigen::MatrixXd eta;
  Eigen::MatrixXd J;
  Eigen::VectorXd h;
  Eigen::VectorXd mode_freqs;
  double rabi = 0.0;
  double omega_eff = 0.0;
  double alpha_fit = 0.0;  // pure power-law fit (β pinned to 0)
  double beta_fit = 0.0;   // β of the joint (α, β) fit
  FitConvention fit_convention = FitConvention::EndIonChainIndex;
  int n_init = 0;
  std::vector<int> modes;  // empty: all modes
  int negative_pairs = 0;
};

struct CouplingOptions {
  ModeSumOptions mode_sum;
  int n_init = 0;
  FitConvention convention = FitConvention::EndIonChainIndex;
};

/// lamb_dicke + coupling_matrix + local_fields + fit, at trap.detuning_mu.
/// Fit parameters stay 0 when the convention yields too few distances.
CouplingModel build_coupling_model(const TrapConfig& trap, const ChainSolution& chain,
                                   const CouplingOptions& options = {});

/// (pair distance, J) rows for plotting; distance per the fit convention.
struct PairCoupling {
  double distance;
  int i;
  int j;
  double coupling;
};
std::vector<PairCoupling> pair_couplings(const Eigen::MatrixXd& J, FitConvention convention,
                                         const Eigen::VectorXd* axial_positions_m = nullptr);

}  // namespace ionxy
