#pragma once

#include <vector>

#include "ionxy/chain_geometry.hpp"
#include "ionxy/coupling_engine.hpp"
#include "ionxy/leakage_analysis.hpp"
#include "ionxy/noise_model.hpp"
#include "ionxy/protocols.hpp"
#include "ionxy/spin_phonon_sim.hpp"

namespace ionxy {

/// Defaults: ¹⁷¹Yb⁺, ω_x = 2π·6 MHz, ω_y = 2π·5 MHz, Ω_total = 2π·1 MHz,
/// δk = 2·2π/355 nm. ω_z and μ are left at 0 (chosen by setup_chain).
TrapConfig default_trap(int n_ions);

struct SetupOptions {
  TrapConfig trap;  // omega_z = 0 → axial scan; detuning_mu = 0 → α search
  double alpha_target = 0.2;
  AxialScanOptions axial;
  DetuningSearchOptions detuning;
};

struct ChainSetup {
  TrapConfig trap;
  ChainSolution chain;
  bool axial_scanned = false;
  AxialChoice axial;
  bool detuning_searched = false;
  DetuningChoice detuning;
};

/// Resolves ω_z (axial scan) and μ (target α) when they are unset, then
/// solves the chain.
ChainSetup setup_chain(const SetupOptions& options);

struct LeakageOptions {
  int excitations = 1;
  int n_modes = 1;  // 1: COM only; 2: COM + most significant other mode
  int fock_cutoff = 4;
  int quanta_window = 2;
  double periods = 12.0;  // trace length in units of 2π/Δ_c
  int samples = 3000;
  PropagationMethod method = PropagationMethod::Exact;
  bool fit = true;
  FrequencyFitOptions fit_options;
};

struct LeakageExperiment {
  std::vector<int> modes;
  int basis_dimension = 0;
  double delta_c = 0.0;   // ω_eff − ω_COM
  double eta_1c = 0.0;
  std::vector<double> times;
  std::vector<double> leakage;     // E(t), all spins down
  std::vector<double> occupation;  // n̄(t)
  std::vector<double> analytic;    // s‖ℰ(t)‖ (or the two-mode average)
  std::vector<double> shifted;     // same with the fitted r
  FrequencyFit fit;
  CouplingModel model;             // restricted to `modes`
  RenormalizationResult renormalization;
};

/// Simulates the spin-phonon dynamics from the default initial state and
/// fits r against E(t) (s = 1) or n̄(t) (s > 1).
LeakageExperiment run_leakage_experiment(const ChainSetup& setup, const LeakageOptions& options = {});

struct StroboscopicFidelity {
  std::vector<double> times;
  std::vector<double> fidelity;
  double min_fidelity = 1.0;
};

/// Model fidelity against the XY evolution with `couplings` at
/// t_k = 2πk/Δ (k = 1, 2, …, t_k ≤ t_max). Uses the exact propagator.
StroboscopicFidelity stroboscopic_fidelity(const ChainSetup& setup, const LeakageExperiment& leakage,
                                           const Eigen::MatrixXd& couplings, double delta, double t_max,
                                           int fock_cutoff = 4, int quanta_window = 2);

struct TransferPoint {
  int n = 0;
  double alpha_target = 0.0;
  double alpha_achieved = 0.0;
  bool alpha_clamped = false;
  OptimizedProtocol ideal;
  OptimizedProtocol experimental;
  double omega_z = 0.0;
  double mu = 0.0;
  double lambda_max_physical = 0.0;  // of the physical hopping matrix 4J, rad/s
  Eigen::MatrixXd walk_physical;     // 4J, rad/s
};

struct TransferSweepOptions {
  TrapConfig trap = default_trap(2);  // n_ions is replaced per point
  double alpha = 0.2;
  bool experimental = true;
  OptimizerOptions optimizer;
  TransferOptions trace;
  AxialScanOptions axial;
  DetuningSearchOptions detuning;
};

/// Optimised transfer on idealised 1/r^α couplings and (optionally) on the
/// derived couplings of an N-ion chain; walks are normalised to unit top
/// eigenvalue with unit marker amplitude.
TransferPoint run_transfer_point(int n, const TransferSweepOptions& options);

struct NoisePoint {
  int n = 0;
  double alpha_target = 0.0;
  double noiseless = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
  NoiseEnsemble ensemble;
  ProtocolConfig physical;  // γ, A = λ_max (rad/s), T in s
};

/// Converts the optimised experimental protocol of `point` to physical units
/// and runs the dephasing ensemble at the switch-off time.
NoisePoint run_noise_point(const TransferPoint& point, const NoiseConfig& noise, int threads = 1);

}  // namespace ionxy
