#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ionxy/coupling_engine.hpp"

namespace ionxy {

/// f_k = (−1)^(k+1).
inline double dyson_sign(int k) { return (k % 2 == 0) ? -1.0 : 1.0; }

/// α_m(p,q;t) = ∫₀ᵗ e^{i(f_q ω_eff + f_p ω_m)τ} dτ.
std::complex<double> dyson_alpha(double omega_eff, double omega_m, int p, int q, double t);

/// β_lm(r,s,p,q;t) = ∫₀ᵗ α_m(p,q;τ) e^{i(f_s ω_eff + f_r ω_l)τ} dτ.
std::complex<double> dyson_beta(double omega_eff, double omega_l, double omega_m, int r, int s, int p, int q,
                                double t);

/// The secular coefficient β_mm(1,0,0,1;t) written out:
/// −it/Δ + (1 − e^{−iΔt})/Δ², Δ = ω_eff − ω_m.
std::complex<double> dyson_beta_secular(double omega_eff, double omega_m, double t);

/// ‖ℰ(t)‖ = Ω²η²(1 − cos Δt)/(2Δ²) for the dominant mode.
double leakage_norm_single(double eta_1c, double rabi, double delta_c, double t);

/// Ion-averaged leakage of two modes. eta is N × 2 (columns: modes 1, 2).
double leakage_norm_two_modes(const Eigen::MatrixXd& eta, double rabi, double omega_eff, double omega_1,
                              double omega_2, double t);

/// 𝒩(t) = 1 − Tr ℰ(t) on every point of a leakage trace.
std::vector<double> norm_factor(const std::vector<double>& leakage);

/// Analytic leakage as a function of (r, t) with ω_eff → r·ω_eff.
using LeakageForm = std::function<double(double r, double t)>;

/// s·‖ℰ‖ for one mode.
LeakageForm single_mode_form(double eta_1c, double rabi, double omega_eff, double omega_c, int excitations = 1);
/// s·[‖ℰ₂‖]_k for two modes.
LeakageForm two_mode_form(const Eigen::MatrixXd& eta, double rabi, double omega_eff, double omega_1,
                          double omega_2, int excitations = 1);

struct FrequencyFitOptions {
  double r_min = 0.999;
  double r_max = 1.002;
  int grid_points = 3001;
  double r_tolerance = 1e-13;
  /// FitFailure when Σ(E − model)² exceeds this fraction of Σ E².
  double max_relative_residual = 0.5;
};

struct FrequencyFit {
  double r = 1.0;
  double relative_residual = 0.0;
  bool below_one = false;
};

/// Least-squares fit of r over the whole trace: a grid scan over
/// [r_min, r_max] followed by golden-section refinement around the best
/// cell.
FrequencyFit fit_effective_frequency(const std::vector<double>& times, const std::vector<double>& simulated,
                                     const LeakageForm& form, const FrequencyFitOptions& options = {});

struct RenormalizationResult {
  double r = 1.0;
  Eigen::MatrixXd J_prime;
  Eigen::MatrixXd pair_factors;  // J'_ij / J_ij, zero on the diagonal
  double factor_summary = 1.0;   // mean over i < j
  bool below_one = false;
};

/// J' evaluated at the time-averaged frequency (1 + r)ω_eff/2 on the modes in
/// `shifted_modes` (indices into the full mode list) and at ω_eff on the
/// others. The mode set is the model's own (all modes when model.modes is
/// empty).
RenormalizationResult renormalized_couplings(const CouplingModel& model, double r,
                                             const std::vector<int>& shifted_modes = {0});

/// n̄(t) ≈ s·‖ℰ'(t)‖.
std::vector<double> higher_subspace_scaling(int excitations, const std::vector<double>& envelope);

}  // namespace ionxy
