#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ionxy {

/// H_s = γH + A(|w⟩⟨w| + |f⟩⟨f|), evolved for `duration`.
struct ProtocolConfig {
  double gamma = 1.0;
  int sender = 0;
  int receiver = -1;              // −1: last site
  double duration = 0.0;          // T, in 1/A units of time
  double marker_amplitude = 1.0;  // A

  /// Resolves receiver = −1 and throws InvalidArgument on bad values.
  ProtocolConfig resolved(int n_sites) const;
};

struct ProtocolReport {
  double fidelity_peak = 0.0;     // max of fidelity_trace
  double t_peak = 0.0;
  double fidelity_at_duration = 0.0;
  std::vector<double> times;
  std::vector<double> fidelity_trace;
  double scaled_time = 0.0;       // γ λ_max T
  double gamma_used = 0.0;
  double analytic_gamma = 0.0;    // A / λ_max
  double duration = 0.0;
  double lambda_max = 0.0;
};

/// γH plus A-weighted projectors on the marked sites.
Eigen::MatrixXd search_hamiltonian(const Eigen::MatrixXd& walk, double gamma, const std::vector<int>& marked,
                                   double marker_amplitude = 1.0);

struct GammaChoice {
  double gamma = 0.0;       // 1 / λ_max
  double lambda_max = 0.0;
  bool degenerate_spectrum = false;  // top gap < 1e-12 λ_max
};
GammaChoice analytic_gamma(const Eigen::MatrixXd& walk);

/// π sqrt(n/2) / A.
double transfer_time(int n, double marker_amplitude = 1.0);

/// F(t) = (β²/2) sin²(√2 β t) + sin²(β t/√2), β = 1/√n.
double analytic_transfer_fidelity(int n, double t);

/// The reduced three-state Hamiltonian on {|w⟩, |f⟩, |p⟩} without the
/// identity shift.
Eigen::Matrix3d reduced_search_hamiltonian(int n);
/// e^{−iMt} by the rotation formula 1 − i sin(x)H̃ + (cos x − 1)H̃², x = √2βt.
Eigen::Matrix3cd reduced_propagator(int n, double t);
/// |⟨f|e^{−iMt}|w⟩|² of the reduced model.
double reduced_transfer_fidelity(int n, double t);

/// Fidelity onto the receiver at many times from one diagonalisation.
class TransferEvaluator {
 public:
  TransferEvaluator(const Eigen::MatrixXd& walk, const ProtocolConfig& config);
  double fidelity(double t) const;

 private:
  Eigen::VectorXd values_;
  Eigen::VectorXd weights_;  // V(f,k) V(w,k)
};

struct TransferOptions {
  int samples = 401;
  double horizon = 1.5;  // trace covers [0, horizon · T]
};

/// Evolves |w⟩ under H_s and records |⟨f|ψ(t)⟩|². analytic_gamma is NaN for a walk
/// without a positive eigenvalue.
ProtocolReport run_transfer(const Eigen::MatrixXd& walk, const ProtocolConfig& config,
                            const TransferOptions& options = {});

/// |⟨w|ψ(t)⟩|² from the uniform superposition under γH + A|w⟩⟨w|.
std::vector<double> run_search(const Eigen::MatrixXd& walk, double gamma, int marked,
                               const std::vector<double>& times, double marker_amplitude = 1.0);

struct OptimizerOptions {
  double box = 0.3;          // ± relative half-width around the seed
  int max_evaluations = 200;
  int latin_samples = 40;
  std::uint64_t seed = 7;
  double min_step = 1e-7;    // relative pattern-search step
};

struct OptimizedProtocol {
  ProtocolConfig config;
  ProtocolConfig seed_config;
  double seed_fidelity = 0.0;  // F(T) at the seed
  double fidelity = 0.0;       // F(T) at the optimum
  int evaluations = 0;
  ProtocolReport report;
};

/// Analytic seed: γ = A/λ_max, T = π sqrt(n/2)/A.
ProtocolConfig seed_protocol(const Eigen::MatrixXd& walk, int sender = 0, int receiver = -1,
                             double marker_amplitude = 1.0);

/// Maximises F(T) over (γ, T) inside the box around `seed` with Latin
/// hypercube sampling followed by compass pattern search. Deterministic for
/// a given options.seed and never worse than the seed.
OptimizedProtocol optimize_protocol(const Eigen::MatrixXd& walk, const ProtocolConfig& seed,
                                    const OptimizerOptions& options = {}, const TransferOptions& trace = {});

/// Idealised walk Hamiltonian H_ij = 1/|i − j|^α, zero diagonal.
Eigen::MatrixXd power_law_walk(int n, double alpha);

}  // namespace ionxy
