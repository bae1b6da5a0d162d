#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ionxy/protocols.hpp"

namespace ionxy {

/// Quasi-static dephasing: each run draws one Gaussian longitudinal field per
/// ion. By default the standard deviation is sqrt(1/t2) rad/s (10 rad/s at
/// t2 = 10 ms); field_variance overrides σ² directly.
struct NoiseConfig {
  double t2 = 0.01;  // s
  int n_samples = 500;
  std::uint64_t seed = 0;
  std::optional<double> field_variance;  // rad²/s²

  double sigma() const;
  void validate() const;
};

/// Fields of run `sample_index`, rad/s. Entry j depends only on
/// (seed, sample_index, j), so chains of different length share their
/// leading draws.
Eigen::VectorXd sample_static_fields(int n_sites, const NoiseConfig& config, std::uint64_t sample_index);

struct NoiseEnsemble {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> std_dev;     // sample standard deviation (0 for one sample)
  std::vector<double> noiseless;
  std::vector<double> final_fidelity;  // per sample, at config.duration
  double mean_at_duration = 0.0;
  double std_at_duration = 0.0;
  double noiseless_at_duration = 0.0;
};

/// Adds each sample's fields to the diagonal of H_s (an energy shift of the
/// excited state on every ion), evolves |w⟩ and records the receiver
/// fidelity. Statistics are reduced in sample order, so results do not
/// depend on `threads`.
NoiseEnsemble noisy_transfer_ensemble(const Eigen::MatrixXd& walk, const ProtocolConfig& config,
                                      const NoiseConfig& noise, const std::vector<double>& times,
                                      int threads = 1);

/// Standard error of the mean of the first `count` entries.
double standard_error(const std::vector<double>& values, std::size_t count);

}  // namespace ionxy
