#include "ionxy/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <Eigen/Eigenvalues>

#include "ionxy/errors.hpp"
#include "ionxy/random.hpp"

namespace ionxy {

double NoiseConfig::sigma() const {
  if (field_variance) return std::sqrt(*field_variance);
  return std::isinf(t2) ? 0.0 : std::sqrt(1.0 / t2);
}

void NoiseConfig::validate() const {
  if (!(t2 > 0.0)) throw InvalidArgument("t2 must be positive");
  if (n_samples < 1) throw InvalidArgument("n_samples must be >= 1");
  if (field_variance && !(*field_variance >= 0.0)) throw InvalidArgument("field_variance must be non-negative");
}

Eigen::VectorXd sample_static_fields(int n_sites, const NoiseConfig& config, std::uint64_t sample_index) {
  config.validate();
  const double sigma = config.sigma();
  const CounterStream stream(config.seed, 0x6e6f697365ULL, sample_index);
  Eigen::VectorXd f(n_sites);
  for (int j = 0; j < n_sites; ++j) f(j) = sigma == 0.0 ? 0.0 : sigma * stream.normal(j);
  return f;
}

namespace {

struct SampleResult {
  std::vector<double> trace;
  double at_duration = 0.0;
};

SampleResult run_sample(const Eigen::MatrixXd& hs, const Eigen::VectorXd& fields, const ProtocolConfig& c,
                        const std::vector<double>& times) {
  Eigen::MatrixXd h = hs;
  h.diagonal() += fields;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::VectorXd w =
      es.eigenvectors().row(c.receiver).transpose().cwiseProduct(es.eigenvectors().row(c.sender).transpose());
  auto fidelity = [&](double t) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      re += w(k) * std::cos(es.eigenvalues()(k) * t);
      im -= w(k) * std::sin(es.eigenvalues()(k) * t);
    }
    return std::min(1.0, re * re + im * im);
  };
  SampleResult r;
  r.trace.reserve(times.size());
  for (double t : times) r.trace.push_back(fidelity(t));
  r.at_duration = fidelity(c.duration);
  return r;
}

}  // namespace

NoiseEnsemble noisy_transfer_ensemble(const Eigen::MatrixXd& walk, const ProtocolConfig& config,
                                      const NoiseConfig& noise, const std::vector<double>& times, int threads) {
  noise.validate();
  const int n = static_cast<int>(walk.rows());
  const ProtocolConfig c = config.resolved(n);
  const Eigen::MatrixXd hs = search_hamiltonian(walk, c.gamma, {c.sender, c.receiver}, c.marker_amplitude);

  std::vector<SampleResult> results(noise.n_samples);
  auto work = [&](int begin, int end) {
    for (int k = begin; k < end; ++k) results[k] = run_sample(hs, sample_static_fields(n, noise, k), c, times);
  };
  threads = std::clamp(threads, 1, noise.n_samples);
  if (threads == 1) {
    work(0, noise.n_samples);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (noise.n_samples + threads - 1) / threads;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back(work, t * chunk, std::min(noise.n_samples, (t + 1) * chunk));
    for (auto& th : pool) th.join();
  }

  NoiseEnsemble out;
  out.times = times;
  const SampleResult clean = run_sample(hs, Eigen::VectorXd::Zero(n), c, times);
  out.noiseless = clean.trace;
  out.noiseless_at_duration = clean.at_duration;

  const double ns = noise.n_samples;
  out.mean.assign(times.size(), 0.0);
  out.std_dev.assign(times.size(), 0.0);
  for (const auto& r : results)
    for (std::size_t k = 0; k < times.size(); ++k) out.mean[k] += r.trace[k];
  for (double& m : out.mean) m /= ns;
  if (noise.n_samples > 1) {
    for (const auto& r : results)
      for (std::size_t k = 0; k < times.size(); ++k) out.std_dev[k] += std::pow(r.trace[k] - out.mean[k], 2);
    for (double& s : out.std_dev) s = std::sqrt(s / (ns - 1.0));
  }
  for (const auto& r : results) out.final_fidelity.push_back(r.at_duration);
  double sum = 0.0;
  for (double f : out.final_fidelity) sum += f;
  out.mean_at_duration = sum / ns;
  if (noise.n_samples > 1) {
    double var = 0.0;
    for (double f : out.final_fidelity) var += std::pow(f - out.mean_at_duration, 2);
    out.std_at_duration = std::sqrt(var / (ns - 1.0));
  }
  return out;
}

double standard_error(const std::vector<double>& values, std::size_t count) {
  if (count < 2 || count > values.size()) throw InvalidArgument("standard_error needs 2 <= count <= size");
  double mean = 0.0;
  for (std::size_t k = 0; k < count; ++k) mean += values[k];
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (std::size_t k = 0; k < count; ++k) var += std::pow(values[k] - mean, 2);
  var /= static_cast<double>(count - 1);
  return std::sqrt(var / static_cast<double>(count));
}

}  // namespace ionxy
