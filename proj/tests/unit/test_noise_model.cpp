#include <doctest.h>

#include <cmath>
#include <limits>

#include "ionxy/errors.hpp"
#include "ionxy/noise_model.hpp"

using namespace ionxy;

namespace {

struct Physical {
  Eigen::MatrixXd walk;
  ProtocolConfig config;
};

/// Optimised α = 0.2 transfer on 12 sites with A = λ_max = 2π·100 Hz.
Physical physical_protocol(int n = 12) {
  Eigen::MatrixXd w = power_law_walk(n, 0.2);
  w /= analytic_gamma(w).lambda_max;
  OptimizedProtocol opt = optimize_protocol(w, seed_protocol(w));
  const double a = 2 * 3.141592653589793 * 100.0;
  Physical p{w * a, opt.config};
  p.config.marker_amplitude = a;
  p.config.duration /= a;
  return p;
}

}  // namespace

TEST_CASE("static field sampling") {
  NoiseConfig cfg;
  cfg.seed = 42;
  CHECK(cfg.sigma() == doctest::Approx(10.0).epsilon(1e-15));
  const Eigen::VectorXd a = sample_static_fields(8, cfg, 3), b = sample_static_fields(8, cfg, 3);
  CHECK((a - b).norm() == 0.0);
  CHECK((sample_static_fields(8, cfg, 4) - a).norm() > 0.0);
  CHECK((sample_static_fields(20, cfg, 3).head(8) - a).norm() == 0.0);
  NoiseConfig other = cfg;
  other.seed = 43;
  CHECK((sample_static_fields(8, other, 3) - a).norm() > 0.0);

  double sum = 0.0, sum2 = 0.0;
  const int samples = 100000;
  for (int k = 0; k < samples; ++k) {
    const double x = sample_static_fields(1, cfg, k)(0);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / samples, var = sum2 / samples - mean * mean;
  CHECK(std::abs(mean) < 5 * cfg.sigma() / std::sqrt(double(samples)));
  CHECK(var == doctest::Approx(100.0).epsilon(0.02));

  NoiseConfig override_var = cfg;
  override_var.field_variance = 4.0;
  CHECK(override_var.sigma() == doctest::Approx(2.0));
  NoiseConfig quiet = cfg;
  quiet.t2 = std::numeric_limits<double>::infinity();
  CHECK(sample_static_fields(8, quiet, 0).norm() == 0.0);

  NoiseConfig bad = cfg;
  bad.t2 = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = cfg;
  bad.n_samples = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("noise ensemble") {
  const Physical p = physical_protocol();
  std::vector<double> times;
  for (int k = 0; k <= 20; ++k) times.push_back(p.config.duration * k / 20);

  SUBCASE("zero variance reproduces the noiseless run") {
    NoiseConfig cfg;
    cfg.n_samples = 1;
    cfg.field_variance = 0.0;
    NoiseEnsemble e = noisy_transfer_ensemble(p.walk, p.config, cfg, times);
    TransferEvaluator ev(p.walk, p.config);
    for (size_t k = 0; k < times.size(); ++k) {
      CHECK(std::abs(e.mean[k] - e.noiseless[k]) < 1e-12);
      CHECK(std::abs(e.noiseless[k] - ev.fidelity(times[k])) < 1e-12);
      CHECK(e.std_dev[k] == 0.0);
    }
    CHECK(e.noiseless_at_duration == doctest::Approx(ev.fidelity(p.config.duration)).epsilon(1e-12));
  }
  SUBCASE("dephasing lowers the mean and is reproducible across threads") {
    NoiseConfig cfg;
    cfg.n_samples = 400;
    cfg.seed = 9;
    cfg.t2 = 1e-3;
    NoiseEnsemble one = noisy_transfer_ensemble(p.walk, p.config, cfg, times, 1);
    NoiseEnsemble four = noisy_transfer_ensemble(p.walk, p.config, cfg, times, 4);
    CHECK(one.mean == four.mean);
    CHECK(one.std_dev == four.std_dev);
    CHECK(one.final_fidelity == four.final_fidelity);
    CHECK(one.mean_at_duration <= one.noiseless_at_duration);
    CHECK(one.std_at_duration > 0.0);
    CHECK(one.final_fidelity.size() == 400);

    // Standard error of the mean falls as 1/sqrt(n).
    const double se100 = standard_error(one.final_fidelity, 100);
    const double se400 = standard_error(one.final_fidelity, 400);
    CHECK(se100 / se400 == doctest::Approx(2.0).epsilon(0.2));
  }
}

TEST_CASE("standard error") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  CHECK(standard_error(v, 4) == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK_THROWS(standard_error(v, 1));
  CHECK_THROWS(standard_error(v, 5));
}
