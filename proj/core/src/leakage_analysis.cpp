#include "ionxy/leakage_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ionxy/errors.hpp"

namespace ionxy {

using cd = std::complex<double>;

namespace {

constexpr cd I{0.0, 1.0};

// ∫₀ᵗ e^{ixτ} dτ without cancellation: sin(xt)/x + 2i sin²(xt/2)/x.
cd phase_integral(double x, double t) {
  if (std::abs(x) * t < 1e-6) return {t - x * x * t * t * t / 6.0, x * t * t / 2.0};
  const double s = std::sin(0.5 * x * t);
  return {std::sin(x * t) / x, 2.0 * s * s / x};
}

// B_n(x, t) = ∫₀ᵗ τⁿ e^{ixτ} dτ for n = 0..n_max.
std::vector<cd> moment_integrals(double x, double t, int n_max) {
  std::vector<cd> b(n_max + 1);
  if (std::abs(x) * t < 2.0) {
    for (int n = 0; n <= n_max; ++n) {
      cd sum = 0.0, term = std::pow(t, n + 1);  // (ixt)^k t^{n+1} / k!
      for (int k = 0; k < 60; ++k) {
        const cd add = term / static_cast<double>(n + k + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
        term *= I * x * t / static_cast<double>(k + 1);
      }
      b[n] = sum;
    }
    return b;
  }
  const cd e = std::polar(1.0, x * t);
  b[0] = phase_integral(x, t);
  for (int n = 1; n <= n_max; ++n) b[n] = (std::pow(t, n) * e - static_cast<double>(n) * b[n - 1]) / (I * x);
  return b;
}

}  // namespace

cd dyson_alpha(double omega_eff, double omega_m, int p, int q, double t) {
  if (t < 0.0) throw InvalidArgument("dyson_alpha needs t >= 0");
  return phase_integral(dyson_sign(q) * omega_eff + dyson_sign(p) * omega_m, t);
}

cd dyson_beta(double omega_eff, double omega_l, double omega_m, int r, int s, int p, int q, double t) {
  if (t < 0.0) throw InvalidArgument("dyson_beta needs t >= 0");
  const double phi = dyson_sign(q) * omega_eff + dyson_sign(p) * omega_m;
  const double psi = dyson_sign(s) * omega_eff + dyson_sign(r) * omega_l;
  if (std::abs(phi) * t >= 1e-3) return (phase_integral(phi + psi, t) - phase_integral(psi, t)) / (I * phi);
  // α(τ) = Σ_n (iφ)ⁿ τⁿ⁺¹/(n+1)!, integrated term by term.
  constexpr int terms = 8;
  const std::vector<cd> b = moment_integrals(psi, t, terms + 1);
  cd sum = 0.0, coeff = 1.0;
  for (int n = 0; n <= terms; ++n) {
    coeff = n == 0 ? cd(1.0) : coeff * (I * phi) / static_cast<double>(n + 1);
    sum += coeff * b[n + 1];
  }
  return sum;
}

cd dyson_beta_secular(double omega_eff, double omega_m, double t) {
  const double delta = omega_eff - omega_m;
  // (1 − e^{−iΔt})/Δ² = i/Δ · ∫₀ᵗ e^{−iΔτ} dτ
  return -I * t / delta + I * phase_integral(-delta, t) / delta;
}

double leakage_norm_single(double eta_1c, double rabi, double delta_c, double t) {
  if (delta_c == 0.0) throw InvalidArgument("leakage_norm_single needs a nonzero detuning");
  const double s = std::sin(0.5 * delta_c * t);
  // 1 − cos x = 2 sin²(x/2)
  return rabi * rabi * eta_1c * eta_1c * s * s / (delta_c * delta_c);
}

double leakage_norm_two_modes(const Eigen::MatrixXd& eta, double rabi, double omega_eff, double omega_1,
                              double omega_2, double t) {
  if (eta.cols() != 2) throw InvalidArgument("two-mode leakage needs an N x 2 Lamb-Dicke matrix");
  const double d1 = omega_eff - omega_1, d2 = omega_eff - omega_2;
  if (d1 == 0.0 || d2 == 0.0) throw InvalidArgument("two-mode leakage needs nonzero detunings");
  const double c1 = std::cos(d1 * t), c2 = std::cos(d2 * t), c12 = std::cos((omega_1 - omega_2) * t);
  const double s1 = 2.0 * std::pow(std::sin(0.5 * d1 * t), 2);
  const double s2 = 2.0 * std::pow(std::sin(0.5 * d2 * t), 2);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < eta.rows(); ++k) {
    const double e1 = eta(k, 0), e2 = eta(k, 1);
    sum += e1 * e1 / (d1 * d1) * s1 + e1 * e2 / (d1 * d2) * (1.0 - c1 - c2 + c12) + e2 * e2 / (d2 * d2) * s2;
  }
  return rabi * rabi / (2.0 * static_cast<double>(eta.rows())) * sum;
}

std::vector<double> norm_factor(const std::vector<double>& leakage) {
  std::vector<double> out(leakage.size());
  std::transform(leakage.begin(), leakage.end(), out.begin(), [](double e) { return 1.0 - e; });
  return out;
}

LeakageForm single_mode_form(double eta_1c, double rabi, double omega_eff, double omega_c, int excitations) {
  return [=](double r, double t) {
    const double d = r * omega_eff - omega_c;
    if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
    return excitations * leakage_norm_single(eta_1c, rabi, d, t);
  };
}

LeakageForm two_mode_form(const Eigen::MatrixXd& eta, double rabi, double omega_eff, double omega_1, double omega_2,
                          int excitations) {
  return [=](double r, double t) {
    const double we = r * omega_eff;
    if (!(we > std::max(omega_1, omega_2))) return std::numeric_limits<double>::infinity();
    return excitations * leakage_norm_two_modes(eta, rabi, we, omega_1, omega_2, t);
  };
}

FrequencyFit fit_effective_frequency(const std::vector<double>& times, const std::vector<double>& simulated,
                                     const LeakageForm& form, const FrequencyFitOptions& options) {
  if (times.size() != simulated.size() || times.size() < 3)
    throw InvalidArgument("fit needs matching time and value traces with at least 3 points");
  if (!(options.r_max > options.r_min) || options.grid_points < 2) throw InvalidArgument("bad r search window");

  auto objective = [&](double r) {
    double sum = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double d = form(r, times[k]) - simulated[k];
      sum += d * d;
    }
    return std::isfinite(sum) ? sum : std::numeric_limits<double>::infinity();
  };

  const double step = (options.r_max - options.r_min) / (options.grid_points - 1);
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < options.grid_points; ++k) {
    const double v = objective(options.r_min + k * step);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  if (!std::isfinite(best_value)) throw FitFailure("leakage model is undefined over the whole r window", 1.0);

  double a = options.r_min + std::max(0, best - 1) * step;
  double b = options.r_min + std::min(options.grid_points - 1, best + 1) * step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > options.r_tolerance) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = objective(x2);
    }
  }
  FrequencyFit fit;
  fit.r = 0.5 * (a + b);
  double value = objective(fit.r);
  if (best_value < value) {
    fit.r = options.r_min + best * step;
    value = best_value;
  }
  double power = 0.0;
  for (double v : simulated) power += v * v;
  fit.relative_residual = power > 0.0 ? value / power : (value > 0.0 ? 1.0 : 0.0);
  fit.below_one = fit.r < 1.0;
  if (fit.relative_residual > options.max_relative_residual)
    throw FitFailure("effective-frequency fit residual exceeds the allowed fraction of the trace power",
                     fit.relative_residual);
  return fit;
}

RenormalizationResult renormalized_couplings(const CouplingModel& model, double r,
                                             const std::vector<int>& shifted_modes) {
  const Eigen::Index n_modes = model.mode_freqs.size();
  std::vector<int> modes = model.modes;
  if (modes.empty())
    for (int m = 0; m < n_modes; ++m) modes.push_back(m);

  RenormalizationResult out;
  out.r = r;
  out.below_one = r < 1.0;
  const double averaged = 0.5 * (1.0 + r) * model.omega_eff;
  std::vector<int> shifted, fixed;
  for (int m : modes)
    (std::find(shifted_modes.begin(), shifted_modes.end(), m) != shifted_modes.end() ? shifted : fixed).push_back(m);

  ModeSumOptions opts;
  out.J_prime = Eigen::MatrixXd::Zero(model.J.rows(), model.J.cols());
  if (!shifted.empty()) {
    opts.mode_subset = shifted;
    out.J_prime += coupling_matrix_at(model.rabi, averaged, model.eta, model.mode_freqs, opts);
  }
  if (!fixed.empty()) {
    opts.mode_subset = fixed;
    out.J_prime += coupling_matrix_at(model.rabi, model.omega_eff, model.eta, model.mode_freqs, opts);
  }

  const Eigen::Index n = model.J.rows();
  out.pair_factors = Eigen::MatrixXd::Zero(n, n);
  double sum = 0.0;
  int count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (model.J(i, j) == 0.0) continue;
      const double f = out.J_prime(i, j) / model.J(i, j);
      out.pair_factors(i, j) = out.pair_factors(j, i) = f;
      sum += f;
      ++count;
    }
  }
  out.factor_summary = count ? sum / count : 1.0;
  return out;
}

std::vector<double> higher_subspace_scaling(int excitations, const std::vector<double>& envelope) {
  if (excitations < 1) throw InvalidArgument("excitation count must be >= 1");
  std::vector<double> out(envelope.size());
  std::transform(envelope.begin(), envelope.end(), out.begin(), [&](double e) { return excitations * e; });
  return out;
}

}  // namespace ionxy
