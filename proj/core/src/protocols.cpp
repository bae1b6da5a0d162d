#include "ionxy/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "ionxy/constants.hpp"
#include "ionxy/errors.hpp"
#include "ionxy/random.hpp"

namespace ionxy {

ProtocolConfig ProtocolConfig::resolved(int n_sites) const {
  ProtocolConfig c = *this;
  if (c.receiver == -1) c.receiver = n_sites - 1;
  if (c.sender < 0 || c.sender >= n_sites || c.receiver < 0 || c.receiver >= n_sites)
    throw InvalidArgument("sender/receiver out of range");
  if (c.sender == c.receiver) throw InvalidArgument("sender and receiver must differ");
  if (!(c.gamma > 0.0)) throw InvalidArgument("gamma must be positive");
  if (!(c.duration > 0.0)) throw InvalidArgument("duration must be positive");
  return c;
}

Eigen::MatrixXd search_hamiltonian(const Eigen::MatrixXd& walk, double gamma, const std::vector<int>& marked,
                                   double marker_amplitude) {
  if (walk.rows() != walk.cols()) throw InvalidArgument("walk Hamiltonian must be square");
  Eigen::MatrixXd h = gamma * walk;
  std::vector<int> seen;
  for (int s : marked) {
    if (s < 0 || s >= walk.rows()) throw InvalidArgument("marked site out of range");
    if (std::find(seen.begin(), seen.end(), s) != seen.end()) throw InvalidArgument("marked sites must be distinct");
    seen.push_back(s);
    h(s, s) += marker_amplitude;
  }
  return h;
}

GammaChoice analytic_gamma(const Eigen::MatrixXd& walk) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(walk, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  GammaChoice g;
  g.lambda_max = ev(ev.size() - 1);
  if (!(g.lambda_max > 0.0)) throw InvalidArgument("walk Hamiltonian has no positive eigenvalue");
  g.gamma = 1.0 / g.lambda_max;
  if (ev.size() > 1) g.degenerate_spectrum = (g.lambda_max - ev(ev.size() - 2)) < 1e-12 * g.lambda_max;
  return g;
}

double transfer_time(int n, double marker_amplitude) {
  if (n < 2) throw InvalidArgument("transfer_time needs n >= 2");
  return constants::pi * std::sqrt(0.5 * n) / marker_amplitude;
}

double analytic_transfer_fidelity(int n, double t) {
  if (n < 3) throw InvalidArgument("reduced model needs n >= 3");
  const double b = 1.0 / std::sqrt(static_cast<double>(n));
  const double s1 = std::sin(std::sqrt(2.0) * b * t), s2 = std::sin(b * t / std::sqrt(2.0));
  return 0.5 * b * b * s1 * s1 + s2 * s2;
}

Eigen::Matrix3d reduced_search_hamiltonian(int n) {
  if (n < 3) throw InvalidArgument("reduced model needs n >= 3");
  const double b = 1.0 / std::sqrt(static_cast<double>(n));
  const double c = b * std::sqrt(1.0 - 2.0 * b * b);
  Eigen::Matrix3d m;
  m << b * b, b * b, c, b * b, b * b, c, c, c, -2.0 * b * b;
  return m;
}

Eigen::Matrix3cd reduced_propagator(int n, double t) {
  const double b = 1.0 / std::sqrt(static_cast<double>(n));
  const Eigen::Matrix3d h = reduced_search_hamiltonian(n) / (std::sqrt(2.0) * b);
  const double x = std::sqrt(2.0) * b * t;
  const std::complex<double> i{0.0, 1.0};
  return Eigen::Matrix3cd::Identity() - i * std::sin(x) * h.cast<std::complex<double>>() +
         (std::cos(x) - 1.0) * (h * h).cast<std::complex<double>>();
}

double reduced_transfer_fidelity(int n, double t) { return std::norm(reduced_propagator(n, t)(1, 0)); }

TransferEvaluator::TransferEvaluator(const Eigen::MatrixXd& walk, const ProtocolConfig& config) {
  const ProtocolConfig c = config.resolved(static_cast<int>(walk.rows()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      search_hamiltonian(walk, c.gamma, {c.sender, c.receiver}, c.marker_amplitude));
  values_ = es.eigenvalues();
  weights_ = es.eigenvectors().row(c.receiver).transpose().cwiseProduct(es.eigenvectors().row(c.sender).transpose());
}

double TransferEvaluator::fidelity(double t) const {
  double re = 0.0, im = 0.0;
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    re += weights_(k) * std::cos(values_(k) * t);
    im -= weights_(k) * std::sin(values_(k) * t);
  }
  return std::min(1.0, re * re + im * im);
}

namespace {

ProtocolReport make_report(const Eigen::MatrixXd& walk, const ProtocolConfig& c, const TransferOptions& options,
                           const GammaChoice& g) {
  if (options.samples < 2 || !(options.horizon > 0.0)) throw InvalidArgument("bad transfer trace options");
  const TransferEvaluator eval(walk, c);
  ProtocolReport r;
  r.gamma_used = c.gamma;
  r.analytic_gamma = c.marker_amplitude * g.gamma;
  r.lambda_max = g.lambda_max;
  r.duration = c.duration;
  r.scaled_time = c.gamma * g.lambda_max * c.duration;
  r.fidelity_at_duration = eval.fidelity(c.duration);
  const double t_end = options.horizon * c.duration;
  for (int k = 0; k < options.samples; ++k) {
    const double t = t_end * k / (options.samples - 1);
    const double f = eval.fidelity(t);
    r.times.push_back(t);
    r.fidelity_trace.push_back(f);
    if (f > r.fidelity_peak) {
      r.fidelity_peak = f;
      r.t_peak = t;
    }
  }
  return r;
}

}  // namespace

ProtocolReport run_transfer(const Eigen::MatrixXd& walk, const ProtocolConfig& config, const TransferOptions& options) {
  const ProtocolConfig c = config.resolved(static_cast<int>(walk.rows()));
  GammaChoice g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(walk, Eigen::EigenvaluesOnly);
  g.lambda_max = es.eigenvalues()(es.eigenvalues().size() - 1);
  // A walk without a positive eigenvalue (e.g. J = 0) has no analytic γ.
  g.gamma = g.lambda_max > 0.0 ? 1.0 / g.lambda_max : std::numeric_limits<double>::quiet_NaN();
  return make_report(walk, c, options, g);
}

std::vector<double> run_search(const Eigen::MatrixXd& walk, double gamma, int marked, const std::vector<double>& times,
                               double marker_amplitude) {
  const Eigen::Index n = walk.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(search_hamiltonian(walk, gamma, {marked}, marker_amplitude));
  const Eigen::VectorXd s = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  const Eigen::VectorXd c = es.eigenvectors().transpose() * s;
  const Eigen::VectorXd w = es.eigenvectors().row(marked).transpose().cwiseProduct(c);
  std::vector<double> out;
  for (double t : times) {
    double re = 0.0, im = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      re += w(k) * std::cos(es.eigenvalues()(k) * t);
      im -= w(k) * std::sin(es.eigenvalues()(k) * t);
    }
    out.push_back(std::min(1.0, re * re + im * im));
  }
  return out;
}

ProtocolConfig seed_protocol(const Eigen::MatrixXd& walk, int sender, int receiver, double marker_amplitude) {
  ProtocolConfig c;
  c.sender = sender;
  c.receiver = receiver;
  c.marker_amplitude = marker_amplitude;
  c.gamma = marker_amplitude * analytic_gamma(walk).gamma;
  c.duration = transfer_time(static_cast<int>(walk.rows()), marker_amplitude);
  return c.resolved(static_cast<int>(walk.rows()));
}

OptimizedProtocol optimize_protocol(const Eigen::MatrixXd& walk, const ProtocolConfig& seed,
                                    const OptimizerOptions& options, const TransferOptions& trace) {
  const ProtocolConfig s = seed.resolved(static_cast<int>(walk.rows()));
  const double g_lo = s.gamma * (1.0 - options.box), g_hi = s.gamma * (1.0 + options.box);
  const double t_lo = s.duration * (1.0 - options.box), t_hi = s.duration * (1.0 + options.box);

  // One diagonalisation per distinct γ; F(T) is then cheap.
  std::map<double, TransferEvaluator> cache;
  int evaluations = 0;
  auto objective = [&](double g, double t) {
    ++evaluations;
    auto it = cache.find(g);
    if (it == cache.end()) {
      ProtocolConfig c = s;
      c.gamma = g;
      it = cache.emplace(g, TransferEvaluator(walk, c)).first;
    }
    return it->second.fidelity(t);
  };

  double best_g = s.gamma, best_t = s.duration;
  double best_f = objective(best_g, best_t);
  const double seed_f = best_f;

  // Latin hypercube over the box: one sample per stratum in each coordinate.
  const CounterStream rng(options.seed, 0x4c4853);
  std::uint64_t draw = 0;
  const int m = std::max(0, std::min(options.latin_samples, options.max_evaluations - 1));
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  for (int k = m - 1; k > 0; --k) std::swap(perm[k], perm[rng.bits(draw++) % (k + 1)]);
  for (int k = 0; k < m; ++k) {
    const double g = g_lo + (g_hi - g_lo) * (k + rng.uniform(draw++)) / m;
    const double t = t_lo + (t_hi - t_lo) * (perm[k] + rng.uniform(draw++)) / m;
    const double f = objective(g, t);
    if (f > best_f) {
      best_f = f;
      best_g = g;
      best_t = t;
    }
  }

  // Compass search, halving the step after an unsuccessful poll.
  double step_g = 0.25 * (g_hi - g_lo) / std::max(1, m), step_t = 0.25 * (t_hi - t_lo) / std::max(1, m);
  step_g = std::max(step_g, 1e-3 * s.gamma);
  step_t = std::max(step_t, 1e-3 * s.duration);
  while (evaluations + 4 <= options.max_evaluations && step_g > options.min_step * s.gamma &&
         step_t > options.min_step * s.duration) {
    bool moved = false;
    const double cand[4][2] = {{best_g + step_g, best_t}, {best_g - step_g, best_t},
                               {best_g, best_t + step_t}, {best_g, best_t - step_t}};
    for (const auto& c : cand) {
      const double g = std::clamp(c[0], g_lo, g_hi), t = std::clamp(c[1], t_lo, t_hi);
      if (g == best_g && t == best_t) continue;
      const double f = objective(g, t);
      if (f > best_f) {
        best_f = f;
        best_g = g;
        best_t = t;
        moved = true;
        break;
      }
    }
    if (!moved) {
      step_g *= 0.5;
      step_t *= 0.5;
    }
  }

  OptimizedProtocol out;
  out.seed_config = s;
  out.seed_fidelity = seed_f;
  out.config = s;
  out.config.gamma = best_g;
  out.config.duration = best_t;
  out.fidelity = best_f;
  out.evaluations = evaluations;
  out.report = run_transfer(walk, out.config, trace);
  return out;
}

Eigen::MatrixXd power_law_walk(int n, double alpha) {
  if (n < 2) throw InvalidArgument("walk needs at least 2 sites");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) h(i, j) = std::pow(std::abs(i - j), -alpha);
  return h;
}

}  // namespace ionxy
