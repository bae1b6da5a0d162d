#include "ionxy/coupling_engine.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <string>

#include "ionxy/errors.hpp"

namespace ionxy {

std::string_view to_string(FitConvention convention) {
  switch (convention) {
    case FitConvention::EndIonChainIndex: return "end-ion";
    case FitConvention::AllPairsChainIndex: return "all-pairs";
    case FitConvention::EndIonAxial: return "end-ion-axial";
    case FitConvention::CentreIonChainIndex: return "centre-ion";
  }
  return "end-ion";
}

FitConvention fit_convention_from_string(std::string_view name) {
  for (auto c : {FitConvention::EndIonChainIndex, FitConvention::AllPairsChainIndex,
                 FitConvention::EndIonAxial, FitConvention::CentreIonChainIndex})
    if (to_string(c) == name) return c;
  throw InvalidArgument("unknown fit convention '" + std::string(name) +
                        "' (expected end-ion, all-pairs, end-ion-axial or centre-ion)");
}

double effective_frequency(const TrapConfig& trap) {
  return std::hypot(trap.rabi_per_ion(), trap.detuning_mu);
}

Eigen::MatrixXd lamb_dicke(const TrapConfig& trap, const ChainSolution& chain) {
  if (!chain.has_modes()) throw InvalidArgument("lamb_dicke needs a chain with phonon modes");
  const Eigen::Index n = chain.mode_matrix.rows();
  Eigen::MatrixXd eta(n, chain.mode_freqs.size());
  for (Eigen::Index m = 0; m < chain.mode_freqs.size(); ++m) {
    const double zpf = std::sqrt(constants::hbar / (2.0 * trap.ion_mass * chain.mode_freqs(m)));
    eta.col(m) = trap.delta_k * zpf * chain.mode_matrix.col(m);
  }
  return eta;
}

namespace {

std::vector<int> selected_modes(const ModeSumOptions& options, Eigen::Index n_modes) {
  std::vector<int> modes = options.mode_subset;
  if (modes.empty()) {
    for (int m = 0; m < n_modes; ++m) modes.push_back(m);
    return modes;
  }
  std::set<int> seen;
  for (int m : modes) {
    if (m < 0 || m >= n_modes) throw InvalidArgument("mode index out of range");
    if (!seen.insert(m).second) throw InvalidArgument("duplicate mode index in subset");
  }
  return modes;
}

void guard_resonance(double omega_eff, double omega_m, double rel, int m) {
  if (std::abs(omega_eff - omega_m) < rel * omega_m) {
    std::ostringstream msg;
    msg << "effective frequency " << omega_eff << " rad/s is resonant with mode " << m << " ("
        << omega_m << " rad/s)";
    throw ResonantDetuning(msg.str(), m);
  }
}

}  // namespace

Eigen::MatrixXd coupling_matrix_at(double rabi, double omega_eff, const Eigen::MatrixXd& eta,
                                   const Eigen::VectorXd& mode_freqs, const ModeSumOptions& options) {
  const Eigen::Index n = eta.rows();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int m : selected_modes(options, mode_freqs.size())) {
    const double wm = mode_freqs(m);
    guard_resonance(omega_eff, wm, options.resonance_rel, m);
    const double k = rabi * rabi * wm / (8.0 * (omega_eff * omega_eff - wm * wm));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) J(i, j) += k * eta(i, m) * eta(j, m);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) J(j, i) = J(i, j);
  return J;
}

Eigen::MatrixXd coupling_matrix(const TrapConfig& trap, const Eigen::MatrixXd& eta,
                                const Eigen::VectorXd& mode_freqs, const ModeSumOptions& options) {
  return coupling_matrix_at(trap.rabi_per_ion(), effective_frequency(trap), eta, mode_freqs, options);
}

Eigen::VectorXd local_fields(const TrapConfig& trap, const Eigen::MatrixXd& eta,
                             const Eigen::VectorXd& mode_freqs, int n_init,
                             const ModeSumOptions& options) {
  if (n_init < 0) throw InvalidArgument("n_init must be non-negative");
  const double rabi = trap.rabi_per_ion();
  const double we = effective_frequency(trap);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(eta.rows());
  for (int m : selected_modes(options, mode_freqs.size())) {
    const double wm = mode_freqs(m);
    guard_resonance(we, wm, options.resonance_rel, m);
    const double k = rabi * rabi * we * (2.0 * n_init + 1.0) / (4.0 * (we * we - wm * wm));
    h += k * eta.col(m).cwiseAbs2();
  }
  return h;
}

std::vector<PairCoupling> pair_couplings(const Eigen::MatrixXd& J, FitConvention convention,
                                         const Eigen::VectorXd* axial_positions_m) {
  const int n = static_cast<int>(J.rows());
  std::vector<PairCoupling> rows;
  switch (convention) {
    case FitConvention::EndIonChainIndex:
      for (int j = 1; j < n; ++j) rows.push_back({static_cast<double>(j), 0, j, J(0, j)});
      break;
    case FitConvention::AllPairsChainIndex:
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) rows.push_back({static_cast<double>(j - i), i, j, J(i, j)});
      break;
    case FitConvention::EndIonAxial:
      if (axial_positions_m == nullptr || axial_positions_m->size() != n)
        throw InvalidArgument("axial fit convention needs the chain positions");
      for (int j = 1; j < n; ++j)
        rows.push_back({std::abs((*axial_positions_m)(j) - (*axial_positions_m)(0)), 0, j, J(0, j)});
      break;
    case FitConvention::CentreIonChainIndex: {
      const int c = (n - 1) / 2;
      for (int j = 0; j < n; ++j)
        if (j != c) rows.push_back({static_cast<double>(std::abs(j - c)), c, j, J(c, j)});
      break;
    }
  }
  return rows;
}

PowerLawFit fit_alpha_beta(const Eigen::MatrixXd& J, FitConvention convention, bool fit_beta,
                           const Eigen::VectorXd* axial_positions_m) {
  if (J.rows() != J.cols()) throw InvalidArgument("coupling matrix must be square");
  const std::vector<PairCoupling> rows = pair_couplings(J, convention, axial_positions_m);
  std::set<double> distinct;
  for (const auto& r : rows) distinct.insert(r.distance);
  const std::size_t needed = fit_beta ? 3 : 2;
  if (distinct.size() < needed) {
    std::ostringstream msg;
    msg << "power-law fit needs at least " << needed << " distinct distances, got " << distinct.size();
    throw DegenerateFit(msg.str());
  }

  const int cols = fit_beta ? 3 : 2;
  Eigen::MatrixXd a(rows.size(), cols);
  Eigen::VectorXd y(rows.size());
  PowerLawFit fit;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const double v = rows[k].coupling;
    if (v == 0.0) throw DegenerateFit("zero coupling on a fitted pair");
    if (v < 0.0) ++fit.negative_entries;
    y(k) = std::log(std::abs(v));
    a(k, 0) = 1.0;
    a(k, 1) = -std::log(rows[k].distance);
    if (fit_beta) a(k, 2) = -rows[k].distance;
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  fit.log_amplitude = c(0);
  fit.alpha = c(1);
  fit.beta = fit_beta ? c(2) : 0.0;
  fit.points = static_cast<int>(rows.size());
  fit.residual = std::sqrt((a * c - y).squaredNorm() / static_cast<double>(rows.size()));
  return fit;
}

double min_detuning(const TrapConfig& trap, const ChainSolution& chain) {
  if (!chain.has_modes()) throw InvalidArgument("min_detuning needs a chain with phonon modes");
  const double rabi = trap.rabi_per_ion();
  const double eta_com = std::abs(lamb_dicke(trap, chain)(0, 0));
  const double we_min = 3.0 * rabi * eta_com + chain.mode_freqs(0);
  return std::sqrt(std::max(0.0, we_min * we_min - rabi * rabi));
}

namespace {

double pure_alpha(TrapConfig trap, const ChainSolution& chain, const Eigen::MatrixXd& eta, double mu,
                  FitConvention convention) {
  trap.detuning_mu = mu;
  const Eigen::VectorXd z = chain.positions_m();
  return fit_alpha_beta(coupling_matrix(trap, eta, chain.mode_freqs), convention, false, &z).alpha;
}

}  // namespace

DetuningChoice detuning_for_alpha(const TrapConfig& trap, const ChainSolution& chain,
                                  double alpha_target, const DetuningSearchOptions& options) {
  if (!(alpha_target > 0.0)) throw InvalidArgument("alpha_target must be positive");
  const Eigen::MatrixXd eta = lamb_dicke(trap, chain);
  const double rabi = trap.rabi_per_ion();
  const double w_com = chain.mode_freqs(0);

  DetuningChoice out;
  out.mu_min = min_detuning(trap, chain);
  const double mu_max = std::max(out.mu_min, options.mu_max_ratio * w_com);
  auto mu_of = [&](double x) {
    const double we = w_com + std::exp(x);
    return std::sqrt(std::max(0.0, we * we - rabi * rabi));
  };
  auto x_of = [&](double mu) { return std::log(std::hypot(rabi, mu) - w_com); };
  auto alpha_at = [&](double mu) { return pure_alpha(trap, chain, eta, mu, options.convention); };

  const double a_lo = alpha_at(out.mu_min);
  if (a_lo >= alpha_target - options.alpha_tolerance) {
    out.mu = out.mu_min;
    out.achieved_alpha = a_lo;
    out.target_unreachable = a_lo > alpha_target + options.alpha_tolerance;
    return out;
  }
  const double a_hi = alpha_at(mu_max);
  if (a_hi <= alpha_target + options.alpha_tolerance) {
    out.mu = mu_max;
    out.achieved_alpha = a_hi;
    out.target_unreachable = a_hi < alpha_target - options.alpha_tolerance;
    return out;
  }

  double lo = x_of(out.mu_min), hi = x_of(mu_max);
  double mu = out.mu_min, a = a_lo;
  for (int it = 0; it < options.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    mu = mu_of(mid);
    a = alpha_at(mu);
    if (std::abs(a - alpha_target) <= options.alpha_tolerance || hi - lo < 1e-14) break;
    (a < alpha_target ? lo : hi) = mid;
  }
  out.mu = mu;
  out.achieved_alpha = a;
  return out;
}

CouplingModel build_coupling_model(const TrapConfig& trap, const ChainSolution& chain,
                                   const CouplingOptions& options) {
  CouplingModel model;
  model.eta = lamb_dicke(trap, chain);
  model.mode_freqs = chain.mode_freqs;
  model.rabi = trap.rabi_per_ion();
  model.omega_eff = effective_frequency(trap);
  model.J = coupling_matrix(trap, model.eta, chain.mode_freqs, options.mode_sum);
  model.h = local_fields(trap, model.eta, chain.mode_freqs, options.n_init, options.mode_sum);
  model.fit_convention = options.convention;
  model.n_init = options.n_init;
  model.modes = options.mode_sum.mode_subset;
  for (Eigen::Index i = 0; i < model.J.rows(); ++i)
    for (Eigen::Index j = i + 1; j < model.J.cols(); ++j)
      if (model.J(i, j) < 0.0) ++model.negative_pairs;

  const Eigen::VectorXd z = chain.positions_m();
  try {
    model.alpha_fit = fit_alpha_beta(model.J, options.convention, false, &z).alpha;
    model.beta_fit = fit_alpha_beta(model.J, options.convention, true, &z).beta;
  } catch (const DegenerateFit&) {
    // Too few distinct distances: leave the fit parameters at zero.
  }
  return model;
}

}  // namespace ionxy
