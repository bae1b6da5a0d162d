#include <cmath>
#include <limits>

#include "ionxy/chain_geometry.hpp"
#include "ionxy/coupling_engine.hpp"
#include "ionxy/errors.hpp"

namespace ionxy {

AxialChoice choose_axial_frequency(const TrapConfig& trap_template, int n_ions,
                                   const AxialScanOptions& options) {
  if (options.points < 1 || !(options.omega_min > 0.0) || options.omega_max < options.omega_min)
    throw InvalidArgument("axial scan grid is empty or inverted");
  if (!(options.safety_factor >= 1.0)) throw InvalidArgument("safety_factor must be >= 1");

  TrapConfig trap = trap_template;
  trap.n_ions = n_ions;
  // β does not depend on the overall coupling scale.
  if (!(trap.delta_k > 0.0)) trap.delta_k = 1.0;
  if (!(trap.rabi_total > 0.0)) trap.rabi_total = 1.0;

  const double w_crit = critical_axial_frequency(trap);
  const double w_top = std::min(trap.omega_x, trap.omega_y);

  ChainSolution reference;
  if (n_ions >= 3) {
    trap.omega_z = 0.5 * w_crit;
    reference = solve_equilibrium(trap);
  }

  AxialChoice best;
  best.beta = std::numeric_limits<double>::quiet_NaN();
  const double ratio =
      options.points > 1 ? std::pow(options.omega_max / options.omega_min, 1.0 / (options.points - 1)) : 1.0;
  double w = options.omega_min;
  for (int k = 0; k < options.points; ++k, w *= ratio) {
    const double wz = k == options.points - 1 ? options.omega_max : w;
    if (!(wz * options.safety_factor < w_crit) || !(wz < w_top)) continue;
    ++best.stable_points;
    if (n_ions < 3) {
      best.omega_z = wz;
      continue;
    }
    trap.omega_z = wz;
    ChainSolution eq = reference;
    eq.length_scale = length_scale(trap);
    const ChainSolution chain = transverse_phonon_modes(trap, eq, TransverseAxis::X);
    trap.detuning_mu = options.detuning_ratio * chain.mode_freqs(0);
    const Eigen::MatrixXd eta = lamb_dicke(trap, chain);
    const Eigen::MatrixXd J = coupling_matrix(trap, eta, chain.mode_freqs);
    const Eigen::VectorXd z = chain.positions_m();
    PowerLawFit fit;
    try {
      fit = fit_alpha_beta(J, options.convention, true, &z);
    } catch (const DegenerateFit&) {
      best.omega_z = wz;  // too few distances for β: keep the largest stable point
      continue;
    }
    if (best.stable_points == 1 || fit.beta < best.beta) {
      best.beta = fit.beta;
      best.omega_z = wz;
    }
  }
  if (best.stable_points == 0)
    throw NoStablePoint("no axial frequency on the scan grid keeps the chain linear");
  return best;
}

}  // namespace ionxy
