#include "ionxy/experiment.hpp"

#include <cmath>

#include "ionxy/errors.hpp"

namespace ionxy {

TrapConfig default_trap(int n_ions) {
  TrapConfig t;
  t.n_ions = n_ions;
  t.ion_mass = 171.0 * constants::atomic_mass_unit;
  t.omega_x = constants::two_pi * 6e6;
  t.omega_y = constants::two_pi * 5e6;
  t.delta_k = 2.0 * constants::two_pi / 355e-9;
  t.rabi_total = constants::two_pi * 1e6;
  return t;
}

ChainSetup setup_chain(const SetupOptions& options) {
  ChainSetup s;
  s.trap = options.trap;
  if (!(s.trap.omega_z > 0.0)) {
    s.axial = choose_axial_frequency(s.trap, s.trap.n_ions, options.axial);
    s.axial_scanned = true;
    s.trap.omega_z = s.axial.omega_z;
  }
  s.chain = solve_chain(s.trap);
  if (!(s.trap.detuning_mu > 0.0)) {
    s.detuning = detuning_for_alpha(s.trap, s.chain, options.alpha_target, options.detuning);
    s.detuning_searched = true;
    s.trap.detuning_mu = s.detuning.mu;
  }
  return s;
}

LeakageExperiment run_leakage_experiment(const ChainSetup& setup, const LeakageOptions& options) {
  if (options.n_modes != 1 && options.n_modes != 2) throw InvalidArgument("leakage supports one or two modes");
  if (options.samples < 3 || !(options.periods > 0.0)) throw InvalidArgument("bad leakage time grid");
  LeakageExperiment out;
  const TrapConfig& trap = setup.trap;
  out.modes = significant_modes(trap, setup.chain, options.n_modes);

  CouplingOptions copts;
  copts.mode_sum.mode_subset = out.modes;
  out.model = build_coupling_model(trap, setup.chain, copts);

  TruncationPolicy policy;
  policy.modes = out.modes;
  policy.fock_cutoff = options.fock_cutoff;
  policy.excitations = options.excitations;
  policy.quanta_window = options.quanta_window;
  const SpinPhononModel sim = make_spin_phonon_model(trap, setup.chain, policy);
  out.basis_dimension = sim.basis.dimension();

  const double we = out.model.omega_eff;
  const double w1 = setup.chain.mode_freqs(out.modes[0]);
  out.delta_c = we - w1;
  out.eta_1c = out.model.eta(0, out.modes[0]);
  const double t_end = options.periods * constants::two_pi / out.delta_c;
  for (int k = 0; k < options.samples; ++k) out.times.push_back(t_end * k / (options.samples - 1));

  PropagationOptions popts;
  popts.method = options.method;
  propagate(
      sim, default_initial_state(sim.basis, options.excitations), out.times,
      [&](double, const Eigen::VectorXcd& psi) {
        out.leakage.push_back(vacuum_overlap(sim.basis, psi));
        out.occupation.push_back(phonon_occupation(sim.basis, psi));
      },
      popts);

  LeakageForm form;
  if (options.n_modes == 1) {
    form = single_mode_form(out.eta_1c, out.model.rabi, we, w1, options.excitations);
  } else {
    Eigen::MatrixXd eta2(trap.n_ions, 2);
    eta2.col(0) = out.model.eta.col(out.modes[0]);
    eta2.col(1) = out.model.eta.col(out.modes[1]);
    form = two_mode_form(eta2, out.model.rabi, we, w1, setup.chain.mode_freqs(out.modes[1]), options.excitations);
  }
  for (double t : out.times) out.analytic.push_back(form(1.0, t));

  if (options.fit) {
    const std::vector<double>& observed = options.excitations == 1 ? out.leakage : out.occupation;
    out.fit = fit_effective_frequency(out.times, observed, form, options.fit_options);
    for (double t : out.times) out.shifted.push_back(form(out.fit.r, t));
    out.renormalization = renormalized_couplings(out.model, out.fit.r, {out.modes[0]});
  }
  return out;
}

StroboscopicFidelity stroboscopic_fidelity(const ChainSetup& setup, const LeakageExperiment& leakage,
                                           const Eigen::MatrixXd& couplings, double delta, double t_max,
                                           int fock_cutoff, int quanta_window) {
  if (!(delta > 0.0)) throw InvalidArgument("stroboscopic spacing needs a positive detuning");
  StroboscopicFidelity out;
  const double period = constants::two_pi / delta;
  for (int k = 1; k * period <= t_max; ++k) out.times.push_back(k * period);

  TruncationPolicy policy;
  policy.modes = leakage.modes;
  policy.fock_cutoff = fock_cutoff;
  policy.excitations = 1;
  policy.quanta_window = quanta_window;
  const SpinPhononModel sim = make_spin_phonon_model(setup.trap, setup.chain, policy);

  const XYSector sector = build_sector(xy_pair_couplings(couplings), leakage.model.h, 1);
  const SpectralPropagator xy(sector.to_dense());
  const StateVector start = site_state(sector, 0);
  const Eigen::VectorXcd c = xy.coefficients(start.amplitudes);

  PropagationOptions popts;
  popts.method = PropagationMethod::Exact;
  propagate(
      sim, default_initial_state(sim.basis, 1), out.times,
      [&](double t, const Eigen::VectorXcd& psi) {
        const double f = model_fidelity(sim.basis, psi, sector, xy.evolve_coefficients(c, t));
        out.fidelity.push_back(f);
        out.min_fidelity = std::min(out.min_fidelity, f);
      },
      popts);
  return out;
}

namespace {

Eigen::MatrixXd normalised(const Eigen::MatrixXd& walk) { return walk / analytic_gamma(walk).lambda_max; }

}  // namespace

TransferPoint run_transfer_point(int n, const TransferSweepOptions& options) {
  TransferPoint p;
  p.n = n;
  p.alpha_target = options.alpha;
  const Eigen::MatrixXd ideal = normalised(power_law_walk(n, options.alpha));
  p.ideal = optimize_protocol(ideal, seed_protocol(ideal), options.optimizer, options.trace);
  if (!options.experimental) return p;

  SetupOptions so;
  so.trap = options.trap;
  so.trap.n_ions = n;
  so.alpha_target = options.alpha;
  so.axial = options.axial;
  so.detuning = options.detuning;
  const ChainSetup setup = setup_chain(so);
  p.omega_z = setup.trap.omega_z;
  p.mu = setup.trap.detuning_mu;
  p.alpha_achieved = setup.detuning.achieved_alpha;
  p.alpha_clamped = setup.detuning.target_unreachable;
  const CouplingModel model = build_coupling_model(setup.trap, setup.chain);
  p.walk_physical = single_excitation_hopping(model.J);
  p.lambda_max_physical = analytic_gamma(p.walk_physical).lambda_max;
  const Eigen::MatrixXd walk = p.walk_physical / p.lambda_max_physical;
  p.experimental = optimize_protocol(walk, seed_protocol(walk), options.optimizer, options.trace);
  return p;
}

NoisePoint run_noise_point(const TransferPoint& point, const NoiseConfig& noise, int threads) {
  if (point.walk_physical.size() == 0) throw InvalidArgument("noise run needs experimental couplings");
  NoisePoint out;
  out.n = point.n;
  out.alpha_target = point.alpha_target;
  const double lam = point.lambda_max_physical;
  out.physical = point.experimental.config;
  out.physical.marker_amplitude = lam;
  out.physical.duration = point.experimental.config.duration / lam;
  out.ensemble = noisy_transfer_ensemble(point.walk_physical, out.physical, noise, {out.physical.duration}, threads);
  out.noiseless = out.ensemble.noiseless_at_duration;
  out.mean = out.ensemble.mean_at_duration;
  out.std_dev = out.ensemble.std_at_duration;
  return out;
}

}  // namespace ionxy
