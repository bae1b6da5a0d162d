#include <cmath>
#include <limits>
#include <sstream>

#include "ionxy/errors.hpp"
#include "ionxy/experiment.hpp"
#include "ionxy_cli/cli.hpp"

namespace ionxy::cli {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> with_trap_keys(std::initializer_list<const char*> extra) {
  std::vector<std::string> keys = trap_keys();
  for (const char* k : extra) keys.emplace_back(k);
  return keys;
}

std::string format_alpha(double a) {
  std::ostringstream s;
  s << a;
  return s.str();
}

std::vector<int> chain_sizes(const Config& c) {
  std::vector<int> ns = c.get_ints("n_list", {c.get_int("n_ions", 10)});
  if (ns.empty()) throw ConfigError("n_list is empty");
  for (int n : ns) {
    if (n < 2) throw ConfigError("n_list entries must be at least 2");
  }
  return ns;
}

std::vector<double> alpha_targets(const Config& c) {
  std::vector<double> as = c.get_doubles("alpha_list", {c.get_double("alpha_target", 0.2)});
  if (as.empty()) throw ConfigError("alpha_list is empty");
  return as;
}

ChainSetup chain_only(const SetupOptions& so) {
  ChainSetup s;
  s.trap = so.trap;
  if (!(s.trap.omega_z > 0.0)) {
    s.axial = choose_axial_frequency(s.trap, s.trap.n_ions, so.axial);
    s.axial_scanned = true;
    s.trap.omega_z = s.axial.omega_z;
  }
  s.chain = solve_chain(s.trap);
  return s;
}

OptimizerOptions optimizer_from(const Config& c) {
  OptimizerOptions o;
  o.max_evaluations = c.get_int("max_evaluations", o.max_evaluations);
  o.latin_samples = c.get_int("latin_samples", o.latin_samples);
  o.box = c.get_double("optimizer_box", o.box);
  o.seed = c.get_u64("optimizer_seed", o.seed);
  return o;
}

TransferOptions trace_from(const Config& c) {
  TransferOptions t;
  t.samples = c.get_int("trace_samples", t.samples);
  t.horizon = c.get_double("horizon", t.horizon);
  return t;
}

TransferSweepOptions sweep_from(const Config& c, double alpha) {
  const SetupOptions so = setup_from_config(c);
  TransferSweepOptions o;
  o.trap = so.trap;
  o.alpha = alpha;
  o.experimental = c.get_bool("experimental", true);
  o.optimizer = optimizer_from(c);
  o.trace = trace_from(c);
  o.axial = so.axial;
  o.detuning = so.detuning;
  return o;
}

/// Slope of ln y against ln x by least squares; NaN with fewer than two points.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return nan;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void cmd_chain(const Context& ctx) {
  const SetupOptions so = setup_from_config(ctx.config);
  const ChainSetup s = chain_only(so);
  const int n = s.trap.n_ions;
  const Eigen::VectorXd z = s.chain.positions_m();

  Table positions({"ion", "u", "z_m"});
  for (int i = 0; i < n; ++i) positions.add({double(i), s.chain.positions(i), z(i)});
  ctx.emit("positions", positions);

  std::vector<std::string> cols = {"mode", "omega"};
  for (int i = 0; i < n; ++i) cols.push_back("b" + std::to_string(i));
  Table modes(cols);
  for (int m = 0; m < n; ++m) {
    std::vector<double> row = {double(m), s.chain.mode_freqs(m)};
    for (int i = 0; i < n; ++i) row.push_back(s.chain.mode_matrix(i, m));
    modes.add(row);
  }
  ctx.emit("modes", modes);

  const StabilityReport st = is_linear_stable(s.trap);
  ctx.emit_report("chain",
                  {{"n_ions", n},
                   {"omega_z", s.trap.omega_z},
                   {"omega_x", s.trap.omega_x},
                   {"omega_y", s.trap.omega_y},
                   {"length_scale", s.chain.length_scale},
                   {"critical_omega_z", critical_axial_frequency(s.trap)},
                   {"stability_margin", st.margin},
                   {"omega_com", s.chain.mode_freqs(0)}},
                  {{"positions", std::vector<double>(s.chain.positions.data(), s.chain.positions.data() + n)},
                   {"positions_m", std::vector<double>(z.data(), z.data() + n)},
                   {"mode_freqs", std::vector<double>(s.chain.mode_freqs.data(), s.chain.mode_freqs.data() + n)}});
}

void cmd_couplings(const Context& ctx) {
  const SetupOptions so = setup_from_config(ctx.config);
  const ChainSetup s = setup_chain(so);
  CouplingOptions co;
  co.mode_sum.mode_subset = ctx.config.get_ints("modes", {});
  co.n_init = ctx.config.get_int("n_init", 0);
  co.convention = so.detuning.convention;
  const CouplingModel model = build_coupling_model(s.trap, s.chain, co);
  const Eigen::VectorXd z = s.chain.positions_m();

  Table pairs({"i", "j", "distance", "J"});
  for (const auto& p : pair_couplings(model.J, co.convention, &z)) pairs.add({double(p.i), double(p.j), p.distance, p.coupling});
  ctx.emit("couplings", pairs);

  Table fields({"ion", "h"});
  for (int i = 0; i < s.trap.n_ions; ++i) fields.add({double(i), model.h(i)});
  ctx.emit("fields", fields);

  ctx.emit_report("couplings_summary", {{"n_ions", s.trap.n_ions},
                                        {"omega_z", s.trap.omega_z},
                                        {"mu", s.trap.detuning_mu},
                                        {"mu_min", min_detuning(s.trap, s.chain)},
                                        {"omega_eff", model.omega_eff},
                                        {"omega_com", s.chain.mode_freqs(0)},
                                        {"rabi", model.rabi},
                                        {"alpha", model.alpha_fit},
                                        {"beta", model.beta_fit},
                                        {"negative_pairs", model.negative_pairs}});
}

void cmd_alpha_scan(const Context& ctx) {
  const Config& c = ctx.config;
  const std::vector<int> ns = chain_sizes(c);
  const int points = c.get_int("mu_points", 41);
  const double dmin = c.get_double("delta_min_ratio", 1e-5);
  const double dmax = c.get_double("delta_max_ratio", 1e-1);
  if (points < 1 || !(dmin > 0.0) || dmax < dmin) throw ConfigError("mu grid needs mu_points >= 1 and 0 < delta_min_ratio <= delta_max_ratio");
  const SetupOptions base = setup_from_config(c);

  Table scan({"N", "mu", "mu_over_com", "alpha", "beta", "mu_min", "above_mu_min"});
  Table targets({"N", "alpha_target", "mu", "mu_min", "achieved_alpha", "clamped"});
  const bool want_targets = c.has("alpha_list");
  for (int n : ns) {
    SetupOptions so = base;
    so.trap.n_ions = n;
    const ChainSetup s = chain_only(so);
    const double wc = s.chain.mode_freqs(0);
    const double mu_min = min_detuning(s.trap, s.chain);
    const Eigen::VectorXd z = s.chain.positions_m();
    const Eigen::MatrixXd eta = lamb_dicke(s.trap, s.chain);
    for (int k = 0; k < points; ++k) {
      const double d = points == 1 ? dmin : dmin * std::pow(dmax / dmin, double(k) / (points - 1));
      TrapConfig t = s.trap;
      t.detuning_mu = wc * (1.0 + d);
      const Eigen::MatrixXd J = coupling_matrix(t, eta, s.chain.mode_freqs);
      double alpha = nan, beta = nan;
      try {
        alpha = fit_alpha_beta(J, so.detuning.convention, false, &z).alpha;
        beta = fit_alpha_beta(J, so.detuning.convention, true, &z).beta;
      } catch (const DegenerateFit&) {
      }
      scan.add({double(n), t.detuning_mu, 1.0 + d, alpha, beta, mu_min, t.detuning_mu >= mu_min ? 1.0 : 0.0});
    }
    if (want_targets) {
      for (double a : alpha_targets(c)) {
        const DetuningChoice d = detuning_for_alpha(s.trap, s.chain, a, so.detuning);
        targets.add({double(n), a, d.mu, d.mu_min, d.achieved_alpha, d.target_unreachable ? 1.0 : 0.0});
      }
    }
    ctx.note("N = " + std::to_string(n) + " done");
  }
  ctx.emit("alpha_scan", scan);
  if (want_targets) ctx.emit("alpha_targets", targets);
}

void cmd_leakage(const Context& ctx) {
  const Config& c = ctx.config;
  const ChainSetup s = setup_chain(setup_from_config(c));
  LeakageOptions lo;
  lo.excitations = c.get_int("excitations", lo.excitations);
  lo.n_modes = c.get_int("modes", lo.n_modes);
  lo.fock_cutoff = c.get_int("fock_cutoff", lo.fock_cutoff);
  lo.quanta_window = c.get_int("quanta_window", lo.quanta_window);
  lo.periods = c.get_double("periods", lo.periods);
  lo.samples = c.get_int("samples", lo.samples);
  lo.fit = c.get_bool("fit", lo.fit);
  lo.fit_options.r_min = c.get_double("r_min", lo.fit_options.r_min);
  lo.fit_options.r_max = c.get_double("r_max", lo.fit_options.r_max);
  lo.fit_options.grid_points = c.get_int("r_grid", lo.fit_options.grid_points);
  const std::string method = c.get_string("method", "exact");
  if (method == "exact") {
    lo.method = PropagationMethod::Exact;
  } else if (method == "adaptive") {
    lo.method = PropagationMethod::Adaptive;
  } else {
    throw ConfigError("method must be 'exact' or 'adaptive'");
  }
  ctx.note("basis setup, " + std::to_string(lo.samples) + " samples");
  const LeakageExperiment L = run_leakage_experiment(s, lo);

  Table trace({"t", "E_sim", "E_norm", "E_norm_shifted", "nbar"});
  for (std::size_t k = 0; k < L.times.size(); ++k) {
    trace.add({L.times[k], L.leakage[k], L.analytic[k], lo.fit ? L.shifted[k] : nan, L.occupation[k]});
  }
  ctx.emit("leakage", trace);

  Scalars summary = {{"n_ions", s.trap.n_ions},
                     {"excitations", lo.excitations},
                     {"modes", lo.n_modes},
                     {"second_mode", lo.n_modes == 2 ? double(L.modes[1]) : nan},
                     {"basis_dimension", L.basis_dimension},
                     {"omega_z", s.trap.omega_z},
                     {"mu", s.trap.detuning_mu},
                     {"alpha", s.detuning_searched ? s.detuning.achieved_alpha : L.model.alpha_fit},
                     {"omega_eff", L.model.omega_eff},
                     {"omega_com", s.chain.mode_freqs(L.modes[0])},
                     {"delta_c", L.delta_c},
                     {"eta_1c", L.eta_1c},
                     {"r", lo.fit ? L.fit.r : nan},
                     {"r_minus_1", lo.fit ? L.fit.r - 1.0 : nan},
                     {"fit_relative_residual", lo.fit ? L.fit.relative_residual : nan},
                     {"J_ratio_mean", lo.fit ? L.renormalization.factor_summary : nan}};

  const double window = c.get_double("fidelity_window_ms", 0.0) * 1e-3;
  if (window > 0.0) {
    if (!lo.fit) throw ConfigError("fidelity_window_ms needs fit = true");
    if (lo.excitations != 1) throw ConfigError("stroboscopic fidelity is defined for one excitation");
    const double dprime = L.fit.r * L.model.omega_eff - s.chain.mode_freqs(L.modes[0]);
    ctx.note("stroboscopic fidelity over " + format_number(window) + " s");
    const StroboscopicFidelity fp = stroboscopic_fidelity(s, L, L.renormalization.J_prime, dprime, window,
                                                          lo.fock_cutoff, lo.quanta_window);
    const StroboscopicFidelity f0 =
        stroboscopic_fidelity(s, L, L.model.J, dprime, window, lo.fock_cutoff, lo.quanta_window);
    Table strobe({"t", "F_J", "F_Jprime"});
    for (std::size_t k = 0; k < fp.times.size(); ++k) strobe.add({fp.times[k], f0.fidelity[k], fp.fidelity[k]});
    ctx.emit("stroboscopic_fidelity", strobe);
    summary.push_back({"min_fidelity_J", f0.min_fidelity});
    summary.push_back({"min_fidelity_Jprime", fp.min_fidelity});
  }
  ctx.emit_report("leakage_summary", summary);
}

void cmd_transfer(const Context& ctx) {
  const Config& c = ctx.config;
  const std::vector<int> ns = chain_sizes(c);
  Table table({"N", "alpha_target", "F_exp", "F_ideal", "T_tilde", "T_tilde_ideal", "gamma_exp", "gamma_ideal",
               "alpha_achieved", "mu", "clamped"});
  Scalars summary;
  for (double a : alpha_targets(c)) {
    const TransferSweepOptions o = sweep_from(c, a);
    std::vector<double> xs, t_ideal, t_exp;
    for (int n : ns) {
      const TransferPoint p = run_transfer_point(n, o);
      const bool e = o.experimental;
      table.add({double(n), a, e ? p.experimental.fidelity : nan, p.ideal.fidelity,
                 e ? p.experimental.report.scaled_time : nan, p.ideal.report.scaled_time,
                 e ? p.experimental.config.gamma : nan, p.ideal.config.gamma, e ? p.alpha_achieved : nan,
                 e ? p.mu : nan, e ? double(p.alpha_clamped) : nan});
      xs.push_back(n);
      t_ideal.push_back(p.ideal.report.scaled_time);
      if (e) t_exp.push_back(p.experimental.report.scaled_time);
      ctx.note("alpha " + format_alpha(a) + ", N = " + std::to_string(n) + " done");
    }
    summary.push_back({"T_tilde_slope_ideal_alpha_" + format_alpha(a), log_log_slope(xs, t_ideal)});
    if (o.experimental) summary.push_back({"T_tilde_slope_exp_alpha_" + format_alpha(a), log_log_slope(xs, t_exp)});
  }
  ctx.emit("transfer", table, summary);
  ctx.emit_report("transfer_summary", summary);
}

void cmd_search(const Context& ctx) {
  const Config& c = ctx.config;
  const int n = c.get_int("n_ions", 10);
  if (n < 2) throw ConfigError("search needs n_ions >= 2");
  const double alpha = c.get_double("alpha_target", 0.2);
  const std::string source = c.get_string("couplings", "ideal");
  Eigen::MatrixXd walk;
  if (source == "ideal") {
    walk = power_law_walk(n, alpha);
  } else if (source == "experimental") {
    const ChainSetup s = setup_chain(setup_from_config(c));
    walk = single_excitation_hopping(build_coupling_model(s.trap, s.chain).J);
  } else {
    throw ConfigError("couplings must be 'ideal' or 'experimental'");
  }
  walk /= analytic_gamma(walk).lambda_max;
  const double amplitude = c.get_double("marker_amplitude", 1.0);
  const double gamma = c.get_double("gamma", amplitude);
  const int marked = c.get_int("marked", 0);
  if (marked < 0 || marked >= n) throw ConfigError("marked site out of range");
  const int samples = c.get_int("samples", 401);
  const double horizon = c.get_double("horizon", 2.0);
  if (samples < 2 || !(horizon > 0.0)) throw ConfigError("search needs samples >= 2 and horizon > 0");
  const double t_end = horizon * 0.5 * constants::pi * std::sqrt(double(n)) / amplitude;
  std::vector<double> times;
  for (int k = 0; k < samples; ++k) times.push_back(t_end * k / (samples - 1));
  const std::vector<double> f = run_search(walk, gamma, marked, times, amplitude);

  Table table({"t", "F_search"});
  double best = -1.0, t_best = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    table.add({times[k], f[k]});
    if (f[k] > best) {
      best = f[k];
      t_best = times[k];
    }
  }
  ctx.emit("search", table);
  ctx.emit_report("search_summary", {{"n_ions", n}, {"gamma", gamma}, {"marker_amplitude", amplitude},
                                     {"peak_fidelity", best}, {"t_peak", t_best}});
}

void cmd_noise(const Context& ctx) {
  const Config& c = ctx.config;
  const std::vector<int> ns = chain_sizes(c);
  NoiseConfig noise;
  noise.t2 = c.get_double("t2", noise.t2);
  noise.n_samples = c.get_int("n_samples", noise.n_samples);
  noise.seed = ctx.global.seed;
  if (c.has("field_variance")) noise.field_variance = c.get_double("field_variance", 0.0);
  noise.validate();

  Table table({"N", "alpha_target", "mean_F", "std_F", "n_samples", "t2", "noiseless_F", "std_error", "T_s", "gamma"});
  for (double a : alpha_targets(c)) {
    TransferSweepOptions o = sweep_from(c, a);
    o.experimental = true;
    for (int n : ns) {
      const TransferPoint p = run_transfer_point(n, o);
      const NoisePoint np = run_noise_point(p, noise, ctx.global.threads);
      table.add({double(n), a, np.mean, np.std_dev, double(noise.n_samples), noise.t2, np.noiseless,
                 standard_error(np.ensemble.final_fidelity, np.ensemble.final_fidelity.size()),
                 np.physical.duration, np.physical.gamma});
      ctx.note("alpha " + format_alpha(a) + ", N = " + std::to_string(n) + " done");
    }
  }
  ctx.emit("noise", table);
}

std::vector<CommandInfo> build() {
  const auto optimizer_keys = {"n_list", "alpha_list", "experimental", "max_evaluations", "latin_samples",
                               "optimizer_box", "optimizer_seed", "trace_samples", "horizon"};
  std::vector<CommandInfo> v;
  v.push_back({"chain", "equilibrium positions and transverse modes", trap_keys(), cmd_chain});
  v.push_back({"couplings", "XY couplings, local fields and the power-law fit",
               with_trap_keys({"n_init", "modes"}), cmd_couplings});
  v.push_back({"alpha-scan", "power-law exponent against laser detuning",
               with_trap_keys({"n_list", "mu_points", "delta_min_ratio", "delta_max_ratio", "alpha_list"}),
               cmd_alpha_scan});
  v.push_back({"leakage", "spin-phonon dynamics, leakage and effective-frequency fit",
               with_trap_keys({"excitations", "modes", "fock_cutoff", "quanta_window", "periods", "samples", "method",
                               "fit", "r_min", "r_max", "r_grid", "fidelity_window_ms"}),
               cmd_leakage});
  auto transfer_keys = trap_keys();
  transfer_keys.insert(transfer_keys.end(), optimizer_keys.begin(), optimizer_keys.end());
  v.push_back({"transfer", "optimised state transfer on ideal and derived couplings", transfer_keys, cmd_transfer});
  v.push_back({"search", "spatial search success probability",
               with_trap_keys({"couplings", "gamma", "marked", "samples", "horizon", "marker_amplitude"}), cmd_search});
  auto noise_keys = transfer_keys;
  for (const char* k : {"t2", "n_samples", "field_variance"}) noise_keys.emplace_back(k);
  v.push_back({"noise", "state transfer under static dephasing", noise_keys, cmd_noise});
  return v;
}

}  // namespace

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> all = build();
  return all;
}

}  // namespace ionxy::cli
