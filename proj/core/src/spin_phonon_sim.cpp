#include "ionxy/spin_phonon_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "ionxy/coupling_engine.hpp"
#include "ionxy/errors.hpp"

namespace ionxy {

void TruncationPolicy::validate(int n_ions) const {
  if (modes.empty()) throw InvalidArgument("truncation needs at least one phonon mode");
  std::set<int> seen;
  for (int m : modes) {
    if (m < 0 || m >= n_ions) throw InvalidArgument("phonon mode index out of range");
    if (!seen.insert(m).second) throw InvalidArgument("phonon modes must be distinct");
  }
  if (fock_cutoff < 1) throw InvalidArgument("fock_cutoff must be >= 1");
  if (excitations < 0 || excitations > n_ions) throw InvalidArgument("excitation count out of range");
  if (n_ions > 30) throw InvalidArgument("spin-phonon simulation supports at most 30 ions");
}

ProductBasis::ProductBasis(int n_ions, const TruncationPolicy& policy)
    : n_ions_(n_ions), fock_cutoff_(policy.fock_cutoff), modes_(policy.modes) {
  policy.validate(n_ions);
  const int nm = n_modes();
  const int s = policy.excitations;
  auto admitted = [&](int quanta) {
    if (policy.quanta_window >= 0 && std::abs(quanta - s) > policy.quanta_window) return false;
    if (policy.parity_sector && ((quanta - s) % 2 != 0)) return false;
    return true;
  };

  std::vector<int> occ(nm, 0);
  const std::uint64_t n_masks = std::uint64_t{1} << n_ions;
  for (std::uint64_t mask = 0; mask < n_masks; ++mask) {
    const int k = std::popcount(mask);
    std::fill(occ.begin(), occ.end(), 0);
    for (;;) {
      const int p = std::accumulate(occ.begin(), occ.end(), 0);
      if (admitted(k + p)) {
        spins_.push_back(mask);
        phonons_.insert(phonons_.end(), occ.begin(), occ.end());
      }
      int slot = nm - 1;
      while (slot >= 0 && occ[slot] == fock_cutoff_) occ[slot--] = 0;
      if (slot < 0) break;
      ++occ[slot];
    }
  }
}

int ProductBasis::total_phonons(int k) const {
  int p = 0;
  for (int m = 0; m < n_modes(); ++m) p += phonons(k, m);
  return p;
}

int ProductBasis::index_of(std::uint64_t mask, const std::vector<int>& occupations) const {
  if (static_cast<int>(occupations.size()) != n_modes()) return -1;
  int lo = 0, hi = dimension();
  auto less = [&](int k) {
    if (spins_[k] != mask) return spins_[k] < mask;
    for (int m = 0; m < n_modes(); ++m)
      if (phonons(k, m) != occupations[m]) return phonons(k, m) < occupations[m];
    return false;
  };
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (less(mid)) lo = mid + 1;
    else hi = mid;
  }
  if (lo == dimension() || spins_[lo] != mask) return -1;
  for (int m = 0; m < n_modes(); ++m)
    if (phonons(lo, m) != occupations[m]) return -1;
  return lo;
}

std::string ProductBasis::id() const {
  std::ostringstream s;
  s << "spin-phonon:n=" << n_ions_ << ":modes=";
  for (std::size_t i = 0; i < modes_.size(); ++i) s << (i ? "," : "") << modes_[i];
  s << ":fock=" << fock_cutoff_ << ":dim=" << dimension();
  return s.str();
}

SpinPhononModel make_spin_phonon_model(const TrapConfig& trap, const ChainSolution& chain,
                                       const TruncationPolicy& policy) {
  if (chain.n_ions() != trap.n_ions) throw InvalidArgument("chain and trap disagree on the ion count");
  SpinPhononModel model;
  model.basis = ProductBasis(trap.n_ions, policy);
  model.rabi = trap.rabi_per_ion();
  model.omega_eff = effective_frequency(trap);
  const Eigen::MatrixXd eta_all = lamb_dicke(trap, chain);
  const int nm = model.basis.n_modes();
  model.eta.resize(trap.n_ions, nm);
  model.mode_freqs.resize(nm);
  for (int m = 0; m < nm; ++m) {
    model.eta.col(m) = eta_all.col(policy.modes[m]);
    model.mode_freqs(m) = chain.mode_freqs(policy.modes[m]);
  }

  const ProductBasis& basis = model.basis;
  const int dim = basis.dimension();
  model.h0.resize(dim);
  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<int> occ(nm);
  for (int a = 0; a < dim; ++a) {
    const std::uint64_t mask = basis.spin(a);
    double e = 0.5 * model.omega_eff * (2.0 * std::popcount(mask) - trap.n_ions);
    for (int m = 0; m < nm; ++m) {
      occ[m] = basis.phonons(a, m);
      e += model.mode_freqs(m) * occ[m];
    }
    model.h0(a) = e;
    for (int i = 0; i < trap.n_ions; ++i) {
      const std::uint64_t flipped = mask ^ (std::uint64_t{1} << i);
      for (int m = 0; m < nm; ++m) {
        const double g = -0.5 * model.rabi * model.eta(i, m);
        if (g == 0.0) continue;
        for (int dp : {+1, -1}) {
          const int p = occ[m];
          if (p + dp < 0) continue;
          const double bose = dp > 0 ? std::sqrt(p + 1.0) : std::sqrt(static_cast<double>(p));
          std::vector<int> target = occ;
          target[m] += dp;
          const int b = basis.index_of(flipped, target);
          if (b >= 0) triplets.emplace_back(b, a, g * bose);
        }
      }
    }
  }
  model.v.resize(dim, dim);
  model.v.setFromTriplets(triplets.begin(), triplets.end());
  return model;
}

Eigen::MatrixXcd build_interaction_hamiltonian(const SpinPhononModel& model, double t) {
  const int dim = model.basis.dimension();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k < model.v.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(model.v, k); it; ++it)
      h(it.row(), it.col()) = it.value() * std::polar(1.0, (model.h0(it.row()) - model.h0(it.col())) * t);
  return h;
}

Eigen::MatrixXcd build_interaction_hamiltonian(const TrapConfig& trap, const ChainSolution& chain,
                                               const TruncationPolicy& policy, double t) {
  return build_interaction_hamiltonian(make_spin_phonon_model(trap, chain, policy), t);
}

StateVector product_state(const ProductBasis& basis, std::uint64_t spin_mask) {
  const int k = basis.index_of(spin_mask, std::vector<int>(basis.n_modes(), 0));
  if (k < 0) throw InvalidArgument("initial state is outside the truncated basis");
  StateVector psi;
  psi.amplitudes = Eigen::VectorXcd::Zero(basis.dimension());
  psi.amplitudes(k) = 1.0;
  psi.basis_id = basis.id();
  return psi;
}

StateVector default_initial_state(const ProductBasis& basis, int excitations) {
  if (excitations < 0 || excitations > basis.n_ions()) throw InvalidArgument("excitation count out of range");
  return product_state(basis, (std::uint64_t{1} << excitations) - 1);
}

namespace {

void check_times(const std::vector<double>& times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0)) throw InvalidArgument("output times must be non-negative");
    if (k > 0 && times[k] < times[k - 1]) throw InvalidArgument("output times must be ascending");
  }
}

class InteractionRhs {
 public:
  explicit InteractionRhs(const SpinPhononModel& model) : model_(model), tmp_(model.basis.dimension()) {}

  // dψ/dt = −i e^{iH₀t} V e^{−iH₀t} ψ
  void operator()(double t, const Eigen::VectorXcd& psi, Eigen::VectorXcd& out) {
    const Eigen::Index n = psi.size();
    for (Eigen::Index k = 0; k < n; ++k) tmp_(k) = psi(k) * std::polar(1.0, -model_.h0(k) * t);
    out.noalias() = model_.v.cast<Complex>() * tmp_;
    for (Eigen::Index k = 0; k < n; ++k) out(k) *= Complex(0.0, -1.0) * std::polar(1.0, model_.h0(k) * t);
  }

 private:
  const SpinPhononModel& model_;
  Eigen::VectorXcd tmp_;
};

void propagate_adaptive(const SpinPhononModel& model, const Eigen::VectorXcd& psi0,
                        const std::vector<double>& times, const StateObserver& observer,
                        const PropagationOptions& options) {
  // Dormand–Prince 5(4) tableau.
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  InteractionRhs f(model);
  const double w_max = model.mode_freqs.size() ? model.mode_freqs.maxCoeff() : 0.0;
  const double h_max = options.max_step_fraction * constants::two_pi / (model.omega_eff + w_max);

  const Eigen::Index n = psi0.size();
  Eigen::VectorXcd y = psi0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n);
  double t = 0.0;
  double h = h_max;
  f(t, y, k1);
  for (double target : times) {
    while (t < target) {
      const bool last = t + h >= target;
      const double step = last ? target - t : h;
      ytmp = y + step * a21 * k1;
      f(t + c2 * step, ytmp, k2);
      ytmp = y + step * (a31 * k1 + a32 * k2);
      f(t + c3 * step, ytmp, k3);
      ytmp = y + step * (a41 * k1 + a42 * k2 + a43 * k3);
      f(t + c4 * step, ytmp, k4);
      ytmp = y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      f(t + c5 * step, ytmp, k5);
      ytmp = y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      f(t + step, ytmp, k6);
      y5 = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      f(t + step, y5, k7);
      const double err =
          (step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7)).cwiseAbs().maxCoeff();
      if (err <= options.tolerance) {
        t = last ? target : t + step;
        y = y5;
        k1 = k7;
      }
      const double scale = err > 0.0 ? 0.9 * std::pow(options.tolerance / err, 0.2) : 5.0;
      const double proposed = step * std::clamp(scale, 0.2, 5.0);
      if (err <= options.tolerance && last) {
        h = std::min(std::max(h, proposed), h_max);
      } else {
        h = std::min(proposed, h_max);
      }
      if (h < options.min_step) {
        std::ostringstream msg;
        msg << "integrator step fell below " << options.min_step << " s at t = " << t << " s";
        throw StepUnderflow(msg.str(), t);
      }
    }
    observer(target, y);
  }
}

void propagate_exact(const SpinPhononModel& model, const Eigen::VectorXcd& psi0, const std::vector<double>& times,
                     const StateObserver& observer) {
  Eigen::MatrixXd h = Eigen::MatrixXd(model.v);
  h.diagonal() += model.h0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  const Eigen::MatrixXcd u = es.eigenvectors().cast<Complex>();
  const Eigen::VectorXcd c = u.adjoint() * psi0;
  Eigen::VectorXcd phased(c.size()), psi(c.size());
  for (double t : times) {
    for (Eigen::Index k = 0; k < c.size(); ++k) phased(k) = c(k) * std::polar(1.0, -es.eigenvalues()(k) * t);
    psi.noalias() = u * phased;
    for (Eigen::Index k = 0; k < psi.size(); ++k) psi(k) *= std::polar(1.0, model.h0(k) * t);
    observer(t, psi);
  }
}

}  // namespace

void propagate(const SpinPhononModel& model, const StateVector& psi0, const std::vector<double>& times,
               const StateObserver& observer, const PropagationOptions& options) {
  if (psi0.amplitudes.size() != model.basis.dimension())
    throw BasisMismatch("initial state dimension does not match the product basis");
  if (!psi0.basis_id.empty() && psi0.basis_id != model.basis.id())
    throw BasisMismatch("initial state belongs to " + psi0.basis_id);
  if (!(options.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  check_times(times);
  if (options.method == PropagationMethod::Exact)
    propagate_exact(model, psi0.amplitudes, times, observer);
  else
    propagate_adaptive(model, psi0.amplitudes, times, observer, options);
}

Trajectory propagate(const SpinPhononModel& model, const StateVector& psi0, const std::vector<double>& times,
                     const PropagationOptions& options) {
  Trajectory traj;
  traj.basis_id = model.basis.id();
  traj.times.reserve(times.size());
  traj.states.reserve(times.size());
  propagate(
      model, psi0, times,
      [&](double t, const Eigen::VectorXcd& psi) {
        traj.times.push_back(t);
        traj.states.push_back(psi);
      },
      options);
  return traj;
}

double vacuum_overlap(const ProductBasis& basis, const Eigen::VectorXcd& psi) {
  double e = 0.0;
  for (int k = 0; k < basis.dimension(); ++k)
    if (basis.spin(k) == 0) e += std::norm(psi(k));
  return e;
}

std::vector<double> vacuum_overlap(const ProductBasis& basis, const Trajectory& trajectory) {
  std::vector<double> out;
  for (const auto& psi : trajectory.states) out.push_back(vacuum_overlap(basis, psi));
  return out;
}

double phonon_occupation(const ProductBasis& basis, const Eigen::VectorXcd& psi) {
  double n = 0.0;
  for (int k = 0; k < basis.dimension(); ++k) n += basis.total_phonons(k) * std::norm(psi(k));
  return n;
}

std::vector<double> phonon_occupation(const ProductBasis& basis, const Trajectory& trajectory) {
  std::vector<double> out;
  for (const auto& psi : trajectory.states) out.push_back(phonon_occupation(basis, psi));
  return out;
}

double model_fidelity(const ProductBasis& basis, const Eigen::VectorXcd& psi, const XYSector& sector,
                      const Eigen::VectorXcd& xy_state) {
  if (basis.n_ions() != sector.n_sites) throw BasisMismatch("spin-phonon basis and XY sector differ in site count");
  if (xy_state.size() != sector.dimension()) throw BasisMismatch("XY state dimension does not match its sector");
  if (psi.size() != basis.dimension()) throw BasisMismatch("state dimension does not match the product basis");
  // Group amplitudes by phonon configuration: F = Σ_p |Σ_σ φ*(σ) ψ(σ, p)|².
  std::vector<std::pair<std::vector<int>, Complex>> groups;
  std::vector<int> occ(basis.n_modes());
  for (int k = 0; k < basis.dimension(); ++k) {
    const int idx = sector.index_of(basis.spin(k));
    if (idx < 0) continue;
    for (int m = 0; m < basis.n_modes(); ++m) occ[m] = basis.phonons(k, m);
    const Complex term = std::conj(xy_state(idx)) * psi(k);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == occ; });
    if (it == groups.end()) groups.emplace_back(occ, term);
    else it->second += term;
  }
  double f = 0.0;
  for (const auto& g : groups) f += std::norm(g.second);
  return std::min(1.0, f);
}

std::vector<double> model_fidelity(const ProductBasis& basis, const Trajectory& trajectory, const XYSector& sector,
                                   const std::vector<Eigen::VectorXcd>& xy_states) {
  if (xy_states.size() != trajectory.states.size())
    throw InvalidArgument("reference and trajectory have different lengths");
  std::vector<double> out;
  for (std::size_t k = 0; k < xy_states.size(); ++k)
    out.push_back(model_fidelity(basis, trajectory.states[k], sector, xy_states[k]));
  return out;
}

std::vector<int> significant_modes(const TrapConfig& trap, const ChainSolution& chain, int count) {
  const int n = static_cast<int>(chain.mode_freqs.size());
  if (count < 1 || count > n) throw InvalidArgument("mode count out of range");
  const Eigen::MatrixXd eta = lamb_dicke(trap, chain);
  const double rabi = trap.rabi_per_ion();
  const double we = effective_frequency(trap);
  std::vector<std::pair<double, int>> weight;
  for (int m = 1; m < n; ++m) {
    const double delta = we - chain.mode_freqs(m);
    weight.emplace_back(rabi * eta.col(m).cwiseAbs().sum() / std::abs(delta), m);
  }
  std::stable_sort(weight.begin(), weight.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<int> out{0};
  for (int k = 0; k + 1 < count; ++k) out.push_back(weight[k].second);
  return out;
}

void write_trajectory_csv(std::ostream& out, const std::vector<double>& times, const std::vector<double>& leakage,
                          const std::vector<double>& occupation, const std::vector<double>& fidelity) {
  if (leakage.size() != times.size() || occupation.size() != times.size() ||
      (!fidelity.empty() && fidelity.size() != times.size()))
    throw InvalidArgument("trajectory columns have different lengths");
  out << "t,E,nbar" << (fidelity.empty() ? "" : ",F") << '\n';
  out.precision(17);
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << times[k] << ',' << leakage[k] << ',' << occupation[k];
    if (!fidelity.empty()) out << ',' << fidelity[k];
    out << '\n';
  }
}

namespace {
constexpr int checkpoint_version = 1;
}

void write_checkpoint(std::ostream& out, const ProductBasis& basis, double t, const Eigen::VectorXcd& psi) {
  if (psi.size() != basis.dimension()) throw BasisMismatch("state dimension does not match the product basis");
  nlohmann::json header = {{"format", "ionxy-checkpoint"},
                           {"version", checkpoint_version},
                           {"basis", basis.id()},
                           {"dimension", basis.dimension()},
                           {"time", t},
                           {"encoding", "f64le-re-im"}};
  out << header.dump() << '\n';
  static_assert(std::endian::native == std::endian::little, "checkpoint writer assumes little-endian doubles");
  for (Eigen::Index k = 0; k < psi.size(); ++k) {
    const double pair[2] = {psi(k).real(), psi(k).imag()};
    out.write(reinterpret_cast<const char*>(pair), sizeof pair);
  }
}

Checkpoint read_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("checkpoint is empty");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("checkpoint header is not JSON: ") + e.what());
  }
  if (header.value("format", "") != "ionxy-checkpoint" || header.value("version", 0) != checkpoint_version)
    throw InvalidArgument("unsupported checkpoint format or version");
  Checkpoint cp;
  cp.basis_id = header.at("basis").get<std::string>();
  cp.time = header.at("time").get<double>();
  const int dim = header.at("dimension").get<int>();
  cp.amplitudes.resize(dim);
  for (int k = 0; k < dim; ++k) {
    double pair[2];
    if (!in.read(reinterpret_cast<char*>(pair), sizeof pair)) throw InvalidArgument("checkpoint is truncated");
    cp.amplitudes(k) = Complex(pair[0], pair[1]);
  }
  return cp;
}

}  // namespace ionxy
