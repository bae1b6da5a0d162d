#include "ionxy/chain_geometry.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "ionxy/errors.hpp"

namespace ionxy {

void TrapConfig::validate() const {
  if (n_ions < 1) throw InvalidArgument("n_ions must be >= 1");
  if (!(ion_mass > 0.0)) throw InvalidArgument("ion_mass must be positive");
  if (!(omega_x > 0.0) || !(omega_y > 0.0) || !(omega_z > 0.0))
    throw InvalidArgument("trap frequencies must be positive");
  if (!(omega_z < std::min(omega_x, omega_y)))
    throw InvalidArgument("omega_z must be below both transverse frequencies");
  if (delta_k < 0.0 || rabi_total < 0.0 || detuning_mu < 0.0)
    throw InvalidArgument("delta_k, rabi_total and detuning_mu must be non-negative");
}

double length_scale(const TrapConfig& trap) {
  trap.validate();
  using namespace constants;
  const double e2 = elementary_charge * elementary_charge;
  return std::cbrt(e2 / (4.0 * pi * vacuum_permittivity * trap.ion_mass * trap.omega_z * trap.omega_z));
}

Eigen::VectorXd axial_gradient(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::VectorXd g = u;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = u(i) - u(j);
      g(i) -= (d > 0 ? 1.0 : -1.0) / (d * d);
    }
  }
  return g;
}

namespace {

Eigen::MatrixXd axial_hessian(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = 2.0 / std::pow(std::abs(u(i) - u(j)), 3);
      h(i, i) += c;
      h(i, j) -= c;
    }
  }
  return h;
}

double potential(const Eigen::VectorXd& u) {
  double v = 0.5 * u.squaredNorm();
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u(i) - u(j));
  return v;
}

bool ordered(const Eigen::VectorXd& u) {
  for (Eigen::Index i = 1; i < u.size(); ++i)
    if (!(u(i) > u(i - 1))) return false;
  return true;
}

}  // namespace

ChainSolution solve_equilibrium(const TrapConfig& trap, const EquilibriumOptions& options) {
  trap.validate();
  const int n = trap.n_ions;
  ChainSolution out;
  out.length_scale = length_scale(trap);
  if (n == 1) {
    out.positions = Eigen::VectorXd::Zero(1);
    return out;
  }

  // Rounding floor of the gradient: the largest term magnitude times a few ulps.
  auto floor_of = [](const Eigen::VectorXd& x) {
    double scale = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double s = std::abs(x(i));
      for (Eigen::Index j = 0; j < x.size(); ++j) {
        if (j != i) s += 1.0 / ((x(i) - x(j)) * (x(i) - x(j)));
      }
      scale = std::max(scale, s);
    }
    return 16.0 * std::numeric_limits<double>::epsilon() * scale;
  };

  const double half_width = std::pow(static_cast<double>(n), 0.56);
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(n, -half_width, half_width);
  double residual = axial_gradient(u).lpNorm<Eigen::Infinity>();
  int it = 0;
  double tolerance = std::max(options.gradient_tolerance, floor_of(u));
  for (; it < options.max_iterations && residual > tolerance; ++it) {
    const Eigen::VectorXd g = axial_gradient(u);
    const Eigen::VectorXd step = axial_hessian(u).ldlt().solve(g);
    const double v0 = potential(u);
    double lambda = 1.0;
    Eigen::VectorXd trial = u - step;
    auto rejected = [&](const Eigen::VectorXd& x) {
      if (!ordered(x)) return true;
      return potential(x) > v0 && axial_gradient(x).lpNorm<Eigen::Infinity>() >= residual;
    };
    while (lambda > 1e-8 && rejected(trial)) {
      lambda *= 0.5;
      trial = u - lambda * step;
    }
    u = trial;
    // Enforce the reflection symmetry the exact minimiser has.
    const Eigen::VectorXd mirrored = -u.reverse();
    u = 0.5 * (u + mirrored);
    residual = axial_gradient(u).lpNorm<Eigen::Infinity>();
    tolerance = std::max(options.gradient_tolerance, floor_of(u));
  }
  if (residual > tolerance) {
    std::ostringstream msg;
    msg << "equilibrium solver did not converge after " << it << " iterations (residual "
        << residual << ")";
    throw NonConvergence(msg.str(), residual);
  }
  out.positions = u;
  return out;
}

Eigen::MatrixXd transverse_hessian(const TrapConfig& trap, const Eigen::VectorXd& positions,
                                   TransverseAxis axis) {
  const Eigen::Index n = positions.size();
  const double wt = axis == TransverseAxis::X ? trap.omega_x : trap.omega_y;
  const double wz2 = trap.omega_z * trap.omega_z;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) * (wt * wt);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = wz2 / std::pow(std::abs(positions(i) - positions(j)), 3);
      a(i, i) -= c;
      a(i, j) += c;
    }
  }
  return a;
}

ChainSolution transverse_phonon_modes(const TrapConfig& trap, const ChainSolution& equilibrium,
                                      TransverseAxis axis) {
  const Eigen::MatrixXd a = transverse_hessian(trap, equilibrium.positions, axis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  const Eigen::VectorXd& w2 = es.eigenvalues();
  const Eigen::MatrixXd& v = es.eigenvectors();
  const Eigen::Index n = w2.size();

  if (w2.minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "transverse mode with omega^2 = " << w2.minCoeff()
        << " rad^2/s^2: chain is past the zig-zag transition";
    throw UnstableChain(msg.str(), w2.minCoeff());
  }

  std::vector<Eigen::Index> peak(n);
  for (Eigen::Index m = 0; m < n; ++m) v.col(m).cwiseAbs().maxCoeff(&peak[m]);
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const double tie = 1e-12 * w2.cwiseAbs().maxCoeff();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a_, Eigen::Index b_) {
    if (std::abs(w2(a_) - w2(b_)) > tie) return w2(a_) > w2(b_);
    return peak[a_] < peak[b_];
  });

  ChainSolution out = equilibrium;
  out.axis = axis;
  out.mode_freqs.resize(n);
  out.mode_matrix.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd col = v.col(order[k]);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > 1e-8) {
        if (col(i) < 0) col = -col;
        break;
      }
    }
    out.mode_matrix.col(k) = col;
    out.mode_freqs(k) = std::sqrt(w2(order[k]));
  }
  return out;
}

ChainSolution solve_chain(const TrapConfig& trap) {
  return transverse_phonon_modes(trap, solve_equilibrium(trap), TransverseAxis::X);
}

StabilityReport is_linear_stable(const TrapConfig& trap) {
  trap.validate();
  StabilityReport report;
  if (trap.n_ions == 1) {
    report.stable = true;
    report.margin = std::min(trap.omega_x, trap.omega_y);
    report.margin *= report.margin;
    report.binding_axis = trap.omega_y < trap.omega_x ? TransverseAxis::Y : TransverseAxis::X;
    return report;
  }
  const ChainSolution eq = solve_equilibrium(trap);
  const double lx =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(transverse_hessian(trap, eq.positions, TransverseAxis::X),
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  const double ly =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(transverse_hessian(trap, eq.positions, TransverseAxis::Y),
                                                     Eigen::EigenvaluesOnly)
          .eigenvalues()
          .minCoeff();
  report.margin = std::min(lx, ly);
  report.binding_axis = ly < lx ? TransverseAxis::Y : TransverseAxis::X;
  report.stable = report.margin > 0.0;
  return report;
}

}  // namespace ionxy

namespace ionxy {

double critical_axial_frequency(const TrapConfig& trap) {
  if (trap.n_ions <= 1) return std::numeric_limits<double>::infinity();
  TrapConfig probe = trap;
  probe.omega_z = 0.5 * std::min(trap.omega_x, trap.omega_y);
  const ChainSolution eq = solve_equilibrium(probe);
  TrapConfig unit = probe;
  unit.omega_x = unit.omega_y = 0.0;
  unit.omega_z = 1.0;
  const double kappa_min = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                               transverse_hessian(unit, eq.positions, TransverseAxis::X),
                               Eigen::EigenvaluesOnly)
                               .eigenvalues()
                               .minCoeff();
  return std::min(trap.omega_x, trap.omega_y) / std::sqrt(-kappa_min);
}

}  // namespace ionxy
