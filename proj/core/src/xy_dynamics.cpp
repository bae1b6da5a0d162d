#include "ionxy/xy_dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "ionxy/errors.hpp"

namespace ionxy {

Eigen::MatrixXd xy_pair_couplings(const Eigen::MatrixXd& J) { return 2.0 * J; }

Eigen::MatrixXd single_excitation_hopping(const Eigen::MatrixXd& J) {
  Eigen::MatrixXd h = 4.0 * J;
  h.diagonal().setZero();
  return h;
}

int XYSector::index_of(std::uint64_t mask) const {
  const auto it = std::lower_bound(basis.begin(), basis.end(), mask);
  if (it == basis.end() || *it != mask) return -1;
  return static_cast<int>(it - basis.begin());
}

Eigen::MatrixXd XYSector::to_dense() const { return is_dense ? dense : Eigen::MatrixXd(sparse); }

Eigen::VectorXd XYSector::apply(const Eigen::VectorXd& v) const {
  return is_dense ? Eigen::VectorXd(dense * v) : Eigen::VectorXd(sparse * v);
}

Eigen::VectorXcd XYSector::apply(const Eigen::VectorXcd& v) const {
  if (is_dense) return dense.cast<Complex>() * v;
  return sparse.cast<Complex>() * v;
}

std::string XYSector::id() const {
  std::ostringstream s;
  s << "xy:n=" << n_sites << ":s=" << excitations;
  return s.str();
}

namespace {

void check_square_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols()) throw InvalidArgument(std::string(what) + " must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument(std::string(what) + " must be symmetric");
}

std::vector<std::uint64_t> combinations(int n, int s) {
  std::vector<std::uint64_t> out;
  if (s == 0) {
    out.push_back(0);
    return out;
  }
  const std::uint64_t limit = n == 64 ? 0 : (std::uint64_t{1} << n);
  std::uint64_t v = (s == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << s) - 1);
  while (limit == 0 || v < limit) {
    out.push_back(v);
    const std::uint64_t t = v | (v - 1);
    if (t == ~std::uint64_t{0}) break;
    v = (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
  }
  return out;
}

}  // namespace

XYSector build_single_excitation(const Eigen::MatrixXd& hopping, const Eigen::VectorXd& site_energies) {
  check_square_symmetric(hopping, "hopping matrix");
  const int n = static_cast<int>(hopping.rows());
  if (n > 63) throw InvalidArgument("at most 63 sites are supported");
  if (site_energies.size() != 0 && site_energies.size() != n)
    throw InvalidArgument("site energies must have one entry per site");
  XYSector sector;
  sector.n_sites = n;
  sector.excitations = 1;
  for (int i = 0; i < n; ++i) sector.basis.push_back(std::uint64_t{1} << i);
  sector.dense = hopping;
  sector.dense.diagonal().setZero();
  if (site_energies.size() == n) sector.dense.diagonal() = site_energies;
  sector.is_dense = true;
  return sector;
}

XYSector build_sector(const Eigen::MatrixXd& pair_couplings, const Eigen::VectorXd& fields, int excitations) {
  check_square_symmetric(pair_couplings, "pair coupling matrix");
  const int n = static_cast<int>(pair_couplings.rows());
  if (n > 63) throw InvalidArgument("at most 63 sites are supported");
  if (fields.size() != 0 && fields.size() != n) throw InvalidArgument("fields must have one entry per site");
  if (excitations < 0 || excitations > n) throw InvalidArgument("excitation count out of range");

  XYSector sector;
  sector.n_sites = n;
  sector.excitations = excitations;
  sector.basis = combinations(n, excitations);
  const int dim = sector.dimension();
  sector.is_dense = dim <= XYSector::dense_limit;

  std::vector<Eigen::Triplet<double>> triplets;
  for (int a = 0; a < dim; ++a) {
    const std::uint64_t mask = sector.basis[a];
    double diag = 0.0;
    if (fields.size() == n)
      for (int j = 0; j < n; ++j) diag += (mask >> j & 1u) ? fields(j) : -fields(j);
    triplets.emplace_back(a, a, diag);
    for (int i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      for (int j = 0; j < n; ++j) {
        if (mask >> j & 1u) continue;
        const double k = pair_couplings(i, j);
        if (k == 0.0) continue;
        const int b = sector.index_of(mask ^ (std::uint64_t{1} << i) ^ (std::uint64_t{1} << j));
        triplets.emplace_back(b, a, 2.0 * k);
      }
    }
  }
  if (sector.is_dense) {
    sector.dense = Eigen::MatrixXd::Zero(dim, dim);
    for (const auto& t : triplets) sector.dense(t.row(), t.col()) += t.value();
  } else {
    sector.sparse.resize(dim, dim);
    sector.sparse.setFromTriplets(triplets.begin(), triplets.end());
  }
  return sector;
}

StateVector basis_state(const XYSector& sector, std::uint64_t mask) {
  const int k = sector.index_of(mask);
  if (k < 0) throw InvalidArgument("bitmask is not in the sector basis");
  StateVector psi;
  psi.amplitudes = Eigen::VectorXcd::Zero(sector.dimension());
  psi.amplitudes(k) = 1.0;
  psi.basis_id = sector.id();
  return psi;
}

StateVector site_state(const XYSector& sector, int site) {
  if (sector.excitations != 1) throw InvalidArgument("site_state needs a single-excitation sector");
  if (site < 0 || site >= sector.n_sites) throw InvalidArgument("site index out of range");
  return basis_state(sector, std::uint64_t{1} << site);
}

SpectralPropagator::SpectralPropagator(const Eigen::MatrixXd& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian);
  values_ = es.eigenvalues();
  vectors_ = es.eigenvectors();
}

Eigen::VectorXcd SpectralPropagator::coefficients(const Eigen::VectorXcd& psi0) const {
  return vectors_.transpose().cast<Complex>() * psi0;
}

Eigen::VectorXcd SpectralPropagator::evolve_coefficients(const Eigen::VectorXcd& c, double t) const {
  Eigen::VectorXcd phased(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) phased(k) = c(k) * std::polar(1.0, -values_(k) * t);
  return vectors_.cast<Complex>() * phased;
}

Eigen::VectorXcd SpectralPropagator::evolve(const Eigen::VectorXcd& psi0, double t) const {
  return evolve_coefficients(coefficients(psi0), t);
}

Eigen::VectorXcd krylov_evolve(const Eigen::SparseMatrix<double>& h, const Eigen::VectorXcd& psi0,
                               double t, const KrylovOptions& options) {
  const Eigen::SparseMatrix<Complex> hc = h.cast<Complex>();
  Eigen::VectorXcd psi = psi0;
  double done = 0.0;
  double tau = t;
  const int m_max = std::max(2, std::min<int>(options.subspace, static_cast<int>(h.rows())));
  while (std::abs(t - done) > 0.0) {
    const double norm0 = psi.norm();
    if (norm0 == 0.0) return psi;
    std::vector<Eigen::VectorXcd> v{psi / norm0};
    std::vector<double> alpha, beta;
    int m = 0;
    bool breakdown = false;
    for (; m < m_max; ++m) {
      Eigen::VectorXcd w = hc * v[m];
      const double a = v[m].dot(w).real();
      w -= a * v[m];
      if (m > 0) w -= beta[m - 1] * v[m - 1];
      for (const auto& q : v) w -= q.dot(w) * q;  // full reorthogonalisation
      alpha.push_back(a);
      const double b = w.norm();
      beta.push_back(b);
      if (b < 1e-14 * std::max(1.0, std::abs(a))) {
        breakdown = true;
        ++m;
        break;
      }
      v.push_back(w / b);
    }
    const int dim = breakdown ? m : m_max;
    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
      tri(k, k) = alpha[k];
      if (k + 1 < dim) tri(k, k + 1) = tri(k + 1, k) = beta[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    const double remaining = t - done;
    double step = std::abs(tau) < std::abs(remaining) ? tau : remaining;
    Eigen::VectorXcd small;
    for (;;) {
      Eigen::VectorXcd phase(dim);
      for (int k = 0; k < dim; ++k)
        phase(k) = es.eigenvectors()(0, k) * std::polar(1.0, -es.eigenvalues()(k) * step);
      small = es.eigenvectors().cast<Complex>() * phase;
      const double err = breakdown ? 0.0 : beta[dim - 1] * std::abs(small(dim - 1));
      if (err <= options.tolerance || std::abs(step) < 1e-300) break;
      step *= 0.5;
    }
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());
    for (int k = 0; k < dim; ++k) next += small(k) * v[k];
    psi = norm0 * next;
    done += step;
    tau = 2.0 * step;
    if (std::abs(t - done) <= 1e-15 * std::abs(t)) break;
  }
  return psi;
}

StateVector evolve(const XYSector& sector, const StateVector& psi0, double t) {
  if (psi0.amplitudes.size() != sector.dimension())
    throw BasisMismatch("state dimension does not match the sector");
  if (!psi0.basis_id.empty() && psi0.basis_id != sector.id())
    throw BasisMismatch("state belongs to " + psi0.basis_id + ", not " + sector.id());
  StateVector out;
  out.basis_id = sector.id();
  if (t == 0.0) {
    out.amplitudes = psi0.amplitudes;
  } else if (sector.is_dense) {
    out.amplitudes = SpectralPropagator(sector.dense).evolve(psi0.amplitudes, t);
  } else {
    out.amplitudes = krylov_evolve(sector.sparse, psi0.amplitudes, t);
  }
  return out;
}

double transfer_fidelity(const StateVector& psi, int target_index) {
  if (target_index < 0 || target_index >= psi.amplitudes.size())
    throw InvalidArgument("target index out of range");
  return std::min(1.0, std::norm(psi.amplitudes(target_index)));
}

Eigen::VectorXd site_occupations(const XYSector& sector, const StateVector& psi) {
  if (psi.amplitudes.size() != sector.dimension()) throw BasisMismatch("state dimension does not match the sector");
  Eigen::VectorXd occ = Eigen::VectorXd::Zero(sector.n_sites);
  for (int a = 0; a < sector.dimension(); ++a) {
    const double p = std::norm(psi.amplitudes(a));
    for (int i = 0; i < sector.n_sites; ++i)
      if (sector.basis[a] >> i & 1u) occ(i) += p;
  }
  return occ;
}

double energy(const XYSector& sector, const StateVector& psi) {
  if (psi.amplitudes.size() != sector.dimension()) throw BasisMismatch("state dimension does not match the sector");
  return psi.amplitudes.dot(sector.apply(psi.amplitudes)).real();
}

SiteTrace site_trace(const XYSector& sector, const StateVector& psi0, const std::vector<double>& times,
                     int target_site) {
  if (sector.excitations != 1) throw InvalidArgument("site_trace needs a single-excitation sector");
  if (target_site < 0 || target_site >= sector.n_sites) throw InvalidArgument("target site out of range");
  SiteTrace trace;
  trace.times = times;
  const SpectralPropagator prop(sector.to_dense());
  const Eigen::VectorXcd c = prop.coefficients(psi0.amplitudes);
  for (double t : times) {
    const Eigen::VectorXcd psi = prop.evolve_coefficients(c, t);
    trace.site_probabilities.push_back(psi.cwiseAbs2());
    trace.fidelity.push_back(std::norm(psi(target_site)));
  }
  return trace;
}

}  // namespace ionxy
