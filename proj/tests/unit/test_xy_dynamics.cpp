#include <doctest.h>

#include <bit>
#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "ionxy/constants.hpp"
#include "ionxy/errors.hpp"
#include "ionxy/xy_dynamics.hpp"

using namespace ionxy;

namespace {

Eigen::MatrixXd random_symmetric(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) k(i, j) = k(j, i) = (i == j ? 0.0 : u(rng));
  return k;
}

Eigen::VectorXd random_vector(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = u(rng);
  return v;
}

/// Σ_{i<j} K_ij (σˣσˣ + σʸσʸ) + Σ h σᶻ on the full 2^N space from Pauli
/// Kronecker products; bit i of the index is site i, 1 = excited (σᶻ = +1).
Eigen::MatrixXcd full_xy(const Eigen::MatrixXd& k, const Eigen::VectorXd& h) {
  const int n = static_cast<int>(k.rows());
  Eigen::Matrix2cd sx, sy, sz, id;
  sx << 0, 1, 1, 0;
  sy << 0, Complex(0, -1), Complex(0, 1), 0;
  sz << -1, 0, 0, 1;
  id.setIdentity();
  auto embed = [&](const std::vector<std::pair<int, Eigen::Matrix2cd>>& ops) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int site = n - 1; site >= 0; --site) {
      Eigen::Matrix2cd f = id;
      for (auto& [s, m] : ops)
        if (s == site) f = m;
      Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
      for (int a = 0; a < out.rows(); ++a)
        for (int b = 0; b < out.cols(); ++b) next.block(2 * a, 2 * b, 2, 2) = out(a, b) * f;
      out = next;
    }
    return out;
  };
  const int dim = 1 << n;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    H += h(i) * embed({{i, sz}});
    for (int j = i + 1; j < n; ++j) H += k(i, j) * (embed({{i, sx}, {j, sx}}) + embed({{i, sy}, {j, sy}}));
  }
  return H;
}

}  // namespace

TEST_CASE("sector blocks match the full Hilbert space") {
  const int n = 4;
  const Eigen::MatrixXd k = random_symmetric(n, 11);
  const Eigen::VectorXd h = random_vector(n, 12);
  const Eigen::MatrixXcd full = full_xy(k, h);
  for (int s = 0; s <= n; ++s) {
    XYSector sec = build_sector(k, h, s);
    const int expected_dim[] = {1, 4, 6, 4, 1};
    REQUIRE(sec.dimension() == expected_dim[s]);
    const Eigen::MatrixXd d = sec.to_dense();
    CHECK((d - d.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (int a = 0; a < sec.dimension(); ++a) {
      CHECK(std::popcount(sec.basis[a]) == s);
      for (int b = 0; b < sec.dimension(); ++b) {
        const Complex ref = full(static_cast<int>(sec.basis[a]), static_cast<int>(sec.basis[b]));
        CHECK(std::abs(ref - Complex(d(a, b), 0.0)) < 1e-12);
      }
    }
  }
}

TEST_CASE("sector evolution matches full evolution up to eight sites") {
  for (int n : {3, 6, 8}) {
    const Eigen::MatrixXd k = random_symmetric(n, 100 + n);
    const Eigen::VectorXd h = random_vector(n, 200 + n);
    const Eigen::MatrixXcd full = full_xy(k, h);
    const double t = 0.73;
    const Eigen::MatrixXcd U = (Complex(0, -t) * full).exp();
    for (int s = 0; s <= n; s += (n == 8 ? 3 : 1)) {
      XYSector sec = build_sector(k, h, s);
      StateVector psi = basis_state(sec, sec.basis[sec.dimension() / 2]);
      StateVector out = evolve(sec, psi, t);
      double dev = 0.0;
      for (int a = 0; a < sec.dimension(); ++a)
        dev = std::max(dev, std::abs(out.amplitudes(a) - U(sec.basis[a], sec.basis[sec.dimension() / 2])));
      CHECK(dev < 1e-9);
    }
  }
}

TEST_CASE("single-excitation walk") {
  SUBCASE("two sites") {
    const double g = 1.7;
    Eigen::MatrixXd hop(2, 2);
    hop << 0, g, g, 0;
    XYSector sec = build_single_excitation(hop);
    SpectralPropagator p(sec.to_dense());
    CHECK(p.eigenvalues()(0) == doctest::Approx(-g));
    CHECK(p.eigenvalues()(1) == doctest::Approx(g));
    StateVector psi = site_state(sec, 0);
    for (double t : {0.0, 0.1, 0.5, 1.3}) {
      const double f = transfer_fidelity(evolve(sec, psi, t), 1);
      CHECK(f == doctest::Approx(std::pow(std::sin(g * t), 2)).epsilon(1e-12));
    }
    CHECK(transfer_fidelity(evolve(sec, psi, (0.5 * constants::pi) / g), 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("hopping matrix maps to the pair convention") {
    const Eigen::MatrixXd k = random_symmetric(5, 7);
    XYSector a = build_single_excitation(2 * k);
    XYSector b = build_sector(k, Eigen::VectorXd::Zero(5), 1);
    const Eigen::MatrixXd da = a.to_dense(), db = b.to_dense();
    // Fields off: the sector diagonal is the constant −N + 2.
    CHECK((da - (db - db(0, 0) * Eigen::MatrixXd::Identity(5, 5))).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((xy_pair_couplings(k) - 2 * k).norm() == 0.0);
    CHECK((single_excitation_hopping(k) - 4 * k).norm() == 0.0);
  }
  SUBCASE("zero hopping is the identity") {
    XYSector sec = build_single_excitation(Eigen::MatrixXd::Zero(4, 4));
    StateVector psi = site_state(sec, 2);
    CHECK((evolve(sec, psi, 5.0).amplitudes - psi.amplitudes).norm() < 1e-15);
  }
}

TEST_CASE("conservation laws and composition") {
  const int n = 9;
  const Eigen::MatrixXd k = random_symmetric(n, 3);
  const Eigen::VectorXd h = random_vector(n, 4);
  XYSector sec = build_sector(k, h, 3);
  StateVector psi = basis_state(sec, 0b000010101);
  CHECK(evolve(sec, psi, 0.0).amplitudes.isApprox(psi.amplitudes, 1e-14));
  const double e0 = energy(sec, psi);
  for (double t : {0.4, 2.0, 11.0}) {
    StateVector out = evolve(sec, psi, t);
    CHECK(std::abs(out.norm() - 1.0) < 1e-9);
    CHECK(std::abs(site_occupations(sec, out).sum() - 3.0) < 1e-10);
    CHECK(std::abs(energy(sec, out) - e0) < 1e-10);
  }
  StateVector a = evolve(sec, evolve(sec, psi, 0.9), 1.6);
  CHECK((a.amplitudes - evolve(sec, psi, 2.5).amplitudes).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("Krylov propagation matches the spectral propagator") {
  const int n = 12;
  const Eigen::MatrixXd k = random_symmetric(n, 9);
  const Eigen::VectorXd h = random_vector(n, 10);
  XYSector sec = build_sector(k, h, 4);
  REQUIRE(sec.dimension() == 495);
  StateVector psi = basis_state(sec, sec.basis[17]);
  Eigen::SparseMatrix<double> sp = sec.to_dense().sparseView();
  SpectralPropagator p(sec.to_dense());
  for (double t : {0.3, 3.0, 20.0}) {
    const Eigen::VectorXcd ref = p.evolve(psi.amplitudes, t);
    CHECK((krylov_evolve(sp, psi.amplitudes, t) - ref).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("large sectors use sparse storage") {
  const int n = 16;
  const Eigen::MatrixXd k = random_symmetric(n, 21);
  XYSector sec = build_sector(k, Eigen::VectorXd::Zero(n), 6);
  CHECK(sec.dimension() == 8008);
  CHECK_FALSE(sec.is_dense);
  StateVector psi = basis_state(sec, sec.basis[0]);
  StateVector out = evolve(sec, psi, 0.5);
  CHECK(std::abs(out.norm() - 1.0) < 1e-9);
  CHECK(std::abs(site_occupations(sec, out).sum() - 6.0) < 1e-9);
}

TEST_CASE("edge sectors and basis checks") {
  const int n = 5;
  const Eigen::MatrixXd k = random_symmetric(n, 1);
  const Eigen::VectorXd h = random_vector(n, 2);
  XYSector empty = build_sector(k, h, 0), full = build_sector(k, h, n);
  REQUIRE(empty.dimension() == 1);
  REQUIRE(full.dimension() == 1);
  CHECK(empty.to_dense()(0, 0) == doctest::Approx(-h.sum()));
  CHECK(full.to_dense()(0, 0) == doctest::Approx(h.sum()));
  StateVector psi = basis_state(empty, 0);
  StateVector out = evolve(empty, psi, 3.0);
  CHECK(std::abs(out.amplitudes(0)) == doctest::Approx(1.0));
  CHECK(std::arg(out.amplitudes(0)) == doctest::Approx(std::remainder(3.0 * h.sum(), constants::two_pi)));

  XYSector one = build_sector(k, h, 1);
  StateVector foreign = basis_state(build_sector(k, h, 2), 0b11);
  CHECK_THROWS_AS(evolve(one, foreign, 1.0), BasisMismatch);
  CHECK_THROWS(basis_state(one, 0b11));
  CHECK(one.index_of(0b100) == 2);
  CHECK(one.index_of(0b110) == -1);
}

TEST_CASE("fidelity and traces") {
  Eigen::MatrixXd hop = Eigen::MatrixXd::Constant(4, 4, 1.0);
  hop.diagonal().setZero();
  XYSector sec = build_single_excitation(hop);
  StateVector f = site_state(sec, 3);
  CHECK(transfer_fidelity(f, 3) == 1.0);
  CHECK(transfer_fidelity(f, 1) == 0.0);
  SiteTrace tr = site_trace(sec, site_state(sec, 0), {0.0, 0.5, 1.0}, 3);
  REQUIRE(tr.fidelity.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(tr.site_probabilities[i].sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tr.fidelity[i] == doctest::Approx(tr.site_probabilities[i](3)));
  }
}
