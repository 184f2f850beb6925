#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "darkbright/liouvillian.hpp"
#include "darkbright/operators.hpp"
#include "darkbright/rates.hpp"

using namespace darkbright;

namespace {

TransmonParams make_q(double omega, double beta, int levels = 4) {
  TransmonParams p;
  p.omega_ghz = omega;
  p.beta_ghz = beta;
  p.levels = levels;
  return p;
}

DeviceConfig symmetric_pair(double gamma_loc = 0.05, double k = 1.78) {
  DeviceConfig dev;
  dev.q1 = make_q(7.8, -0.23);
  dev.q2 = make_q(7.8, -0.23);
  dev.g_ghz = 0.01;
  dev.gamma_glob_mhz = 5.0;
  dev.gamma_loc1_mhz = gamma_loc;
  dev.k_ratio = k;
  return dev;
}

Matrix random_density(int n, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = complexd(gauss(rng), gauss(rng));
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return rho;
}

Matrix gibbs_state(const TransmonParams& p, double t_k) {
  const auto e = transmon_levels(p);
  Matrix rho = Matrix::Zero(p.levels, p.levels);
  double z = 0.0;
  for (int j = 0; j < p.levels; ++j) {
    const double w = std::exp(-h_over_kb_k_per_ghz * e[j] / t_k);
    rho(j, j) = w;
    z += w;
  }
  return rho / z;
}

/// Undriven single-qudit generator with a global bath at t_k.
Superoperator single_qudit_liouvillian(const TransmonParams& p, double t_k,
                                       double gamma0_mhz,
                                       SecularPolicy policy = {}) {
  const auto s = CompositeSpace::single(p);
  const auto jt = jump_table(s);
  const auto rm = rate_matrix(jt, {BathSpec::make_global(t_k, gamma0_mhz)}, policy);
  const Matrix h =
      rotating_hamiltonian(s, 0.0, DriveSpec::none(p.omega_ghz, 1));
  return build_liouvillian(h, rm, jt);
}

}  // namespace

TEST_CASE("vec and unvec roundtrip with column stacking") {
  Matrix m(2, 2);
  m << complexd(1, 2), complexd(3, 4), complexd(5, 6), complexd(7, 8);
  const Vector v = vec(m);
  CHECK(v(0) == complexd(1, 2));
  CHECK(v(1) == complexd(5, 6));  // column major
  CHECK(v(2) == complexd(3, 4));
  CHECK((unvec(v, 2) - m).norm() == 0.0);
  CHECK_THROWS_AS(unvec(Vector::Zero(3), 2), validation_error);
}

TEST_CASE("vectorized product identity vec(A rho B) = (B^T kron A) vec(rho)") {
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto rand_mat = [&](int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = complexd(gauss(rng), gauss(rng));
    return m;
  };
  for (int n : {2, 3, 5}) {
    const Matrix a = rand_mat(n), b = rand_mat(n), rho = rand_mat(n);
    const Vector lhs = vec(a * rho * b);
    const Vector rhs =
        Matrix(Eigen::kroneckerProduct(b.transpose(), a)) * vec(rho);
    CHECK((lhs - rhs).norm() < 1e-12 * lhs.norm());
  }
}

TEST_CASE("amplitude damping spectrum") {
  const auto l = single_qudit_liouvillian(make_q(7.8, -0.23, 2), 0.0, 5.0);
  const double gamma = two_pi * 5.0 * 1e-3;  // 1/ns
  Eigen::ComplexEigenSolver<Matrix> ces(l.mat);
  std::vector<double> re(4), im(4);
  std::vector<complexd> ev(4);
  for (int i = 0; i < 4; ++i) ev[i] = ces.eigenvalues()(i);
  std::sort(ev.begin(), ev.end(),
            [](complexd a, complexd b) { return a.real() < b.real(); });
  CHECK(std::abs(ev[0] - complexd(-gamma, 0)) < 1e-12);
  CHECK(std::abs(ev[1].real() + gamma / 2) < 1e-12);
  CHECK(std::abs(ev[2].real() + gamma / 2) < 1e-12);
  CHECK(std::abs(ev[3]) < 1e-12);
}

TEST_CASE("detuned damping shifts the coherence eigenvalues by +-i Delta") {
  const auto p = make_q(7.8, -0.23, 2);
  const auto s = CompositeSpace::single(p);
  const auto jt = jump_table(s);
  const auto rm = rate_matrix(jt, {BathSpec::make_global(0.0, 5.0)});
  const double delta_ghz = 0.002;
  const Matrix h =
      rotating_hamiltonian(s, 0.0, DriveSpec::none(p.omega_ghz - delta_ghz, 1));
  const auto l = build_liouvillian(h, rm, jt);
  const double gamma = two_pi * 5.0 * 1e-3;
  const double delta = two_pi * delta_ghz;
  Eigen::ComplexEigenSolver<Matrix> ces(l.mat);
  int matched = 0;
  for (int i = 0; i < 4; ++i) {
    const complexd ev = ces.eigenvalues()(i);
    if (std::abs(ev - complexd(-gamma / 2, delta)) < 1e-12) ++matched;
    if (std::abs(ev - complexd(-gamma / 2, -delta)) < 1e-12) ++matched;
  }
  CHECK(matched == 2);
}

TEST_CASE("generator preserves trace and hermiticity on random states") {
  const DeviceConfig dev = symmetric_pair();
  const auto s = device_space(dev);
  const auto jt = jump_table(s);
  const auto rm = rate_matrix(
      jt, {BathSpec::make_global(0.095, 5.0),
           BathSpec::make_local(0.3, 0.05, 1.78)});
  DriveSpec drive = DriveSpec::none(7.81, 2);
  drive.amp_mhz[0] = drive.amp_mhz[1] = complexd(0.05, 0.0);
  const auto l =
      build_liouvillian(rotating_hamiltonian(s, dev.g_ghz, drive), rm, jt);

  // Identity row-vector is a left null vector.
  const Matrix id = Matrix::Identity(16, 16);
  CHECK((vec(id).adjoint() * l.mat).norm() < 1e-10);

  std::mt19937 rng(12345);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix rho = random_density(16, rng);
    const Matrix drho = apply(l, rho);
    CHECK(std::abs(drho.trace()) <= 1e-12);
    CHECK((drho - drho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("single qudit relaxes to the truncated Gibbs state") {
  const auto p = make_q(7.8, -0.23);
  for (double t_k : {0.02, 0.095, 0.3}) {
    const auto l = single_qudit_liouvillian(p, t_k, 5.0);
    const Matrix target = gibbs_state(p, t_k);

    // The Gibbs state is an exact fixed point even with cross terms kept.
    CHECK((l.mat * vec(target)).norm() < 1e-10);

    const auto rep = steady_state(l);
    CHECK(rep.null_space_dim == 1);
    CHECK_FALSE(rep.degenerate);
    CHECK(rep.residual <= 1e-10);
    CHECK(trace_distance(rep.rho, target) <= 1e-8);
  }
}

TEST_CASE("cross terms kept by the partial secular policy do not move Gibbs") {
  const auto p = make_q(7.8, -0.23);
  const auto l_all =
      single_qudit_liouvillian(p, 0.095, 5.0, SecularPolicy::keep_all());
  const auto l_full =
      single_qudit_liouvillian(p, 0.095, 5.0, SecularPolicy::full());
  // The two generators genuinely differ (coherence sector)...
  CHECK((l_all.mat - l_full.mat).norm() > 1e-6);
  // ...but share the thermal fixed point.
  const Matrix target = gibbs_state(p, 0.095);
  CHECK((l_all.mat * vec(target)).norm() < 1e-10);
  CHECK((l_full.mat * vec(target)).norm() < 1e-10);
}

TEST_CASE("zero temperature, no drive: ground state, exactly") {
  const DeviceConfig dev = symmetric_pair();
  const auto s = device_space(dev);
  const auto jt = jump_table(s);
  const auto rm = rate_matrix(
      jt, {BathSpec::make_global(0.0, 5.0), BathSpec::make_local(0.0, 0.05, 1.78)});
  const auto l = build_liouvillian(
      rotating_hamiltonian(s, dev.g_ghz, DriveSpec::none(7.8, 2)), rm, jt);
  const auto rep = steady_state(l);
  Matrix ground = Matrix::Zero(16, 16);
  ground(0, 0) = 1.0;
  CHECK(trace_distance(rep.rho, ground) <= 1e-9);
}

TEST_CASE("steady-state residual stays tiny for a driven asymmetric device") {
  DeviceConfig dev = symmetric_pair();
  dev.q1.beta_ghz = -0.225;
  dev.q2.beta_ghz = -0.232;
  const auto s = device_space(dev);
  const auto jt = jump_table(s);
  const auto rm = rate_matrix(
      jt, {BathSpec::make_global(0.095, 5.0),
           BathSpec::make_local(0.3, 0.05, 1.78)});
  DriveSpec drive = DriveSpec::none(7.81, 2);
  drive.amp_mhz[0] = drive.amp_mhz[1] = complexd(0.02, 0.0);
  const auto l =
      build_liouvillian(rotating_hamiltonian(s, dev.g_ghz, drive), rm, jt);
  const auto rep = steady_state(l);
  CHECK(rep.residual <= 1e-10);
  CHECK(rep.null_space_dim == 1);
  CHECK(rep.min_eigenvalue > -1e-10);
  CHECK(std::abs(rep.rho.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("protected dark sector makes the kernel degenerate") {
  // Symmetric device, global bath only: the antisymmetric sector decouples
  // even under a symmetric drive, so the kernel is multi-dimensional and the
  // physical branch is the one grown from |00><00|.
  const DeviceConfig dev = symmetric_pair();
  const auto s = device_space(dev);
  const auto jt = jump_table(s);
  const auto rm = rate_matrix(jt, {BathSpec::make_global(0.3, 5.0)});
  DriveSpec drive = DriveSpec::none(7.81, 2);
  drive.amp_mhz[0] = drive.amp_mhz[1] = complexd(0.01, 0.0);
  const auto l =
      build_liouvillian(rotating_hamiltonian(s, dev.g_ghz, drive), rm, jt);

  const auto rep = steady_state(l);
  CHECK(rep.degenerate);
  CHECK(rep.null_space_dim >= 2);
  CHECK(rep.residual <= 1e-8);

  // Dark population of the physical branch is exactly zero.
  const auto ls = eigen_spectrum(dev, 1);
  const Matrix xeig = ls.states.adjoint() * s.drive_quadrature() * ls.states;
  int dark = -1;
  double dmin = 1e9;
  for (size_t i = 0; i < ls.manifold.size(); ++i)
    if (ls.manifold[i] == 1 && std::abs(xeig(int(i), 0)) < dmin) {
      dmin = std::abs(xeig(int(i), 0));
      dark = int(i);
    }
  const Vector dvec = ls.states.col(dark);
  const double p_dark = (dvec.adjoint() * rep.rho * dvec)(0, 0).real();
  CHECK(p_dark <= 1e-8);

  // Switching on the asymmetric local bath at the same temperature makes the
  // kernel unique and populates the dark state.
  const auto rm2 = rate_matrix(
      jt, {BathSpec::make_global(0.3, 5.0), BathSpec::make_local(0.3, 0.05, 1.78)});
  const auto l2 =
      build_liouvillian(rotating_hamiltonian(s, dev.g_ghz, drive), rm2, jt);
  const auto rep2 = steady_state(l2);
  CHECK_FALSE(rep2.degenerate);
  CHECK(rep2.null_space_dim == 1);
  const double p_dark2 = (dvec.adjoint() * rep2.rho * dvec)(0, 0).real();
  CHECK(p_dark2 > 1e-4);
}

TEST_CASE("pure Hamiltonian generator: projection keeps the prepared state") {
  const auto p = make_q(7.8, -0.23, 2);
  const auto s = CompositeSpace::single(p);
  const auto jt = jump_table(s);
  RateMatrix rm;
  rm.down_mhz = RealMatrix::Zero(1, 1);
  rm.up_mhz = RealMatrix::Zero(1, 1);
  rm.active.setConstant(1, 1, true);
  const Matrix h = rotating_hamiltonian(s, 0.0, DriveSpec::none(7.0, 1));
  const auto l = build_liouvillian(h, rm, jt);
  const auto rep = steady_state(l);
  CHECK(rep.degenerate);
  Matrix ground = Matrix::Zero(2, 2);
  ground(0, 0) = 1.0;
  CHECK(trace_distance(rep.rho, ground) < 1e-10);
}

TEST_CASE("build_liouvillian validates its inputs") {
  const auto p = make_q(7.8, -0.23, 2);
  const auto s = CompositeSpace::single(p);
  const auto jt = jump_table(s);
  const auto rm = rate_matrix(jt, {BathSpec::make_global(0.0, 5.0)});
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = complexd(0.0, 1.0);  // not Hermitian
  CHECK_THROWS_AS(build_liouvillian(h, rm, jt), validation_error);
  CHECK_THROWS_AS(build_liouvillian(Matrix::Zero(3, 3), rm, jt),
                  validation_error);
}

TEST_CASE("apply checks dimensions") {
  const auto l = single_qudit_liouvillian(make_q(7.8, -0.23, 2), 0.0, 5.0);
  const Matrix wrong = Matrix::Zero(3, 3);
  CHECK_THROWS_AS(darkbright::apply(l, wrong), validation_error);
}
