#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "darkbright/operators.hpp"

using namespace darkbright;

namespace {

TransmonParams make_q(double omega, double beta, int levels = 4) {
  TransmonParams p;
  p.omega_ghz = omega;
  p.beta_ghz = beta;
  p.levels = levels;
  return p;
}

DeviceConfig resonant_pair(double omega = 7.8, double beta = -0.23,
                           double g = 0.01) {
  DeviceConfig dev;
  dev.q1 = make_q(omega, beta);
  dev.q2 = make_q(omega, beta);
  dev.g_ghz = g;
  dev.gamma_glob_mhz = 5.0;
  dev.gamma_loc1_mhz = 0.05;
  dev.k_ratio = 1.78;
  return dev;
}

}  // namespace

TEST_CASE("truncated ladder operator") {
  const Matrix a = ladder(4);
  for (int j = 0; j < 3; ++j) {
    CHECK(a(j, j + 1).real() == Catch::Approx(std::sqrt(double(j + 1))));
    CHECK(a(j, j + 1).imag() == 0.0);
  }
  CHECK(a.row(3).norm() == 0.0);
  CHECK(a.col(0).norm() == 0.0);

  // Truncation leaks the canonical commutator only in the top level.
  const Matrix comm = a * a.adjoint() - a.adjoint() * a;
  CHECK(comm(0, 0).real() == Catch::Approx(1.0));
  CHECK(comm(1, 1).real() == Catch::Approx(1.0));
  CHECK(comm(2, 2).real() == Catch::Approx(1.0));
  CHECK(comm(3, 3).real() == Catch::Approx(-3.0));
  CHECK((comm - comm.diagonal().asDiagonal().toDenseMatrix()).norm() ==
        Catch::Approx(0.0).margin(1e-15));

  CHECK_THROWS_AS(ladder(1), validation_error);
}

TEST_CASE("transmon level energies and jump frequencies") {
  const auto p = make_q(7.8, -0.23);
  const Matrix h = transmon_hamiltonian(p);
  CHECK(h(0, 0).real() == Catch::Approx(0.0).margin(1e-15));
  CHECK(h(1, 1).real() == Catch::Approx(7.8).epsilon(1e-13));
  CHECK(h(2, 2).real() == Catch::Approx(15.37).epsilon(1e-13));
  CHECK(h(3, 3).real() == Catch::Approx(22.71).epsilon(1e-13));
  CHECK(h.isDiagonal(1e-15));

  const auto jt = jump_table(CompositeSpace::single(p));
  REQUIRE(jt.records.size() == 3);
  CHECK(jt.records[0].freq_ghz == Catch::Approx(7.80).epsilon(1e-13));
  CHECK(jt.records[1].freq_ghz == Catch::Approx(7.57).epsilon(1e-13));
  CHECK(jt.records[2].freq_ghz == Catch::Approx(7.34).epsilon(1e-13));

  // Harmonic limit.
  const Matrix hh = transmon_hamiltonian(make_q(5.0, 0.0));
  for (int j = 0; j < 4; ++j)
    CHECK(hh(j, j).real() == Catch::Approx(5.0 * j).margin(1e-14));

  CHECK_THROWS_AS(transmon_hamiltonian(make_q(7.8, -0.23, 1)), validation_error);
  CHECK_THROWS_AS(transmon_hamiltonian(make_q(-7.8, -0.23)), validation_error);
  CHECK_THROWS_AS(transmon_hamiltonian(make_q(7.8, 0.23)), validation_error);
}

TEST_CASE("anharmonicity mismatch shifts jump ladders by 7 MHz per step") {
  DeviceConfig dev = resonant_pair();
  dev.q1.beta_ghz = -0.225;
  dev.q2.beta_ghz = -0.232;
  const auto jt = jump_table(dev);
  REQUIRE(jt.records.size() == 6);
  for (int j = 0; j < 3; ++j) {
    const double f1 = jt.records[j].freq_ghz;       // qudit 0, level j
    const double f2 = jt.records[3 + j].freq_ghz;   // qudit 1, level j
    CHECK(f1 - f2 == Catch::Approx(0.007 * j).margin(1e-12));
  }
}

TEST_CASE("jump records sum exactly to the annihilation operator") {
  const DeviceConfig dev = resonant_pair();
  const auto s = device_space(dev);
  const auto jt = jump_table(s);
  for (int a = 0; a < 2; ++a) {
    Matrix sum = Matrix::Zero(s.dim(), s.dim());
    for (const auto& r : jt.records)
      if (r.qudit == a) sum += r.lower;
    CHECK((sum - s.lower(a)).norm() == 0.0);
  }
}

TEST_CASE("composite embedding order: qudit 0 is the slow index") {
  const auto s = CompositeSpace::pair(make_q(7.8, -0.23, 3), make_q(6.0, -0.2, 2));
  REQUIRE(s.dim() == 6);
  // |i1 i2> lives at index i1*2 + i2.
  const Matrix n0 = s.number(0);
  const Matrix n1 = s.number(1);
  CHECK(n0(3, 3).real() == Catch::Approx(1.0));  // |1,1>
  CHECK(n1(3, 3).real() == Catch::Approx(1.0));
  CHECK(n0(4, 4).real() == Catch::Approx(2.0));  // |2,0>
  CHECK(n1(4, 4).real() == Catch::Approx(0.0));
  // lower(1) couples |i1,1> -> |i1,0| without touching i1.
  const Matrix a1 = s.lower(1);
  CHECK(a1(4, 5) == complexd(1.0, 0.0));
  CHECK(a1(0, 3).real() == Catch::Approx(0.0).margin(1e-15));
  CHECK_THROWS_AS(s.embed(2, Matrix::Identity(2, 2)), validation_error);
}

TEST_CASE("single-excitation block splits into bright and dark at +-g") {
  const DeviceConfig dev = resonant_pair(7.8, -0.23, 0.01);
  const auto ls = eigen_spectrum(dev, 1);
  std::vector<double> m1;
  for (size_t i = 0; i < ls.manifold.size(); ++i)
    if (ls.manifold[i] == 1) m1.push_back(ls.energies_ghz(int(i)));
  REQUIRE(m1.size() == 2);
  CHECK(m1[0] == Catch::Approx(7.79).epsilon(1e-12));
  CHECK(m1[1] == Catch::Approx(7.81).epsilon(1e-12));
}

TEST_CASE("antisymmetric two-excitation state sits at 2 omega + beta") {
  const DeviceConfig dev = resonant_pair(7.8, -0.23, 0.01);
  const auto ls = eigen_spectrum(dev, 2);
  double best = 1e9;
  for (size_t i = 0; i < ls.manifold.size(); ++i)
    if (ls.manifold[i] == 2)
      best = std::min(best, std::abs(ls.energies_ghz(int(i)) - 15.37));
  CHECK(best < 1e-9);
}

TEST_CASE("resonant d=4 pair has 20 lines, half of them prohibited") {
  const DeviceConfig dev = resonant_pair(7.8, -0.23, 0.01);
  const auto ls = eigen_spectrum(dev, 3);
  CHECK(ls.transitions.size() == 20);
  int prohibited = 0;
  for (const auto& t : ls.transitions) prohibited += t.prohibited ? 1 : 0;
  CHECK(prohibited == 10);
}

TEST_CASE("named transitions resolve to the collective frequencies") {
  const DeviceConfig dev = resonant_pair(7.8, -0.23, 0.01);
  const auto s = device_space(dev);
  const auto ls = eigen_spectrum(dev, 2);

  const auto f00b = resolve_transition(s, ls, Transition::bright_00B);
  CHECK(f00b.freq_ghz == Catch::Approx(7.81).epsilon(1e-12));
  const auto ge = resolve_transition(s, ls, Transition::ge);
  CHECK(ge.freq_ghz == f00b.freq_ghz);

  const auto ddp = resolve_transition(s, ls, Transition::dark_DDp);
  CHECK(ddp.freq_ghz == Catch::Approx(7.8 - 0.23 + 0.01).epsilon(1e-12));
  CHECK(ddp.freq_ghz - f00b.freq_ghz == Catch::Approx(-0.23).margin(1e-9));

  // Bright dipole out of the ground state is sqrt(2); dark one vanishes.
  const Matrix xeig = ls.states.adjoint() * s.drive_quadrature() * ls.states;
  CHECK(std::abs(xeig(f00b.to_state, 0)) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-10));
  CHECK(std::abs(xeig(ddp.from_state, 0)) < 1e-12);
}

TEST_CASE("dark dipole survives anharmonicity mismatch, dies on detuning") {
  // The single-excitation block is [[w1, g], [g, w2]]; beta never enters it.
  DeviceConfig dev = resonant_pair();
  dev.q1.beta_ghz = -0.225;
  dev.q2.beta_ghz = -0.232;
  {
    const auto s = device_space(dev);
    const auto ls = eigen_spectrum(dev, 1);
    const Matrix xeig = ls.states.adjoint() * s.drive_quadrature() * ls.states;
    const auto ddp_from = [&] {
      double dmin = 1e9;
      int idx = -1;
      for (size_t i = 0; i < ls.manifold.size(); ++i)
        if (ls.manifold[i] == 1 && std::abs(xeig(int(i), 0)) < dmin) {
          dmin = std::abs(xeig(int(i), 0));
          idx = int(i);
        }
      return idx;
    }();
    CHECK(std::abs(xeig(ddp_from, 0)) < 1e-12);
  }
  {
    DeviceConfig det = resonant_pair();
    det.q2.omega_ghz = 7.9;
    const auto s = device_space(det);
    const auto ls = eigen_spectrum(det, 1);
    const Matrix xeig = ls.states.adjoint() * s.drive_quadrature() * ls.states;
    double dmin = 1e9;
    for (size_t i = 0; i < ls.manifold.size(); ++i)
      if (ls.manifold[i] == 1)
        dmin = std::min(dmin, std::abs(xeig(int(i), 0)));
    CHECK(dmin > 1e-3);
  }
}

TEST_CASE("rotating frame removes the drive frequency") {
  const auto p = make_q(7.8, -0.23);
  const auto s = CompositeSpace::single(p);
  DriveSpec d = DriveSpec::none(7.8, 1);
  const Matrix h = rotating_hamiltonian(s, 0.0, d);
  CHECK(std::abs(h(0, 0)) < 1e-14);
  CHECK(std::abs(h(1, 1)) < 1e-12);
  CHECK(h(2, 2).real() == Catch::Approx(two_pi * -0.23).epsilon(1e-12));

  d.amp_mhz[0] = complexd(3.0, -1.0);
  const Matrix hd = rotating_hamiltonian(s, 0.0, d);
  CHECK(hd(1, 0) == (complexd(3.0, -1.0) * mhz_to_rad_per_ns));
  CHECK((hd - hd.adjoint()).norm() < 1e-12);
}

TEST_CASE("rotating hamiltonian stays Hermitian across parameter grid") {
  for (double omega : {2.0, 7.8}) {
    for (double beta : {-0.1, -0.3}) {
      for (double g : {0.001, 0.02}) {
        for (double fd : {omega - 0.4, omega, omega + 0.3}) {
          DeviceConfig dev = resonant_pair(omega, beta, g);
          DriveSpec d = DriveSpec::none(fd, 2);
          d.amp_mhz[0] = complexd(0.3, 0.7);
          d.amp_mhz[1] = complexd(-0.2, 0.1);
          const Matrix h = system_hamiltonian(dev, d);
          const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
          CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
        }
      }
    }
  }
}

TEST_CASE("resolve_transition failure modes") {
  const auto p = make_q(7.8, -0.23);
  const auto s = CompositeSpace::single(p);
  const auto ls = eigen_spectrum(s, 0.0, 2);
  CHECK_THROWS_AS(resolve_transition(s, ls, Transition::dark_DDp),
                  validation_error);
  const auto ef = resolve_transition(s, ls, Transition::ef);
  CHECK(ef.freq_ghz == Catch::Approx(7.8 - 0.23).epsilon(1e-12));

  const auto s2 = CompositeSpace::single(make_q(7.8, -0.23, 2));
  const auto ls2 = eigen_spectrum(s2, 0.0, 1);
  CHECK_THROWS_AS(resolve_transition(s2, ls2, Transition::ef), validation_error);
}

TEST_CASE("device validation") {
  DeviceConfig dev = resonant_pair();
  dev.k_ratio = -1.0;
  CHECK_THROWS_AS(dev.validate(), validation_error);
  dev = resonant_pair();
  dev.g_ghz = 0.0;
  CHECK_THROWS_AS(dev.validate(), validation_error);
  dev = resonant_pair();
  dev.gamma_glob_mhz = 0.0;
  CHECK_THROWS_AS(dev.validate(), validation_error);
  CHECK(resonant_pair().local_weights()[1] ==
        Catch::Approx(std::sqrt(1.78)).epsilon(1e-15));
}

TEST_CASE("eigen_spectrum input checks") {
  const DeviceConfig dev = resonant_pair();
  CHECK_THROWS_AS(eigen_spectrum(dev, 0), validation_error);
  CHECK_THROWS_AS(eigen_spectrum(dev, 7), validation_error);
}
