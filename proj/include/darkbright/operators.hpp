#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "darkbright/common.hpp"
#include "darkbright/constants.hpp"

namespace darkbright {

/// One transmon truncated to `levels` ladder states.
///
/// `beta_ghz` is the measurable anharmonicity f_ef - f_ge (negative for a
/// transmon).  Level energies are e_j = omega*j + beta*j*(j-1)/2, so the
/// j -> j+1 transition sits at omega + beta*j.
struct TransmonParams {
  double omega_ghz = 0.0;
  double beta_ghz = 0.0;
  int levels = 4;

  void validate() const {
    if (levels < 2)
      throw validation_error("TransmonParams: levels must be at least 2");
    if (!(omega_ghz > 0.0))
      throw validation_error("TransmonParams: omega_ghz must be positive");
    if (!(beta_ghz <= 0.0))
      throw validation_error("TransmonParams: beta_ghz must be <= 0");
  }
};

/// Two coupled transmons with a shared waveguide bath and a side-pin bath.
///
/// gamma_loc1_mhz is the side-pin rate constant on qubit 1; qubit 2 couples
/// with gamma_loc2 = k_ratio * gamma_loc1 (amplitude weight sqrt(k_ratio)).
struct DeviceConfig {
  TransmonParams q1{};
  TransmonParams q2{};
  double g_ghz = 0.0;
  double gamma_glob_mhz = 0.0;
  double gamma_loc1_mhz = 0.0;
  double k_ratio = 1.0;

  void validate() const {
    q1.validate();
    q2.validate();
    if (!(g_ghz > 0.0))
      throw validation_error("DeviceConfig: g_ghz must be positive");
    if (!(gamma_glob_mhz > 0.0))
      throw validation_error("DeviceConfig: gamma_glob_mhz must be positive");
    if (gamma_loc1_mhz < 0.0)
      throw validation_error("DeviceConfig: gamma_loc1_mhz must be >= 0");
    if (!(k_ratio > 0.0))
      throw validation_error("DeviceConfig: k_ratio must be positive");
  }

  std::array<double, 2> local_weights() const {
    return {1.0, std::sqrt(k_ratio)};
  }
};

/// Truncated annihilation operator on a d-level ladder.
inline Matrix ladder(int d) {
  if (d < 2) throw validation_error("ladder: dimension must be at least 2");
  Matrix a = Matrix::Zero(d, d);
  for (int j = 0; j + 1 < d; ++j) a(j, j + 1) = std::sqrt(double(j + 1));
  return a;
}

/// Ladder energies e_j in GHz, j = 0 .. levels-1.
inline std::vector<double> transmon_levels(const TransmonParams& p) {
  p.validate();
  std::vector<double> e(p.levels);
  for (int j = 0; j < p.levels; ++j)
    e[j] = p.omega_ghz * j + 0.5 * p.beta_ghz * j * (j - 1);
  return e;
}

/// Free transmon Hamiltonian, diagonal in the ladder basis, in GHz.
inline Matrix transmon_hamiltonian(const TransmonParams& p) {
  const auto e = transmon_levels(p);
  Matrix h = Matrix::Zero(p.levels, p.levels);
  for (int j = 0; j < p.levels; ++j) h(j, j) = e[j];
  return h;
}

/// Hilbert space of one or two transmon qudits.  For two qudits the basis
/// index is i1 * d2 + i2 (qudit 0 is the slow index), so basis state 0 is
/// |0...0> and operators embed by Kronecker products in that order.
class CompositeSpace {
 public:
  explicit CompositeSpace(std::vector<TransmonParams> qudits)
      : qudits_(std::move(qudits)) {
    if (qudits_.empty() || qudits_.size() > 2)
      throw validation_error("CompositeSpace: one or two qudits supported");
    dim_ = 1;
    for (const auto& q : qudits_) {
      q.validate();
      dim_ *= q.levels;
    }
  }

  static CompositeSpace single(const TransmonParams& q) {
    return CompositeSpace({q});
  }
  static CompositeSpace pair(const TransmonParams& q1,
                             const TransmonParams& q2) {
    return CompositeSpace({q1, q2});
  }

  int dim() const { return dim_; }
  int count() const { return int(qudits_.size()); }
  const TransmonParams& qudit(int a) const { return qudits_.at(a); }

  /// Kronecker-embed a local operator of qudit a into the full space.
  Matrix embed(int a, const Matrix& local) const {
    if (a < 0 || a >= count())
      throw validation_error("CompositeSpace::embed: qudit index out of range");
    if (local.rows() != qudits_[a].levels || local.cols() != qudits_[a].levels)
      throw validation_error("CompositeSpace::embed: operator dimension mismatch");
    if (count() == 1) return local;
    const int d0 = qudits_[0].levels, d1 = qudits_[1].levels;
    Matrix full = Matrix::Zero(dim_, dim_);
    if (a == 0) {
      for (int i = 0; i < d0; ++i)
        for (int j = 0; j < d0; ++j)
          if (local(i, j) != 0.0)
            full.block(i * d1, j * d1, d1, d1) =
                local(i, j) * Matrix::Identity(d1, d1);
    } else {
      for (int i = 0; i < d0; ++i) full.block(i * d1, i * d1, d1, d1) = local;
    }
    return full;
  }

  Matrix lower(int a) const { return embed(a, ladder(qudit(a).levels)); }

  Matrix number(int a) const {
    const int d = qudit(a).levels;
    Matrix n = Matrix::Zero(d, d);
    for (int j = 0; j < d; ++j) n(j, j) = j;
    return embed(a, n);
  }

  Matrix total_number() const {
    Matrix n = Matrix::Zero(dim_, dim_);
    for (int a = 0; a < count(); ++a) n += number(a);
    return n;
  }

  /// Probe quadrature sum_a (a_a + a_a^dag), the dipole operator the
  /// waveguide couples to.
  Matrix drive_quadrature() const {
    Matrix x = Matrix::Zero(dim_, dim_);
    for (int a = 0; a < count(); ++a) {
      const Matrix low = lower(a);
      x += low + low.adjoint();
    }
    return x;
  }

 private:
  std::vector<TransmonParams> qudits_;
  int dim_ = 0;
};

inline CompositeSpace device_space(const DeviceConfig& dev) {
  dev.validate();
  return CompositeSpace::pair(dev.q1, dev.q2);
}

/// Lab-frame Hamiltonian (no drive) in GHz, including the exchange coupling
/// g (a1^dag a2 + a1 a2^dag) when two qudits are present.
inline Matrix lab_hamiltonian_ghz(const CompositeSpace& s, double g_ghz) {
  Matrix h = Matrix::Zero(s.dim(), s.dim());
  for (int a = 0; a < s.count(); ++a)
    h += s.embed(a, transmon_hamiltonian(s.qudit(a)));
  if (s.count() == 2 && g_ghz != 0.0) {
    const Matrix a1 = s.lower(0), a2 = s.lower(1);
    h += g_ghz * (a1.adjoint() * a2 + a1 * a2.adjoint());
  }
  return h;
}

enum class DriveOrigin { waveguide_probe, side_pin, explicit_amps };

/// Coherent tone at omega_drive; amp_mhz[a] is the complex amplitude E_a in
/// the rotating-frame term E_a a_a^dag + conj(E_a) a_a, quoted in MHz.
/// For waveguide probes a_in keeps the input amplitude (angular internal
/// normalization) so transmission can be formed later.
struct DriveSpec {
  double omega_drive_ghz = 0.0;
  std::vector<complexd> amp_mhz;
  DriveOrigin origin = DriveOrigin::explicit_amps;
  double a_in = 0.0;

  static DriveSpec none(double omega_drive_ghz, int count) {
    DriveSpec d;
    d.omega_drive_ghz = omega_drive_ghz;
    d.amp_mhz.assign(count, complexd(0.0, 0.0));
    return d;
  }
};

/// Full system Hamiltonian in the frame rotating at the drive frequency,
/// in angular units (rad/ns).  Counter-rotating terms are dropped, which is
/// what makes the result time independent.
inline Matrix rotating_hamiltonian(const CompositeSpace& s, double g_ghz,
                                   const DriveSpec& drive) {
  if (!(drive.omega_drive_ghz > 0.0))
    throw validation_error("rotating_hamiltonian: drive frequency must be positive");
  if (int(drive.amp_mhz.size()) != s.count())
    throw validation_error("rotating_hamiltonian: one drive amplitude per qudit required");
  for (const auto& e : drive.amp_mhz)
    if (!std::isfinite(e.real()) || !std::isfinite(e.imag()))
      throw validation_error("rotating_hamiltonian: drive amplitude must be finite");

  Matrix h = lab_hamiltonian_ghz(s, g_ghz);
  h -= drive.omega_drive_ghz * s.total_number();
  h *= ghz_to_rad_per_ns;
  for (int a = 0; a < s.count(); ++a) {
    const complexd e_rad = drive.amp_mhz[a] * mhz_to_rad_per_ns;
    if (e_rad == complexd(0.0, 0.0)) continue;
    const Matrix low = s.lower(a);
    h += e_rad * low.adjoint() + std::conj(e_rad) * low;
  }
  return h;
}

inline Matrix system_hamiltonian(const DeviceConfig& dev, const DriveSpec& drive) {
  return rotating_hamiltonian(device_space(dev), dev.g_ghz, drive);
}

/// One lowering jump |j><j+1| of one qudit, embedded in the full space.
struct JumpRecord {
  int qudit = 0;
  int level = 0;        // j of |j><j+1|
  double freq_ghz = 0;  // e_{j+1} - e_j
  Matrix lower;
};

struct JumpTable {
  int dim = 0;
  std::vector<JumpRecord> records;
};

/// All single-step lowering operators sigma_{j,j+1} = sqrt(j+1)|j><j+1| per
/// qudit, with their transition frequencies.  Summing the records of one
/// qudit reproduces its embedded annihilation operator exactly.
inline JumpTable jump_table(const CompositeSpace& s) {
  JumpTable t;
  t.dim = s.dim();
  for (int a = 0; a < s.count(); ++a) {
    const auto e = transmon_levels(s.qudit(a));
    const int d = s.qudit(a).levels;
    for (int j = 0; j + 1 < d; ++j) {
      Matrix local = Matrix::Zero(d, d);
      local(j, j + 1) = std::sqrt(double(j + 1));
      t.records.push_back({a, j, e[j + 1] - e[j], s.embed(a, local)});
    }
  }
  return t;
}

inline JumpTable jump_table(const DeviceConfig& dev) {
  return jump_table(device_space(dev));
}

/// A dipole transition between adjacent excitation manifolds.
struct TransitionLine {
  int from_state = 0;
  int to_state = 0;
  int from_manifold = 0;
  int to_manifold = 0;
  double freq_ghz = 0.0;
  double dipole = 0.0;
  bool prohibited = false;
};

/// Eigenstructure of the undriven system resolved into total-excitation
/// manifolds, with dipole weights of all adjacent-manifold transitions.
struct LevelSet {
  RealVector energies_ghz;
  Matrix states;  // orthonormal eigenvectors, one per column
  std::vector<int> manifold;
  std::vector<TransitionLine> transitions;
};

inline LevelSet eigen_spectrum(const CompositeSpace& s, double g_ghz,
                               int max_excitation) {
  int cap = 0;
  for (int a = 0; a < s.count(); ++a) cap += s.qudit(a).levels - 1;
  if (max_excitation < 1 || max_excitation > cap)
    throw validation_error("eigen_spectrum: max_excitation outside truncation");

  const Matrix h = lab_hamiltonian_ghz(s, g_ghz);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success)
    throw solver_error("eigen_spectrum: eigendecomposition failed");

  LevelSet ls;
  ls.energies_ghz = es.eigenvalues();
  ls.states = es.eigenvectors();

  // Excitation number is conserved, so each eigenvector lives in one
  // manifold; classify by where its weight sits.
  const Matrix ntot = s.total_number();
  const int n = s.dim();
  ls.manifold.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<double> w(cap + 1, 0.0);
    for (int b = 0; b < n; ++b) {
      const int m = int(std::lround(ntot(b, b).real()));
      w[m] += std::norm(ls.states(b, i));
    }
    ls.manifold[i] =
        int(std::max_element(w.begin(), w.end()) - w.begin());
  }

  const Matrix xeig =
      ls.states.adjoint() * s.drive_quadrature() * ls.states;
  for (int m = 0; m < max_excitation; ++m) {
    std::vector<TransitionLine> group;
    double dmax = 0.0;
    for (int i = 0; i < n; ++i) {
      if (ls.manifold[i] != m) continue;
      for (int j = 0; j < n; ++j) {
        if (ls.manifold[j] != m + 1) continue;
        TransitionLine tl;
        tl.from_state = i;
        tl.to_state = j;
        tl.from_manifold = m;
        tl.to_manifold = m + 1;
        tl.freq_ghz = ls.energies_ghz(j) - ls.energies_ghz(i);
        tl.dipole = std::abs(xeig(j, i));
        dmax = std::max(dmax, tl.dipole);
        group.push_back(tl);
      }
    }
    for (auto& tl : group) tl.prohibited = tl.dipole < 1e-6 * dmax;
    ls.transitions.insert(ls.transitions.end(), group.begin(), group.end());
  }
  return ls;
}

inline LevelSet eigen_spectrum(const DeviceConfig& dev, int max_excitation) {
  return eigen_spectrum(device_space(dev), dev.g_ghz, max_excitation);
}

enum class Transition { ge, ef, bright_00B, dark_DDp };

struct ResolvedTransition {
  double freq_ghz = 0.0;
  int from_state = 0;
  int to_state = 0;
};

/// Map a named transition onto concrete eigenstates.  ge / bright_00B pick
/// the strongest dipole line out of the ground state; ef continues from its
/// excited state; dark_DDp starts from the weakest-dipole single-excitation
/// state, which requires two coupled qudits to exist at all.
inline ResolvedTransition resolve_transition(const CompositeSpace& s,
                                             const LevelSet& ls,
                                             Transition which) {
  const Matrix xeig = ls.states.adjoint() * s.drive_quadrature() * ls.states;
  const int n = int(ls.manifold.size());

  std::vector<int> m1, m2;
  for (int i = 0; i < n; ++i) {
    if (ls.manifold[i] == 1) m1.push_back(i);
    if (ls.manifold[i] == 2) m2.push_back(i);
  }
  if (m1.empty())
    throw validation_error("resolve_transition: no single-excitation states in level set");

  auto strongest_from = [&](int from, const std::vector<int>& into) {
    int best = -1;
    double bestd = -1.0;
    for (int j : into) {
      const double d = std::abs(xeig(j, from));
      if (d > bestd) {
        bestd = d;
        best = j;
      }
    }
    if (best < 0)
      throw validation_error("resolve_transition: target manifold is empty");
    return best;
  };

  const int bright = strongest_from(0, m1);

  switch (which) {
    case Transition::ge:
    case Transition::bright_00B: {
      return {ls.energies_ghz(bright) - ls.energies_ghz(0), 0, bright};
    }
    case Transition::ef: {
      if (m2.empty())
        throw validation_error("resolve_transition: ef requires two excitation manifolds");
      const int f = strongest_from(bright, m2);
      return {ls.energies_ghz(f) - ls.energies_ghz(bright), bright, f};
    }
    case Transition::dark_DDp: {
      if (m1.size() < 2)
        throw validation_error("resolve_transition: dark transition requires two coupled qudits");
      int dark = -1;
      double dmin = std::numeric_limits<double>::infinity();
      for (int i : m1) {
        const double d = std::abs(xeig(i, 0));
        if (d < dmin) {
          dmin = d;
          dark = i;
        }
      }
      if (m2.empty())
        throw validation_error("resolve_transition: dark transition requires two excitation manifolds");
      const int dp = strongest_from(dark, m2);
      return {ls.energies_ghz(dp) - ls.energies_ghz(dark), dark, dp};
    }
  }
  throw validation_error("resolve_transition: unknown transition kind");
}

}  // namespace darkbright
