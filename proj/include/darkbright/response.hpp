#pragma once

#include <atomic>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "darkbright/liouvillian.hpp"
#include "darkbright/operators.hpp"
#include "darkbright/rates.hpp"
#include "darkbright/util.hpp"

namespace darkbright {

/// Ordinary-frequency rate constant in MHz -> angular rate in rad/ns.
inline double angular_rate(double gamma_mhz) {
  return two_pi * 1e-3 * gamma_mhz;
}

/// Default weak-probe amplitude, gamma_glob/50 in angular units.
inline double default_probe_a_in(double gamma_glob_mhz) {
  return angular_rate(gamma_glob_mhz) / 50.0;
}

/// Symmetric waveguide probe: every qudit is driven with the same real
/// amplitude E = sqrt(gamma_ang/2) a_in, the input-output normalization that
/// makes a resonant two-level scatterer extinguish the transmission exactly.
inline DriveSpec waveguide_probe(const CompositeSpace& s, double gamma_glob_mhz,
                                 double omega_ghz, double a_in) {
  if (!(gamma_glob_mhz > 0.0))
    throw validation_error("waveguide_probe: gamma_glob_mhz must be positive");
  const double e_mhz =
      std::sqrt(angular_rate(gamma_glob_mhz) / 2.0) * a_in / mhz_to_rad_per_ns;
  DriveSpec d;
  d.omega_drive_ghz = omega_ghz;
  d.origin = DriveOrigin::waveguide_probe;
  d.a_in = a_in;
  d.amp_mhz.assign(s.count(), complexd(e_mhz, 0.0));
  return d;
}

/// Side-pin drive: amplitudes follow the pin couplings, E2/E1 = sqrt(k_ratio).
inline DriveSpec side_pin_drive(const CompositeSpace& s, double gamma_loc1_mhz,
                                double k_ratio, double omega_ghz, double a_pin) {
  if (!(gamma_loc1_mhz > 0.0) || !(k_ratio > 0.0))
    throw validation_error("side_pin_drive: pin rates must be positive");
  const double e1_mhz =
      std::sqrt(angular_rate(gamma_loc1_mhz) / 2.0) * a_pin / mhz_to_rad_per_ns;
  DriveSpec d;
  d.omega_drive_ghz = omega_ghz;
  d.origin = DriveOrigin::side_pin;
  d.amp_mhz.assign(s.count(), complexd(0.0, 0.0));
  d.amp_mhz[0] = e1_mhz;
  if (s.count() > 1) d.amp_mhz[1] = e1_mhz * std::sqrt(k_ratio);
  return d;
}

/// Room-temperature attenuation model: drive strength D from generator power.
struct PowerCalibration {
  double calibration = 1.0;
};

inline double drive_strength(const PowerCalibration& cal, double power_dbm) {
  return cal.calibration * std::sqrt(std::pow(10.0, power_dbm / 10.0));
}

struct CalibratedDrive {
  DriveSpec drive;
  double strength_d = 0.0;
  double rabi_mhz = 0.0;  // conventional on-resonance calibration 2 sqrt(gamma) D
};

/// Hamiltonian drive amplitude from generator power:
/// |E| = sqrt(gamma omega_d / 2 omega_q) D.  The reported Rabi number keeps
/// the usual calibration convention 2 sqrt(gamma) D, which differs from
/// 2|E| on resonance by sqrt(2).
inline CalibratedDrive drive_from_power(double power_dbm,
                                        const PowerCalibration& cal,
                                        double gamma_mhz,
                                        double omega_drive_ghz,
                                        double omega_qubit_ghz, int count = 1,
                                        int qudit = 0) {
  if (!(gamma_mhz > 0.0))
    throw validation_error("drive_from_power: gamma_mhz must be positive");
  if (!(omega_drive_ghz > 0.0) || !(omega_qubit_ghz > 0.0))
    throw validation_error("drive_from_power: frequencies must be positive");
  if (qudit < 0 || qudit >= count)
    throw validation_error("drive_from_power: qudit index out of range");
  CalibratedDrive out;
  out.strength_d = drive_strength(cal, power_dbm);
  const double e_mhz = std::sqrt(gamma_mhz * omega_drive_ghz /
                                 (2.0 * omega_qubit_ghz)) *
                       out.strength_d;
  out.rabi_mhz = 2.0 * std::sqrt(gamma_mhz) * out.strength_d;
  out.drive.omega_drive_ghz = omega_drive_ghz;
  out.drive.origin = DriveOrigin::explicit_amps;
  out.drive.amp_mhz.assign(count, complexd(0.0, 0.0));
  out.drive.amp_mhz[qudit] = e_mhz;
  return out;
}

/// Coherent forward transmission t = 1 - i sum_a sqrt(gamma_ang/2) <a_a>/a_in.
inline complexd transmission_amplitude(const Matrix& rho,
                                       const CompositeSpace& s,
                                       double gamma_glob_mhz,
                                       const DriveSpec& drive) {
  if (drive.origin != DriveOrigin::waveguide_probe || drive.a_in == 0.0)
    throw validation_error(
        "transmission_amplitude: undefined without a waveguide probe");
  complexd acc(0.0, 0.0);
  for (int a = 0; a < s.count(); ++a)
    acc += std::sqrt(angular_rate(gamma_glob_mhz) / 2.0) *
           (s.lower(a) * rho).trace();
  return 1.0 - imag_unit * acc / drive.a_in;
}

/// Bath temperatures of one evaluation point.
struct BathTemps {
  double t_glob_k = 0.0;
  double t_loc_k = 0.0;
};

/// Which reservoirs exist in a model (temperatures come per solve).
struct BathLayout {
  bool global_enabled = true;
  bool local_enabled = true;
};

/// Steady-state transmission machinery for one device and bath layout.
///
/// Because every pairwise rate splits as w_a w_b (Gamma_a + Gamma_b), the
/// dissipator groups into per-record superoperators
///   S_a = w_a sum_b(active) w_b (K_ab + K_ba)
/// cached once per bath flavour; a temperature point then costs a handful of
/// axpys plus one LU solve instead of a full rebuild.
class TransmissionModel {
 public:
  TransmissionModel(const DeviceConfig& dev, BathLayout layout = {},
                    SecularPolicy policy = {})
      : space_(device_space(dev)),
        g_ghz_(dev.g_ghz),
        gamma_glob_mhz_(dev.gamma_glob_mhz),
        policy_(policy) {
    dev.validate();
    std::vector<BathSpec> baths;
    if (layout.global_enabled)
      baths.push_back(BathSpec::make_global(0.0, dev.gamma_glob_mhz));
    if (layout.local_enabled && dev.gamma_loc1_mhz > 0.0)
      baths.push_back(
          BathSpec::make_local(0.0, dev.gamma_loc1_mhz, dev.k_ratio));
    init(baths);
  }

  /// Single-transmon variant (calibration insets, criterion experiments).
  TransmissionModel(const TransmonParams& q, double gamma_glob_mhz,
                    double gamma_loc_mhz, BathLayout layout = {},
                    SecularPolicy policy = {})
      : space_(CompositeSpace::single(q)),
        g_ghz_(0.0),
        gamma_glob_mhz_(gamma_glob_mhz),
        policy_(policy) {
    if (!(gamma_glob_mhz > 0.0))
      throw validation_error("TransmissionModel: gamma_glob_mhz must be positive");
    std::vector<BathSpec> baths;
    if (layout.global_enabled)
      baths.push_back(BathSpec::make_global(0.0, gamma_glob_mhz));
    if (layout.local_enabled && gamma_loc_mhz > 0.0) {
      BathSpec loc = BathSpec::make_local(0.0, gamma_loc_mhz, 1.0);
      baths.push_back(loc);
    }
    init(baths);
  }

  const CompositeSpace& space() const { return space_; }
  const JumpTable& jumps() const { return jumps_; }
  double gamma_glob_mhz() const { return gamma_glob_mhz_; }
  double g_ghz() const { return g_ghz_; }
  const SecularPolicy& policy() const { return policy_; }
  const LevelSet& spectrum() const { return spectrum_; }

  ResolvedTransition resolve(Transition which) const {
    return resolve_transition(space_, spectrum_, which);
  }

  DriveSpec probe(double omega_ghz, double a_in) const {
    return waveguide_probe(space_, gamma_glob_mhz_, omega_ghz, a_in);
  }

  /// Generator at given drive and temperatures, from the cached structure.
  Superoperator liouvillian(const DriveSpec& drive,
                            const BathTemps& temps) const {
    Superoperator l;
    l.hilbert_dim = space_.dim();
    l.mat = hamiltonian_superop(rotating_hamiltonian(space_, g_ghz_, drive));
    for (const auto& bath : baths_) {
      const double t_k =
          bath.kind == BathKind::global ? temps.t_glob_k : temps.t_loc_k;
      for (size_t a = 0; a < jumps_.records.size(); ++a) {
        const auto [down, up] = gamma_updown(jumps_.records[a].freq_ghz, t_k,
                                             bath.gamma0_mhz);
        if (down != 0.0)
          l.mat += (down * rate_mhz_to_per_ns) * bath.s_down[a];
        if (up != 0.0) l.mat += (up * rate_mhz_to_per_ns) * bath.s_up[a];
      }
    }
    return l;
  }

  SteadyStateReport steady(const DriveSpec& drive, const BathTemps& temps,
                           const SteadyStateOptions& opts = fast_options()) const {
    const Superoperator l = liouvillian(drive, temps);
    SteadyStateReport rep = steady_state(l, opts);
    solves_.fetch_add(1, std::memory_order_relaxed);
    if (rep.degenerate) degenerate_solves_.fetch_add(1, std::memory_order_relaxed);
    return rep;
  }

  complexd transmission(double probe_ghz, double a_in, const BathTemps& temps,
                        const SteadyStateOptions& opts = fast_options()) const {
    const DriveSpec drive = probe(probe_ghz, a_in);
    const SteadyStateReport rep = steady(drive, temps, opts);
    return transmission_amplitude(rep.rho, space_, gamma_glob_mhz_, drive);
  }

  /// Sweep-interior solves skip the SVD diagnostics; the residual check in
  /// steady_state still escalates to the full rank/projection path on having
  /// anything to complain about.
  static SteadyStateOptions fast_options() {
    SteadyStateOptions o;
    o.compute_rank = false;
    return o;
  }

  long solve_count() const { return solves_.load(); }
  long degenerate_count() const { return degenerate_solves_.load(); }

  /// Plain one-shot assembly (no caching), for cross-checks: must agree with
  /// liouvillian() entrywise.
  Superoperator liouvillian_direct(const DriveSpec& drive,
                                   const BathTemps& temps) const {
    std::vector<BathSpec> baths;
    for (const auto& b : baths_) {
      BathSpec spec;
      spec.kind = b.kind;
      spec.temperature_k =
          b.kind == BathKind::global ? temps.t_glob_k : temps.t_loc_k;
      spec.gamma0_mhz = b.gamma0_mhz;
      spec.weights = b.weights;
      baths.push_back(spec);
    }
    const RateMatrix rm = rate_matrix(jumps_, baths, policy_);
    return build_liouvillian(rotating_hamiltonian(space_, g_ghz_, drive), rm,
                             jumps_);
  }

 private:
  struct BathCache {
    BathKind kind;
    double gamma0_mhz = 0.0;
    std::array<double, 2> weights{1.0, 1.0};
    std::vector<Matrix> s_down;  // per jump record
    std::vector<Matrix> s_up;
  };

  void init(const std::vector<BathSpec>& baths) {
    jumps_ = jump_table(space_);
    int cap = 0;
    for (int a = 0; a < space_.count(); ++a) cap += space_.qudit(a).levels - 1;
    spectrum_ = eigen_spectrum(space_, g_ghz_, std::min(3, cap));
    const int m = int(jumps_.records.size());
    std::vector<BathSpec> probe_baths = baths;
    const double delta = policy_.resolve_delta(probe_baths);

    for (const auto& spec : baths) {
      spec.validate();
      if (spec.spectral.kind != SpectralModel::Kind::flat)
        throw validation_error(
            "TransmissionModel: only flat spectral baths are cached; use build_liouvillian directly");
      BathCache cache;
      cache.kind = spec.kind;
      cache.gamma0_mhz = spec.gamma0_mhz;
      cache.weights = spec.weights;
      cache.s_down.resize(m);
      cache.s_up.resize(m);
      const Eigen::Index nn = Eigen::Index(space_.dim()) * space_.dim();
      for (int a = 0; a < m; ++a) {
        Matrix sd = Matrix::Zero(nn, nn);
        Matrix su = Matrix::Zero(nn, nn);
        const double wa = spec.weights[jumps_.records[a].qudit];
        for (int b = 0; b < m; ++b) {
          const double fa = jumps_.records[a].freq_ghz;
          const double fb = jumps_.records[b].freq_ghz;
          bool keep = true;
          switch (policy_.mode) {
            case SecularPolicy::Mode::cutoff:
              keep = std::abs(fa - fb) <= delta;
              break;
            case SecularPolicy::Mode::full_secular:
              keep = std::abs(fa - fb) <= 1e-12;
              break;
            case SecularPolicy::Mode::none:
              keep = true;
              break;
          }
          if (!keep) continue;
          const double wb = spec.weights[jumps_.records[b].qudit];
          if (wa * wb == 0.0) continue;
          const Matrix& sa = jumps_.records[a].lower;
          const Matrix& sb = jumps_.records[b].lower;
          sd += (wa * wb) * (dissipator_superop(sa, sb) +
                             dissipator_superop(sb, sa));
          su += (wa * wb) * (dissipator_superop(sa.adjoint(), sb.adjoint()) +
                             dissipator_superop(sb.adjoint(), sa.adjoint()));
        }
        cache.s_down[a] = std::move(sd);
        cache.s_up[a] = std::move(su);
      }
      baths_.push_back(std::move(cache));
    }
  }

  CompositeSpace space_;
  double g_ghz_ = 0.0;
  double gamma_glob_mhz_ = 0.0;
  SecularPolicy policy_;
  JumpTable jumps_;
  LevelSet spectrum_;
  std::vector<BathCache> baths_;
  mutable std::atomic<long> solves_{0};
  mutable std::atomic<long> degenerate_solves_{0};
};

struct TracePoint {
  double probe_ghz = 0.0;
  complexd t;
};

struct TransmissionTrace {
  std::vector<TracePoint> points;
};

/// Transmission over a probe grid; the rotating frame is rebuilt per point.
/// Points run in parallel but land at their grid index, so the trace is
/// identical for any worker count.
inline TransmissionTrace probe_sweep(const TransmissionModel& model,
                                     const std::vector<double>& grid_ghz,
                                     double a_in, const BathTemps& temps) {
  for (size_t i = 1; i < grid_ghz.size(); ++i)
    if (!(grid_ghz[i] > grid_ghz[i - 1]))
      throw validation_error("probe_sweep: grid must be strictly increasing");
  TransmissionTrace trace;
  trace.points.resize(grid_ghz.size());
  parallel_for(int(grid_ghz.size()), [&](int i) {
    try {
      trace.points[i] = {grid_ghz[i],
                         model.transmission(grid_ghz[i], a_in, temps)};
    } catch (const solver_error& e) {
      throw solver_error(std::string(e.what()) + " at probe frequency " +
                         std::to_string(grid_ghz[i]) + " GHz");
    }
  });
  return trace;
}

}  // namespace darkbright
