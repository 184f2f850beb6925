#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "darkbright/common.hpp"
#include "darkbright/constants.hpp"
#include "darkbright/operators.hpp"

namespace darkbright {

enum class BathKind { global, local };

/// Coupling-density model of a reservoir.  `flat` is the default white
/// spectrum; `waveguide` multiplies gamma0 by 1/sqrt(1-(cutoff/omega)^2).
struct SpectralModel {
  enum class Kind { flat, waveguide } kind = Kind::flat;
  double cutoff_ghz = 0.0;
};

/// Rectangular-waveguide coupling enhancement above the cutoff frequency.
inline double spectral_density_waveguide(double omega_ghz, double cutoff_ghz) {
  if (!(cutoff_ghz > 0.0) || !(omega_ghz > cutoff_ghz))
    throw std::domain_error(
        "spectral_density_waveguide: requires omega > cutoff > 0");
  const double r = cutoff_ghz / omega_ghz;
  return 1.0 / std::sqrt(1.0 - r * r);
}

/// One thermal reservoir.  `weights[a]` is the amplitude weight of qudit a in
/// this bath: (1, 1) for the shared waveguide, (1, sqrt(k_ratio)) for the
/// side pin.
struct BathSpec {
  BathKind kind = BathKind::global;
  double temperature_k = 0.0;
  double gamma0_mhz = 0.0;
  std::array<double, 2> weights{1.0, 1.0};
  SpectralModel spectral{};

  void validate() const {
    if (temperature_k < 0.0)
      throw validation_error("BathSpec: temperature_k must be >= 0");
    if (gamma0_mhz < 0.0)
      throw validation_error("BathSpec: gamma0_mhz must be >= 0");
    if (weights[0] < 0.0 || weights[1] < 0.0)
      throw validation_error("BathSpec: weights must be >= 0");
    if (spectral.kind == SpectralModel::Kind::waveguide &&
        !(spectral.cutoff_ghz > 0.0))
      throw validation_error("BathSpec: waveguide spectral model needs a positive cutoff");
  }

  static BathSpec make_global(double t_k, double gamma0_mhz) {
    BathSpec b;
    b.kind = BathKind::global;
    b.temperature_k = t_k;
    b.gamma0_mhz = gamma0_mhz;
    return b;
  }

  static BathSpec make_local(double t_k, double gamma0_mhz, double k_ratio) {
    BathSpec b;
    b.kind = BathKind::local;
    b.temperature_k = t_k;
    b.gamma0_mhz = gamma0_mhz;
    b.weights = {1.0, std::sqrt(k_ratio)};
    return b;
  }
};

/// Thermal downward/upward rate pair at one transition frequency, in MHz:
///   down = (pi gamma0 / 2)(coth(h f / 2 k_B T) + 1) = pi gamma0 (nbar + 1)
///   up   = (pi gamma0 / 2)(coth(h f / 2 k_B T) - 1) = pi gamma0  nbar
/// Evaluated through expm1 so that down/up matches exp(h f / k_B T) to
/// machine precision even deep in the quantum regime; at T = 0 the up rate
/// is exactly zero.
inline std::pair<double, double> gamma_updown(double omega_ghz,
                                              double temperature_k,
                                              double gamma0_mhz) {
  if (!(omega_ghz > 0.0))
    throw std::domain_error("gamma_updown: omega_ghz must be positive");
  if (temperature_k < 0.0)
    throw std::domain_error("gamma_updown: temperature_k must be >= 0");
  if (gamma0_mhz < 0.0)
    throw std::domain_error("gamma_updown: gamma0_mhz must be >= 0");
  const double scale = M_PI * gamma0_mhz;
  if (temperature_k == 0.0) return {scale, 0.0};
  const double x = h_over_kb_k_per_ghz * omega_ghz / temperature_k;
  const double nbar = 1.0 / std::expm1(x);  // expm1 -> inf collapses to 0
  return {scale * (1.0 + nbar), scale * nbar};
}

/// Which frequency pairs of the Bloch-Redfield tensor survive.  `cutoff`
/// keeps pairs closer than delta_ghz (delta < 0 picks 100x the largest bath
/// rate constant); `full_secular` keeps only degenerate pairs; `none` keeps
/// everything.
struct SecularPolicy {
  enum class Mode { cutoff, full_secular, none } mode = Mode::cutoff;
  double delta_ghz = -1.0;

  static SecularPolicy defaults() { return {}; }
  static SecularPolicy full() { return {Mode::full_secular, 0.0}; }
  static SecularPolicy keep_all() { return {Mode::none, 0.0}; }

  double resolve_delta(const std::vector<BathSpec>& baths) const {
    if (delta_ghz >= 0.0) return delta_ghz;
    double gmax = 0.0;
    for (const auto& b : baths) gmax = std::max(gmax, b.gamma0_mhz);
    return 100.0 * gmax * 1e-3;
  }
};

/// Pairwise dissipator coefficients over all jump records:
///   down(a,b) = sum_baths w_a w_b [Gamma_down(f_a) + Gamma_down(f_b)]
/// and likewise for up, with the secular mask applied symmetrically.
struct RateMatrix {
  RealMatrix down_mhz;
  RealMatrix up_mhz;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> active;
};

inline double bath_gamma0_at(const BathSpec& b, double omega_ghz) {
  if (b.spectral.kind == SpectralModel::Kind::waveguide)
    return b.gamma0_mhz *
           spectral_density_waveguide(omega_ghz, b.spectral.cutoff_ghz);
  return b.gamma0_mhz;
}

inline RateMatrix rate_matrix(const JumpTable& jumps,
                              const std::vector<BathSpec>& baths,
                              const SecularPolicy& policy = {}) {
  for (const auto& b : baths) b.validate();
  const int n = int(jumps.records.size());
  RateMatrix rm;
  rm.down_mhz = RealMatrix::Zero(n, n);
  rm.up_mhz = RealMatrix::Zero(n, n);
  rm.active.setConstant(n, n, false);

  const double delta = policy.resolve_delta(baths);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const double fa = jumps.records[a].freq_ghz;
      const double fb = jumps.records[b].freq_ghz;
      bool keep = true;
      switch (policy.mode) {
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
      rm.active(a, b) = rm.active(b, a) = true;
      double down = 0.0, up = 0.0;
      for (const auto& bath : baths) {
        const double wa = bath.weights[jumps.records[a].qudit];
        const double wb = bath.weights[jumps.records[b].qudit];
        if (wa == 0.0 || wb == 0.0) continue;
        const auto [da, ua] =
            gamma_updown(fa, bath.temperature_k, bath_gamma0_at(bath, fa));
        const auto [db, ub] =
            gamma_updown(fb, bath.temperature_k, bath_gamma0_at(bath, fb));
        down += wa * wb * (da + db);
        up += wa * wb * (ua + ub);
      }
      rm.down_mhz(a, b) = rm.down_mhz(b, a) = down;
      rm.up_mhz(a, b) = rm.up_mhz(b, a) = up;
    }
  }
  return rm;
}

}  // namespace darkbright
