#pragma once

#include "darkbright/operators.hpp"

namespace darkbright {

/// 7.8 GHz transmon pair: slightly unequal anharmonicities, 5 MHz waveguide
/// rate, 50 kHz side-pin coupling on qubit 1 with asymmetry 1.78.
inline DeviceConfig experiment_device() {
  DeviceConfig dev;
  dev.q1 = TransmonParams{7.8, -0.225, 4};
  dev.q2 = TransmonParams{7.8, -0.232, 4};
  dev.g_ghz = 0.010;
  dev.gamma_glob_mhz = 5.0;
  dev.gamma_loc1_mhz = 0.05;
  dev.k_ratio = 1.78;
  return dev;
}

/// 2 GHz pair aimed at millikelvin-range local thermometry.  Equal
/// anharmonicities keep the dark sector fully decoupled from the waveguide,
/// so the 1 kHz side pin is the only channel feeding it.
inline DeviceConfig millikelvin_device() {
  DeviceConfig dev;
  dev.q1 = TransmonParams{2.0, -0.23, 4};
  dev.q2 = TransmonParams{2.0, -0.23, 4};
  dev.g_ghz = 0.010;
  dev.gamma_glob_mhz = 5.0;
  dev.gamma_loc1_mhz = 1e-3;
  dev.k_ratio = 1.78;
  return dev;
}

}  // namespace darkbright
