#pragma once

namespace darkbright {

inline constexpr double two_pi = 6.283185307179586476925286766559;

// CODATA 2018 exact values: h = 6.62607015e-34 J s, k_B = 1.380649e-23 J/K.
// Quotient expressed in kelvin per gigahertz of ordinary frequency.
inline constexpr double h_over_kb_k_per_ghz = 6.62607015e-34 / 1.380649e-23 * 1e9;

// Interface units are ordinary frequencies (GHz for transitions and couplings,
// MHz for rate constants and drive amplitudes) and kelvin for temperatures.
// Dynamics run in angular units, rad/ns.  Frequencies convert with 2*pi;
// rate *constants* gamma0 convert with 1e-3 only, because the pi is already
// part of the thermal rate formula: a gamma0 of x MHz decays at T=0 with
// total energy rate 2*pi*x*1e-3 per ns.
inline constexpr double ghz_to_rad_per_ns = two_pi;
inline constexpr double mhz_to_rad_per_ns = two_pi * 1e-3;
inline constexpr double rate_mhz_to_per_ns = 1e-3;

}  // namespace darkbright
