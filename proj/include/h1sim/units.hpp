#pragma once

namespace h1sim {

// Physical constants (SI).
inline constexpr double c0 = 2.99792458e8;        // m/s
inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double electron_volt = 1.602176634e-19;  // J
inline constexpr double pi = 3.14159265358979323846;

// Angular frequency of a photon of energy E (joules).
inline double omega_from_energy(double E_joule) { return E_joule / hbar; }

inline double micro_ev_to_joule(double ueV) { return ueV * 1e-6 * electron_volt; }

}  // namespace h1sim
