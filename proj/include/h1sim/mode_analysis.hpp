#pragma once

#include <span>
#include <utility>

#include "h1sim/records.hpp"

namespace h1sim {

struct DecayFit {
  double omega = 0;     // rad/s
  double gamma_c = 0;   // 1/s
  double residual = 0;  // normalized rms misfit of the reconstructed signal
};

// Fits A*exp(-gamma_c t)*cos(omega t + phi) to a single-mode ring-down
// segment via extremum picking and a log-envelope linear fit. Throws
// analysis_error when the series has no usable oscillation or the residual
// exceeds 5% (multi-mode contamination).
DecayFit fit_decay(std::span<const double> t, std::span<const double> v);

inline double quality_factor(double omega, double gamma_c) {
  return omega / (2.0 * gamma_c);
}

// Fp = 3/(4 pi^2) * Q / V with V in (lambda/n)^3 units.
double purcell_max(double Q, double V_cubic_wavelengths);

// Linear fit of the cavity wavelength: lambda = d*0.28um + h*0.69 + 0.82um.
double predicted_wavelength(double d, double h_m);

// P_ref = 2 * Gamma_c * U.
inline double emitted_power(double gamma_c, double U) { return 2.0 * gamma_c * U; }

// Squared in-plane mode amplitude at the dot site, normalized to the cavity
// center: (beta_X, beta_Y). Offsets in meters along the midplane; set
// `amplitude_ratio` for the |E| (non-squared) convention.
std::pair<double, double> beta_factors(const PlaneField& mode_x,
                                       const PlaneField& mode_y,
                                       double offset_x, double offset_y,
                                       bool amplitude_ratio = false);

// In-plane |E|^2 of a midplane record, bilinearly interpolated at (x, y).
double midplane_intensity(const PlaneField& mid, double x, double y);

}  // namespace h1sim
