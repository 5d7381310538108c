#pragma once

#include <complex>
#include <vector>

#include "h1sim/records.hpp"

namespace h1sim {

// Detector aperture: disc sin(theta) <= NA.
struct Aperture {
  double na = 0.5;
  void validate() const;
};

// Complex far-field amplitude on the (kx, ky) light-cone disc plus the
// upward power density per k bin. Bins outside the cone are exactly zero.
struct FarFieldMap {
  int n = 0;          // FFT grid size (n x n), DC at bin 0
  double dk = 0;      // rad/m per bin
  double k0 = 0;      // 2 pi / lambda
  double lambda = 0;  // m
  Polarization polarization = Polarization::X;
  std::vector<std::complex<double>> ex, ey;
  std::vector<double> power;   // >= 0, engine power units
  double power_up = 0;         // sum over the cone
  double edge_ratio = 0;       // plane-edge field / max, windowing quality

  std::size_t at(int i, int j) const { return std::size_t(i) * n + j; }
  double kx(int i) const { return (i <= n / 2 ? i : i - n) * dk; }
  double ky(int j) const { return (j <= n / 2 ? j : j - n) * dk; }
};

// Spatial Fourier transform of the recorded plane, restricted to the light
// cone. When the plane has no H record, H is synthesized assuming upward
// propagation. Throws in strict mode when the field has not decayed below 1%
// of its maximum at the plane edge.
FarFieldMap near_to_far(const PlaneField& plane, double lambda,
                        int pad_factor = 4, bool strict = false);

// Intensity grid on the sin(theta) unit disc, normalized to max 1; row-major
// npix x npix over [-1, 1]^2, zero outside the disc.
std::vector<double> radiation_pattern(const FarFieldMap& map, int npix = 201);

// eta = upward power within the NA cone / P_ref.
double collection_efficiency(const FarFieldMap& map, const Aperture& ap, double P_ref);

// Overlap K = [sum t*sqrt(phi_H phi_V)]^2 / (sum t*phi_H * sum t*phi_V) with
// phi the upward intensity profile (default) or its square root (amplitude
// convention).
double overlap_K(const FarFieldMap& phi_h, const FarFieldMap& phi_v,
                 const Aperture& ap, bool amplitude_convention = false);

}  // namespace h1sim
