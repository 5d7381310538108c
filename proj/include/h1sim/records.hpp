#pragma once

#include <complex>
#include <string>
#include <vector>

namespace h1sim {

enum class Polarization { X, Y };
inline char pol_char(Polarization p) { return p == Polarization::X ? 'X' : 'Y'; }

struct TimeSeries {
  std::vector<double> t;  // s
  std::vector<double> v;
};

// Complex transverse fields sampled on a horizontal plane, PML excluded.
// Values live on the Yee component positions; x0/y0 give the position of the
// (i=0, j=0) cell corner relative to the cavity axis, in meters.
struct PlaneField {
  int nx = 0, ny = 0;
  double dx = 0;      // m
  double x0 = 0, y0 = 0;
  double z = 0;       // m, relative to the membrane midplane
  double omega = 0;   // rad/s of the complexified mode
  std::vector<std::complex<double>> ex, ey;  // size nx*ny
  std::vector<std::complex<double>> hx, hy;  // may be empty (midplane record)

  std::size_t at(int i, int j) const { return std::size_t(i) * ny + j; }
};

// Complex fields on the six faces of the interior box, reduced to the
// outward Poynting flux at analysis time.
struct BoxFluxRecord {
  double flux = 0;  // outward power, engine units
};

struct ModeCharacterization {
  Polarization polarization = Polarization::X;
  double lambda = 0;        // m
  double gamma_c = 0;       // 1/s, field decay rate
  double quality_factor = 0;
  double mode_volume = 0;   // (lambda/n)^3 units
  double purcell_max = 0;
  double fit_residual = 0;
  double energy_ref = 0;    // cycle averaged interior energy at capture
  double emitted_power = 0; // 2*gamma_c*energy_ref
  double poynting_flux = 0; // closed-box flux oracle value
};

}  // namespace h1sim
