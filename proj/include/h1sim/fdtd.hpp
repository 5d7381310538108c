#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "h1sim/geometry.hpp"
#include "h1sim/kernels.hpp"
#include "h1sim/records.hpp"

namespace h1sim {

// Gaussian dipole pulse at the cavity center. The envelope width is
// `width_cycles` optical oscillations (FWHM); injection stops exactly after
// five widths.
struct DipoleSource {
  std::array<double, 3> position = {0, 0, 0};  // m, relative to cavity center
  Polarization orientation = Polarization::X;
  double carrier_wavelength = 1.0e-6;  // m
  double width_cycles = 10.0;
  double amplitude = 1.0;

  double width() const { return width_cycles * carrier_wavelength / 2.99792458e8; }
  double end_time() const { return 5.0 * width(); }
  double current(double t) const;
};

struct ProbeSpec {
  std::array<double, 3> position = {0, 0, 0};  // m, relative to cavity center
  int component = 0;                           // 0 Ex, 1 Ey, 2 Ez
};

struct RunParams {
  int resolution = 12;       // cells per lattice constant
  double free_cycles = 300;  // free evolution after source extinction
  double max_free_cycles = 600;
  double courant_safety = 0.95;
  PmlSpec pml;
  int energy_stride = 16;
  bool strict = false;

  static RunParams from_config(const Config& cfg);
};

struct RingdownResult {
  ModeCharacterization mode;
  TimeSeries probe, probe_alt, energy;
  PlaneField plane;     // one cell above the membrane, with H
  PlaneField midplane;  // membrane midplane, E only
  double free_cycles_used = 0;
};

// Time stepping and monitors for one cavity simulation. One instance per
// logical owner; the field update itself is data-parallel inside.
class Simulation {
 public:
  Simulation(const DielectricMap& map, const PmlSpec& pml, double courant_safety = 0.95);

  // One leapfrog step (H then E plus source injection). Returns the interior
  // energy when `sample_energy` is set.
  std::optional<double> step(const DipoleSource* source, bool sample_energy);

  double time() const { return fields_.dt * step_index_; }
  double dt() const { return fields_.dt; }
  long step_index() const { return step_index_; }
  const Dims& dims() const { return fields_.dims; }
  YeeFields& fields() { return fields_; }
  const DielectricMap& map() const { return *map_; }

  double probe_value(const ProbeSpec& p) const;
  // Instantaneous interior energy with E and H half a step apart; a rough
  // diagnostic, the energy monitor samples from step() are the real series.
  double interior_energy();

  // Complex field capture via the quarter-period trick: F = E(t0) +
  // i*exp(gamma_c T/4)*E(t0 + T/4), H re-anchored to the E time grid.
  struct Capture {
    PlaneField plane, midplane;
    double U_ref = 0;           // cycle-averaged interior energy
    double flux = 0;            // outward Poynting flux through the interior box
    double mode_volume_m3 = 0;  // integral eps|E|^2 / max(eps|E|^2)
  };
  Capture capture_complex(double omega, double gamma_c);

  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

  int plane_k() const { return plane_k_; }

 private:
  friend struct SimulationAccess;
  const DielectricMap* map_;
  YeeFields fields_;
  std::vector<PmlBox> boxes_;
  PmlProfiles profiles_;
  int pml_ = 0;
  long step_index_ = 0;
  int plane_k_ = 0;   // record plane, one cell above the slab
  int mid_k_ = 0;     // membrane midplane
  FieldGrid hx_prev_, hy_prev_, hz_prev_;

  struct RealPlanes;
  void extract_planes(RealPlanes* out) const;
};

// Full protocol: excitation, >= free_cycles of ring-down (extended until the
// decay fit residual stabilizes), decay fit, complex capture, mode figures.
RingdownResult run_ringdown(const CavityDesign& design, const RunParams& params,
                            Polarization orientation);

}  // namespace h1sim
