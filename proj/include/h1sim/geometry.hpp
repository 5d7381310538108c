#pragma once

#include <array>
#include <string>
#include <vector>

#include "h1sim/config.hpp"
#include "h1sim/grid.hpp"

namespace h1sim {

// H1 membrane cavity: triangular hole lattice with the central hole removed
// and the six nearest holes pushed radially outward by d*a.
struct CavityDesign {
  double lattice_constant_a = 270e-9;   // m
  double hole_radius = 80e-9;           // m
  double slab_index = 3.46;
  double membrane_thickness_h = 0.26e-6;  // m
  double inner_hole_shift_d = 0.0;      // in units of a, [0, 0.18]
  int lattice_rings = 7;
  double vertical_padding = -1.0;       // m; <0 means default 3*a
  int pml_cells = 10;

  double padding() const {
    return vertical_padding > 0 ? vertical_padding : 3.0 * lattice_constant_a;
  }
  void validate() const;

  static CavityDesign from_config(const Config& cfg);
  // Canonical serialization used for cache keys.
  std::string canonical() const;
};

struct DielectricMap {
  ScalarGrid permittivity;  // relative epsilon per cell, cell centers at (i+1/2)*cell
  double cell_size = 0;     // m, cubic cells
  // Cavity center in grid coordinates (units of cell_size, measured from the
  // low corner of the grid). Integer-valued by construction.
  std::array<double, 3> origin = {0, 0, 0};
  int pml_cells = 0;

  const Dims& dims() const { return permittivity.dims; }
};

// All hole centers (m, cavity-centered coordinates). Central hole removed,
// six inner holes displaced radially outward by d*a.
std::vector<std::array<double, 2>> hole_centers(const CavityDesign& design);

// Rasterize onto a cubic grid with `resolution` cells per lattice constant.
// Boundary cells get volume-fraction averaged epsilon (subpixel smoothing).
DielectricMap rasterize(const CavityDesign& design, int resolution);

// Flat binary dump with a self-describing text header, and its inverse.
void save_dielectric_map(const DielectricMap& map, const std::string& path);
DielectricMap load_dielectric_map(const std::string& path);

}  // namespace h1sim
