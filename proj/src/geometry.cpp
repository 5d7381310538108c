#include "h1sim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "h1sim/errors.hpp"

namespace h1sim {

void CavityDesign::validate() const {
  if (lattice_constant_a <= 0) throw config_error("design: lattice constant must be > 0");
  if (hole_radius <= 0 || hole_radius >= lattice_constant_a / 2)
    throw config_error("design: hole radius must lie in (0, a/2)");
  if (inner_hole_shift_d < 0 || inner_hole_shift_d > 0.18)
    throw config_error("design: inner hole shift d must lie in [0, 0.18]");
  if (membrane_thickness_h <= 0) throw config_error("design: membrane thickness must be > 0");
  if (slab_index <= 1) throw config_error("design: slab index must be > 1");
  if (lattice_rings < 1) throw config_error("design: need at least one ring of holes");
  if (pml_cells < 4) throw config_error("design: PML needs at least 4 cells");
}

CavityDesign CavityDesign::from_config(const Config& cfg) {
  CavityDesign d;
  d.lattice_constant_a = cfg.get_length("lattice_constant", d.lattice_constant_a);
  d.hole_radius = cfg.get_length("hole_radius", d.hole_radius);
  d.slab_index = cfg.get_number("slab_index", d.slab_index);
  d.membrane_thickness_h = cfg.get_length("membrane_thickness", d.membrane_thickness_h);
  d.inner_hole_shift_d = cfg.get_number("inner_hole_shift", d.inner_hole_shift_d);
  d.lattice_rings = cfg.get_int("lattice_rings", d.lattice_rings);
  if (cfg.has("vertical_padding")) d.vertical_padding = cfg.get_length("vertical_padding");
  d.pml_cells = cfg.get_int("pml_cells", d.pml_cells);
  d.validate();
  return d;
}

std::string CavityDesign::canonical() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "a=%.9e;rh=%.9e;n=%.9e;h=%.9e;d=%.9e;rings=%d;pad=%.9e;pml=%d",
                lattice_constant_a, hole_radius, slab_index, membrane_thickness_h,
                inner_hole_shift_d, lattice_rings, padding(), pml_cells);
  return buf;
}

std::vector<std::array<double, 2>> hole_centers(const CavityDesign& design) {
  design.validate();
  const double a = design.lattice_constant_a;
  const double s3 = std::sqrt(3.0) / 2.0;
  std::vector<std::array<double, 2>> centers;
  const int R = design.lattice_rings;
  for (int m = -R; m <= R; ++m) {
    for (int n = -R; n <= R; ++n) {
      // Hex ring index of lattice site m*a1 + n*a2.
      int ring = (std::abs(m) + std::abs(n) + std::abs(m + n)) / 2;
      if (ring == 0 || ring > R) continue;  // drop the defect site
      double x = (m + 0.5 * n) * a;
      double y = n * s3 * a;
      if (ring == 1) {
        // Nearest neighbours pushed radially outward by d*a; |(x,y)| == a here.
        double scale = 1.0 + design.inner_hole_shift_d;
        x *= scale;
        y *= scale;
      }
      centers.push_back({x, y});
    }
  }
  return centers;
}

namespace {

// Fraction of [z0, z0+dz] covered by [lo, hi].
double overlap_fraction(double z0, double dz, double lo, double hi) {
  double a = std::max(z0, lo);
  double b = std::min(z0 + dz, hi);
  return b > a ? (b - a) / dz : 0.0;
}

}  // namespace

DielectricMap rasterize(const CavityDesign& design, int resolution) {
  design.validate();
  if (resolution < 8)
    throw config_error("rasterize: resolution below 8 cells per lattice constant");

  const double a = design.lattice_constant_a;
  const double cell = a / resolution;
  const double s3 = std::sqrt(3.0) / 2.0;

  // Interior half extents: crystal plus ~1.6a of unpatterned slab before the PML.
  const double margin = 1.6 * a;
  int hx = static_cast<int>(std::ceil((design.lattice_rings * a + margin) / cell));
  int hy = static_cast<int>(std::ceil((design.lattice_rings * s3 * a + margin) / cell));
  int hz = static_cast<int>(
      std::ceil((design.membrane_thickness_h / 2 + design.padding()) / cell));

  Dims dims;
  dims.nx = 2 * (hx + design.pml_cells);
  dims.ny = 2 * (hy + design.pml_cells);
  dims.nz = 2 * (hz + design.pml_cells);

  DielectricMap map;
  map.cell_size = cell;
  map.pml_cells = design.pml_cells;
  map.origin = {dims.nx / 2.0, dims.ny / 2.0, dims.nz / 2.0};
  map.permittivity = ScalarGrid(dims, 1.0);

  const double eps_slab = design.slab_index * design.slab_index;
  const auto holes = hole_centers(design);
  const double rh = design.hole_radius;

  // In-plane slab fraction per column (1 outside holes, 0 inside), with 16x16
  // supersampling on cells that straddle a hole boundary.
  std::vector<double> fxy(std::size_t(dims.nx) * dims.ny, 1.0);
  const double half_diag = cell * 0.7071067811865476;
  const int S = 16;
  for (int i = 0; i < dims.nx; ++i) {
    double cx = (i + 0.5 - map.origin[0]) * cell;
    for (int j = 0; j < dims.ny; ++j) {
      double cy = (j + 0.5 - map.origin[1]) * cell;
      double f = 1.0;
      for (const auto& h : holes) {
        double dx = cx - h[0], dy = cy - h[1];
        double dist = std::sqrt(dx * dx + dy * dy);
        if (dist >= rh + half_diag) continue;
        if (dist <= rh - half_diag) {
          f = 0.0;
          break;
        }
        // Boundary cell: count subsamples outside this hole. Holes never
        // overlap, so at most one hole can cut a given cell.
        int outside = 0;
        for (int sx = 0; sx < S; ++sx) {
          double px = cx + ((sx + 0.5) / S - 0.5) * cell;
          for (int sy = 0; sy < S; ++sy) {
            double py = cy + ((sy + 0.5) / S - 0.5) * cell;
            double ddx = px - h[0], ddy = py - h[1];
            if (ddx * ddx + ddy * ddy > rh * rh) ++outside;
          }
        }
        f = double(outside) / (S * S);
        break;
      }
      fxy[std::size_t(i) * dims.ny + j] = f;
    }
  }

  const double z_lo = -design.membrane_thickness_h / 2;
  const double z_hi = design.membrane_thickness_h / 2;
  for (int k = 0; k < dims.nz; ++k) {
    double z0 = (k - map.origin[2]) * cell;
    double fz = overlap_fraction(z0, cell, z_lo, z_hi);
    if (fz == 0.0) continue;
    for (int i = 0; i < dims.nx; ++i)
      for (int j = 0; j < dims.ny; ++j)
        map.permittivity(i, j, k) =
            1.0 + (eps_slab - 1.0) * fz * fxy[std::size_t(i) * dims.ny + j];
  }
  return map;
}

void save_dielectric_map(const DielectricMap& map, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write '" + path + "'");
  char header[256];
  std::snprintf(header, sizeof header,
                "h1sim dielectric-map v1\ndims %d %d %d\ncell_size %.17e\n"
                "origin %.17e %.17e %.17e\npml_cells %d\ndata float64 little-endian\n",
                map.dims().nx, map.dims().ny, map.dims().nz, map.cell_size,
                map.origin[0], map.origin[1], map.origin[2], map.pml_cells);
  out << header;
  out.write(reinterpret_cast<const char*>(map.permittivity.raw()),
            map.permittivity.data.size() * sizeof(double));
}

DielectricMap load_dielectric_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read '" + path + "'");
  std::string magic;
  std::getline(in, magic);
  if (magic != "h1sim dielectric-map v1")
    throw config_error("'" + path + "' is not a dielectric map dump");
  DielectricMap map;
  Dims dims;
  std::string word;
  in >> word >> dims.nx >> dims.ny >> dims.nz;
  in >> word >> map.cell_size;
  in >> word >> map.origin[0] >> map.origin[1] >> map.origin[2];
  in >> word >> map.pml_cells;
  std::getline(in, word);  // rest of pml line
  std::getline(in, word);  // data line
  map.permittivity = ScalarGrid(dims);
  in.read(reinterpret_cast<char*>(map.permittivity.raw()),
          map.permittivity.data.size() * sizeof(double));
  if (!in) throw config_error("'" + path + "' is truncated");
  return map;
}

}  // namespace h1sim
