#pragma once

#include <array>
#include <vector>

#include "h1sim/grid.hpp"

namespace h1sim {

// Yee state in normalized units: H stores eta0*H so E and H share one scale,
// and the update coefficients are plain Courant numbers.
struct YeeFields {
  Dims dims;
  double dx = 0;  // m
  double dt = 0;  // s
  FieldGrid ex, ey, ez, hx, hy, hz;
  // c*dt/(dx*eps) at the Ex/Ey/Ez positions.
  FieldGrid cex, cey, cez;
  float ch = 0;  // c*dt/dx

  void allocate(Dims d) {
    dims = d;
    for (FieldGrid* g : {&ex, &ey, &ez, &hx, &hy, &hz, &cex, &cey, &cez}) *g = FieldGrid(d);
  }
};

// Split-field PML: per-axis damping factors, electric parts at integer
// positions along the damping axis, magnetic parts at half positions.
struct PmlSpec {
  int thickness_cells = 10;
  int grading_order = 3;
  double target_reflection = 1e-6;  // sets sigma_max
  double sigma_scale = 1.0;
};

struct PmlProfiles {
  // [axis][position]: da = (1-s)/(1+s), db = 1/(1+s) with s = sigma*dt/2.
  std::array<std::vector<float>, 3> eda, edb, hda, hdb;
};

PmlProfiles make_pml_profiles(const Dims& dims, double dx, double dt, const PmlSpec& spec);

// One face slab of the PML shell with its own split subfield storage.
struct PmlBox {
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0, k0 = 0, k1 = 0;  // half-open cell range
  Dims bdims;
  FieldGrid exy, exz, eyx, eyz, ezx, ezy;
  FieldGrid hxy, hxz, hyx, hyz, hzx, hzy;

  void allocate();
};

// Splits the PML shell (thickness p on all six sides) into six disjoint boxes.
std::vector<PmlBox> make_pml_boxes(const Dims& dims, int p);

// Production kernels: plain Yee update over the interior, split-field update
// inside the PML boxes, OpenMP over the slowest axis. With p == 0 the whole
// domain is plain Yee with PEC walls.
void update_h(YeeFields& f, std::vector<PmlBox>& boxes, const PmlProfiles& prof, int p);
void update_e(YeeFields& f, std::vector<PmlBox>& boxes, const PmlProfiles& prof, int p);

// Serial reference: the same physics as one uniform split-field sweep over
// the full domain, no region specialization, no threading. Kept for testing.
struct ReferenceStepper {
  YeeFields* f = nullptr;
  PmlProfiles prof;
  FieldGrid exy, exz, eyx, eyz, ezx, ezy, hxy, hxz, hyx, hyz, hzx, hzy;

  ReferenceStepper(YeeFields& fields, const PmlSpec& spec);
  void step_h();
  void step_e();
};

// Electromagnetic energy over [lo, hi) cells at integer time: E is the live
// field, the magnetic contribution averages the H values before and after the
// surrounding H update. Per-row partial sums in fixed order keep the result
// independent of the thread count.
double field_energy(const YeeFields& f, const FieldGrid& hx_prev, const FieldGrid& hy_prev,
                    const FieldGrid& hz_prev, std::array<int, 3> lo, std::array<int, 3> hi);

// True if any field value is non-finite.
bool fields_corrupt(const YeeFields& f);

}  // namespace h1sim
