// Timing comparison of the serial reference stepper against the OpenMP
// production kernels on a uniform dielectric block.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstring>

#include "h1sim/kernels.hpp"

using namespace h1sim;
using clk = std::chrono::steady_clock;

namespace {

void fill_fields(YeeFields& f) {
  f.dx = 20e-9;
  f.dt = 0.95 * f.dx / (2.99792458e8 * 1.7320508);
  f.ch = float(2.99792458e8 * f.dt / f.dx);
  for (FieldGrid* g : {&f.cex, &f.cey, &f.cez})
    for (float& v : g->data) v = f.ch / 4.0f;
  // deterministic seed field
  for (std::size_t q = 0; q < f.ex.data.size(); ++q)
    f.ex.data[q] = float((q * 2654435761u % 1000) / 1000.0 - 0.5);
}

double mcells_per_s(std::size_t cells, int steps, double seconds) {
  return cells * double(steps) / seconds / 1e6;
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 96;
  int steps = argc > 2 ? std::atoi(argv[2]) : 40;
  int pml = 8;
  Dims dims{n, n, n};

  std::printf("grid %d^3, %d steps, pml %d, omp max threads %d\n\n", n, steps, pml,
              omp_get_max_threads());

  PmlSpec spec;
  spec.thickness_cells = pml;

  // Serial reference
  {
    YeeFields f;
    f.allocate(dims);
    fill_fields(f);
    ReferenceStepper ref(f, spec);
    auto t0 = clk::now();
    for (int s = 0; s < steps; ++s) {
      ref.step_h();
      ref.step_e();
    }
    double dtb = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("reference (serial, uniform split field): %7.1f Mcell/s  (%.2f s)\n",
                mcells_per_s(dims.size(), steps, dtb), dtb);
  }

  // Production kernels at 1..max threads
  const int max_threads = omp_get_max_threads();
  for (int threads = 1; threads <= max_threads; threads *= 2) {
    omp_set_num_threads(threads);
    YeeFields f;
    f.allocate(dims);
    fill_fields(f);
    auto prof = make_pml_profiles(dims, f.dx, f.dt, spec);
    auto boxes = make_pml_boxes(dims, pml);
    auto t0 = clk::now();
    for (int s = 0; s < steps; ++s) {
      update_h(f, boxes, prof, pml);
      update_e(f, boxes, prof, pml);
    }
    double dtb = std::chrono::duration<double>(clk::now() - t0).count();
    std::printf("production (%d thread%s):                 %7.1f Mcell/s  (%.2f s)\n", threads,
                threads > 1 ? "s" : " ", mcells_per_s(dims.size(), steps, dtb), dtb);
  }
  return 0;
}
// (temporary diagnostic entry point removed)
