#include "h1sim/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace h1sim {

namespace {

inline int clampi(int v, int lo, int hi) { return std::max(lo, std::min(v, hi)); }

// Polynomial-graded PML damping rate at position u (cells, may be half).
double sigma_at(double u, int n, int p, double sigma_max, int order) {
  double depth = 0;
  if (u < p)
    depth = p - u;
  else if (u > n - 1 - p)
    depth = u - (n - 1 - p);
  if (depth <= 0) return 0.0;
  return sigma_max * std::pow(depth / p, order);
}

}  // namespace

PmlProfiles make_pml_profiles(const Dims& dims, double dx, double dt, const PmlSpec& spec) {
  PmlProfiles prof;
  const int p = spec.thickness_cells;
  const double c = 2.99792458e8;
  const double L = std::max(p, 1) * dx;
  const double sigma_max =
      spec.sigma_scale * (-(spec.grading_order + 1) * std::log(spec.target_reflection) * c / (2.0 * L));
  const int n[3] = {dims.nx, dims.ny, dims.nz};
  for (int ax = 0; ax < 3; ++ax) {
    prof.eda[ax].resize(n[ax]);
    prof.edb[ax].resize(n[ax]);
    prof.hda[ax].resize(n[ax]);
    prof.hdb[ax].resize(n[ax]);
    for (int i = 0; i < n[ax]; ++i) {
      double se = p > 0 ? sigma_at(i, n[ax], p, sigma_max, spec.grading_order) * dt / 2 : 0.0;
      double sh = p > 0 ? sigma_at(i + 0.5, n[ax], p, sigma_max, spec.grading_order) * dt / 2 : 0.0;
      prof.eda[ax][i] = float((1 - se) / (1 + se));
      prof.edb[ax][i] = float(1 / (1 + se));
      prof.hda[ax][i] = float((1 - sh) / (1 + sh));
      prof.hdb[ax][i] = float(1 / (1 + sh));
    }
  }
  return prof;
}

void PmlBox::allocate() {
  bdims = Dims{i1 - i0, j1 - j0, k1 - k0};
  for (FieldGrid* g : {&exy, &exz, &eyx, &eyz, &ezx, &ezy, &hxy, &hxz, &hyx, &hyz, &hzx, &hzy})
    *g = FieldGrid(bdims);
}

std::vector<PmlBox> make_pml_boxes(const Dims& d, int p) {
  std::vector<PmlBox> boxes;
  if (p <= 0) return boxes;
  auto add = [&](int i0, int i1, int j0, int j1, int k0, int k1) {
    PmlBox b;
    b.i0 = i0; b.i1 = i1; b.j0 = j0; b.j1 = j1; b.k0 = k0; b.k1 = k1;
    b.allocate();
    boxes.push_back(std::move(b));
  };
  add(0, d.nx, 0, d.ny, 0, p);                    // z low
  add(0, d.nx, 0, d.ny, d.nz - p, d.nz);          // z high
  add(0, d.nx, 0, p, p, d.nz - p);                // y low
  add(0, d.nx, d.ny - p, d.ny, p, d.nz - p);      // y high
  add(0, p, p, d.ny - p, p, d.nz - p);            // x low
  add(d.nx - p, d.nx, p, d.ny - p, p, d.nz - p);  // x high
  return boxes;
}

namespace {

// Plain Yee updates over a cell range, clamped to each component's valid
// stencil range. Tangential E on the outer walls is never touched (PEC).
void yee_e_range(YeeFields& f, int i0, int i1, int j0, int j1, int k0, int k1) {
  const Dims& d = f.dims;
  const long dj = d.nz, di = (long)d.ny * d.nz;
  float* __restrict ex = f.ex.raw();
  float* __restrict ey = f.ey.raw();
  float* __restrict ez = f.ez.raw();
  const float* __restrict hx = f.hx.raw();
  const float* __restrict hy = f.hy.raw();
  const float* __restrict hz = f.hz.raw();
  const float* __restrict cx = f.cex.raw();
  const float* __restrict cy = f.cey.raw();
  const float* __restrict cz = f.cez.raw();

  {  // Ex: i in [0,nx-1), j in [1,ny-1), k in [1,nz-1)
    int a0 = clampi(i0, 0, d.nx - 1), a1 = clampi(i1, 0, d.nx - 1);
    int b0 = clampi(j0, 1, d.ny - 1), b1 = clampi(j1, 1, d.ny - 1);
    int c0 = clampi(k0, 1, d.nz - 1), c1 = clampi(k1, 1, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = b0; j < b1; ++j) {
        long q = i * di + j * dj;
        for (int k = c0; k < c1; ++k) {
          long o = q + k;
          ex[o] += cx[o] * ((hz[o] - hz[o - dj]) - (hy[o] - hy[o - 1]));
        }
      }
  }
  {  // Ey: i in [1,nx-1), j in [0,ny-1), k in [1,nz-1)
    int a0 = clampi(i0, 1, d.nx - 1), a1 = clampi(i1, 1, d.nx - 1);
    int b0 = clampi(j0, 0, d.ny - 1), b1 = clampi(j1, 0, d.ny - 1);
    int c0 = clampi(k0, 1, d.nz - 1), c1 = clampi(k1, 1, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = b0; j < b1; ++j) {
        long q = i * di + j * dj;
        for (int k = c0; k < c1; ++k) {
          long o = q + k;
          ey[o] += cy[o] * ((hx[o] - hx[o - 1]) - (hz[o] - hz[o - di]));
        }
      }
  }
  {  // Ez: i in [1,nx-1), j in [1,ny-1), k in [0,nz-1)
    int a0 = clampi(i0, 1, d.nx - 1), a1 = clampi(i1, 1, d.nx - 1);
    int b0 = clampi(j0, 1, d.ny - 1), b1 = clampi(j1, 1, d.ny - 1);
    int c0 = clampi(k0, 0, d.nz - 1), c1 = clampi(k1, 0, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = b0; j < b1; ++j) {
        long q = i * di + j * dj;
        for (int k = c0; k < c1; ++k) {
          long o = q + k;
          ez[o] += cz[o] * ((hy[o] - hy[o - di]) - (hx[o] - hx[o - dj]));
        }
      }
  }
}

void yee_h_range(YeeFields& f, int i0, int i1, int j0, int j1, int k0, int k1) {
  const Dims& d = f.dims;
  const long dj = d.nz, di = (long)d.ny * d.nz;
  const float* __restrict ex = f.ex.raw();
  const float* __restrict ey = f.ey.raw();
  const float* __restrict ez = f.ez.raw();
  float* __restrict hx = f.hx.raw();
  float* __restrict hy = f.hy.raw();
  float* __restrict hz = f.hz.raw();
  const float ch = f.ch;

  {  // Hx: i full, j in [0,ny-1), k in [0,nz-1)
    int a0 = clampi(i0, 0, d.nx), a1 = clampi(i1, 0, d.nx);
    int b0 = clampi(j0, 0, d.ny - 1), b1 = clampi(j1, 0, d.ny - 1);
    int c0 = clampi(k0, 0, d.nz - 1), c1 = clampi(k1, 0, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = b0; j < b1; ++j) {
        long q = i * di + j * dj;
        for (int k = c0; k < c1; ++k) {
          long o = q + k;
          hx[o] += ch * ((ey[o + 1] - ey[o]) - (ez[o + dj] - ez[o]));
        }
      }
  }
  {  // Hy: i in [0,nx-1), j full, k in [0,nz-1)
    int a0 = clampi(i0, 0, d.nx - 1), a1 = clampi(i1, 0, d.nx - 1);
    int b0 = clampi(j0, 0, d.ny), b1 = clampi(j1, 0, d.ny);
    int c0 = clampi(k0, 0, d.nz - 1), c1 = clampi(k1, 0, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = b0; j < b1; ++j) {
        long q = i * di + j * dj;
        for (int k = c0; k < c1; ++k) {
          long o = q + k;
          hy[o] += ch * ((ez[o + di] - ez[o]) - (ex[o + 1] - ex[o]));
        }
      }
  }
  {  // Hz: i in [0,nx-1), j in [0,ny-1), k full
    int a0 = clampi(i0, 0, d.nx - 1), a1 = clampi(i1, 0, d.nx - 1);
    int b0 = clampi(j0, 0, d.ny - 1), b1 = clampi(j1, 0, d.ny - 1);
    int c0 = clampi(k0, 0, d.nz), c1 = clampi(k1, 0, d.nz);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = b0; j < b1; ++j) {
        long q = i * di + j * dj;
        for (int k = c0; k < c1; ++k) {
          long o = q + k;
          hz[o] += ch * ((ex[o + dj] - ex[o]) - (ey[o + di] - ey[o]));
        }
      }
  }
}

// Split-field update of one PML box. Subfield arrays are box-local; sums are
// written back to the global arrays so neighbouring stencils see one field.
void pml_e_box(YeeFields& f, PmlBox& b, const PmlProfiles& prof) {
  const Dims& d = f.dims;
  const long dj = d.nz, di = (long)d.ny * d.nz;
  const long bj = b.bdims.nz, bi = (long)b.bdims.ny * b.bdims.nz;
  float* __restrict ex = f.ex.raw();
  float* __restrict ey = f.ey.raw();
  float* __restrict ez = f.ez.raw();
  const float* __restrict hx = f.hx.raw();
  const float* __restrict hy = f.hy.raw();
  const float* __restrict hz = f.hz.raw();
  const float* __restrict cx = f.cex.raw();
  const float* __restrict cy = f.cey.raw();
  const float* __restrict cz = f.cez.raw();
  const float* day = prof.eda[1].data();
  const float* dby = prof.edb[1].data();
  const float* daz = prof.eda[2].data();
  const float* dbz = prof.edb[2].data();
  const float* dax = prof.eda[0].data();
  const float* dbx = prof.edb[0].data();

  float* __restrict bexy = b.exy.raw();
  float* __restrict bexz = b.exz.raw();
  float* __restrict beyx = b.eyx.raw();
  float* __restrict beyz = b.eyz.raw();
  float* __restrict bezx = b.ezx.raw();
  float* __restrict bezy = b.ezy.raw();

  {  // Ex
    int a0 = clampi(b.i0, 0, d.nx - 1), a1 = clampi(b.i1, 0, d.nx - 1);
    int c0 = clampi(b.j0, 1, d.ny - 1), c1 = clampi(b.j1, 1, d.ny - 1);
    int e0 = clampi(b.k0, 1, d.nz - 1), e1 = clampi(b.k1, 1, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = c0; j < c1; ++j) {
        long q = i * di + j * dj;
        long r = (i - b.i0) * bi + (j - b.j0) * bj - b.k0;
        const float ay = day[j], by = dby[j];
        for (int k = e0; k < e1; ++k) {
          long o = q + k, s = r + k;
          bexy[s] = ay * bexy[s] + by * cx[o] * (hz[o] - hz[o - dj]);
          bexz[s] = daz[k] * bexz[s] - dbz[k] * cx[o] * (hy[o] - hy[o - 1]);
          ex[o] = bexy[s] + bexz[s];
        }
      }
  }
  {  // Ey
    int a0 = clampi(b.i0, 1, d.nx - 1), a1 = clampi(b.i1, 1, d.nx - 1);
    int c0 = clampi(b.j0, 0, d.ny - 1), c1 = clampi(b.j1, 0, d.ny - 1);
    int e0 = clampi(b.k0, 1, d.nz - 1), e1 = clampi(b.k1, 1, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = c0; j < c1; ++j) {
        long q = i * di + j * dj;
        long r = (i - b.i0) * bi + (j - b.j0) * bj - b.k0;
        const float ax = dax[i], bx = dbx[i];
        for (int k = e0; k < e1; ++k) {
          long o = q + k, s = r + k;
          beyz[s] = daz[k] * beyz[s] + dbz[k] * cy[o] * (hx[o] - hx[o - 1]);
          beyx[s] = ax * beyx[s] - bx * cy[o] * (hz[o] - hz[o - di]);
          ey[o] = beyz[s] + beyx[s];
        }
      }
  }
  {  // Ez
    int a0 = clampi(b.i0, 1, d.nx - 1), a1 = clampi(b.i1, 1, d.nx - 1);
    int c0 = clampi(b.j0, 1, d.ny - 1), c1 = clampi(b.j1, 1, d.ny - 1);
    int e0 = clampi(b.k0, 0, d.nz - 1), e1 = clampi(b.k1, 0, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = c0; j < c1; ++j) {
        long q = i * di + j * dj;
        long r = (i - b.i0) * bi + (j - b.j0) * bj - b.k0;
        const float ax = dax[i], bx = dbx[i], ay = day[j], by = dby[j];
        for (int k = e0; k < e1; ++k) {
          long o = q + k, s = r + k;
          bezx[s] = ax * bezx[s] + bx * cz[o] * (hy[o] - hy[o - di]);
          bezy[s] = ay * bezy[s] - by * cz[o] * (hx[o] - hx[o - dj]);
          ez[o] = bezx[s] + bezy[s];
        }
      }
  }
}

void pml_h_box(YeeFields& f, PmlBox& b, const PmlProfiles& prof) {
  const Dims& d = f.dims;
  const long dj = d.nz, di = (long)d.ny * d.nz;
  const long bj = b.bdims.nz, bi = (long)b.bdims.ny * b.bdims.nz;
  const float* __restrict ex = f.ex.raw();
  const float* __restrict ey = f.ey.raw();
  const float* __restrict ez = f.ez.raw();
  float* __restrict hx = f.hx.raw();
  float* __restrict hy = f.hy.raw();
  float* __restrict hz = f.hz.raw();
  const float ch = f.ch;
  const float* day = prof.hda[1].data();
  const float* dby = prof.hdb[1].data();
  const float* daz = prof.hda[2].data();
  const float* dbz = prof.hdb[2].data();
  const float* dax = prof.hda[0].data();
  const float* dbx = prof.hdb[0].data();

  float* __restrict bhxy = b.hxy.raw();
  float* __restrict bhxz = b.hxz.raw();
  float* __restrict bhyx = b.hyx.raw();
  float* __restrict bhyz = b.hyz.raw();
  float* __restrict bhzx = b.hzx.raw();
  float* __restrict bhzy = b.hzy.raw();

  {  // Hx
    int a0 = clampi(b.i0, 0, d.nx), a1 = clampi(b.i1, 0, d.nx);
    int c0 = clampi(b.j0, 0, d.ny - 1), c1 = clampi(b.j1, 0, d.ny - 1);
    int e0 = clampi(b.k0, 0, d.nz - 1), e1 = clampi(b.k1, 0, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = c0; j < c1; ++j) {
        long q = i * di + j * dj;
        long r = (i - b.i0) * bi + (j - b.j0) * bj - b.k0;
        const float ay = day[j], by = dby[j];
        for (int k = e0; k < e1; ++k) {
          long o = q + k, s = r + k;
          bhxz[s] = daz[k] * bhxz[s] + dbz[k] * ch * (ey[o + 1] - ey[o]);
          bhxy[s] = ay * bhxy[s] - by * ch * (ez[o + dj] - ez[o]);
          hx[o] = bhxz[s] + bhxy[s];
        }
      }
  }
  {  // Hy
    int a0 = clampi(b.i0, 0, d.nx - 1), a1 = clampi(b.i1, 0, d.nx - 1);
    int c0 = clampi(b.j0, 0, d.ny), c1 = clampi(b.j1, 0, d.ny);
    int e0 = clampi(b.k0, 0, d.nz - 1), e1 = clampi(b.k1, 0, d.nz - 1);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = c0; j < c1; ++j) {
        long q = i * di + j * dj;
        long r = (i - b.i0) * bi + (j - b.j0) * bj - b.k0;
        const float ax = dax[i], bx = dbx[i];
        for (int k = e0; k < e1; ++k) {
          long o = q + k, s = r + k;
          bhyx[s] = ax * bhyx[s] + bx * ch * (ez[o + di] - ez[o]);
          bhyz[s] = daz[k] * bhyz[s] - dbz[k] * ch * (ex[o + 1] - ex[o]);
          hy[o] = bhyx[s] + bhyz[s];
        }
      }
  }
  {  // Hz
    int a0 = clampi(b.i0, 0, d.nx - 1), a1 = clampi(b.i1, 0, d.nx - 1);
    int c0 = clampi(b.j0, 0, d.ny - 1), c1 = clampi(b.j1, 0, d.ny - 1);
    int e0 = clampi(b.k0, 0, d.nz), e1 = clampi(b.k1, 0, d.nz);
#pragma omp parallel for schedule(static)
    for (int i = a0; i < a1; ++i)
      for (int j = c0; j < c1; ++j) {
        long q = i * di + j * dj;
        long r = (i - b.i0) * bi + (j - b.j0) * bj - b.k0;
        const float ax = dax[i], bx = dbx[i], ay = day[j], by = dby[j];
        for (int k = e0; k < e1; ++k) {
          long o = q + k, s = r + k;
          bhzy[s] = ay * bhzy[s] + by * ch * (ex[o + dj] - ex[o]);
          bhzx[s] = ax * bhzx[s] - bx * ch * (ey[o + di] - ey[o]);
          hz[o] = bhzy[s] + bhzx[s];
        }
      }
  }
}

}  // namespace

namespace {

// Inside the interior box every stencil neighbour exists (the PML shell is at
// least one cell thick), so the three component updates fuse into one sweep.
void yee_e_fused(YeeFields& f, int p) {
  const Dims& d = f.dims;
  const long dj = d.nz, di = (long)d.ny * d.nz;
  float* __restrict ex = f.ex.raw();
  float* __restrict ey = f.ey.raw();
  float* __restrict ez = f.ez.raw();
  const float* __restrict hx = f.hx.raw();
  const float* __restrict hy = f.hy.raw();
  const float* __restrict hz = f.hz.raw();
  const float* __restrict cx = f.cex.raw();
  const float* __restrict cy = f.cey.raw();
  const float* __restrict cz = f.cez.raw();
#pragma omp parallel for schedule(static)
  for (int i = p; i < d.nx - p; ++i)
    for (int j = p; j < d.ny - p; ++j) {
      long q = i * di + j * dj;
      for (int k = p; k < d.nz - p; ++k) {
        long o = q + k;
        ex[o] += cx[o] * ((hz[o] - hz[o - dj]) - (hy[o] - hy[o - 1]));
        ey[o] += cy[o] * ((hx[o] - hx[o - 1]) - (hz[o] - hz[o - di]));
        ez[o] += cz[o] * ((hy[o] - hy[o - di]) - (hx[o] - hx[o - dj]));
      }
    }
}

void yee_h_fused(YeeFields& f, int p) {
  const Dims& d = f.dims;
  const long dj = d.nz, di = (long)d.ny * d.nz;
  const float* __restrict ex = f.ex.raw();
  const float* __restrict ey = f.ey.raw();
  const float* __restrict ez = f.ez.raw();
  float* __restrict hx = f.hx.raw();
  float* __restrict hy = f.hy.raw();
  float* __restrict hz = f.hz.raw();
  const float ch = f.ch;
#pragma omp parallel for schedule(static)
  for (int i = p; i < d.nx - p; ++i)
    for (int j = p; j < d.ny - p; ++j) {
      long q = i * di + j * dj;
      for (int k = p; k < d.nz - p; ++k) {
        long o = q + k;
        hx[o] += ch * ((ey[o + 1] - ey[o]) - (ez[o + dj] - ez[o]));
        hy[o] += ch * ((ez[o + di] - ez[o]) - (ex[o + 1] - ex[o]));
        hz[o] += ch * ((ex[o + dj] - ex[o]) - (ey[o + di] - ey[o]));
      }
    }
}

}  // namespace

void update_h(YeeFields& f, std::vector<PmlBox>& boxes, const PmlProfiles& prof, int p) {
  const Dims& d = f.dims;
  if (p > 0)
    yee_h_fused(f, p);
  else
    yee_h_range(f, 0, d.nx, 0, d.ny, 0, d.nz);
  for (auto& b : boxes) pml_h_box(f, b, prof);
}

void update_e(YeeFields& f, std::vector<PmlBox>& boxes, const PmlProfiles& prof, int p) {
  const Dims& d = f.dims;
  if (p > 0)
    yee_e_fused(f, p);
  else
    yee_e_range(f, 0, d.nx, 0, d.ny, 0, d.nz);
  for (auto& b : boxes) pml_e_box(f, b, prof);
}

ReferenceStepper::ReferenceStepper(YeeFields& fields, const PmlSpec& spec) : f(&fields) {
  prof = make_pml_profiles(fields.dims, fields.dx, fields.dt, spec);
  for (FieldGrid* g : {&exy, &exz, &eyx, &eyz, &ezx, &ezy, &hxy, &hxz, &hyx, &hyz, &hzx, &hzy})
    *g = FieldGrid(fields.dims);
}

void ReferenceStepper::step_h() {
  const Dims& d = f->dims;
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        if (j < d.ny - 1 && k < d.nz - 1) {
          float cy = prof.hda[1][j], cz = prof.hda[2][k];
          float by = prof.hdb[1][j], bz = prof.hdb[2][k];
          hxz(i, j, k) = cz * hxz(i, j, k) + bz * f->ch * (f->ey(i, j, k + 1) - f->ey(i, j, k));
          hxy(i, j, k) = cy * hxy(i, j, k) - by * f->ch * (f->ez(i, j + 1, k) - f->ez(i, j, k));
          f->hx(i, j, k) = hxz(i, j, k) + hxy(i, j, k);
        }
        if (i < d.nx - 1 && k < d.nz - 1) {
          float cxv = prof.hda[0][i], cz = prof.hda[2][k];
          float bxv = prof.hdb[0][i], bz = prof.hdb[2][k];
          hyx(i, j, k) = cxv * hyx(i, j, k) + bxv * f->ch * (f->ez(i + 1, j, k) - f->ez(i, j, k));
          hyz(i, j, k) = cz * hyz(i, j, k) - bz * f->ch * (f->ex(i, j, k + 1) - f->ex(i, j, k));
          f->hy(i, j, k) = hyx(i, j, k) + hyz(i, j, k);
        }
        if (i < d.nx - 1 && j < d.ny - 1) {
          float cxv = prof.hda[0][i], cy = prof.hda[1][j];
          float bxv = prof.hdb[0][i], by = prof.hdb[1][j];
          hzy(i, j, k) = cy * hzy(i, j, k) + by * f->ch * (f->ex(i, j + 1, k) - f->ex(i, j, k));
          hzx(i, j, k) = cxv * hzx(i, j, k) - bxv * f->ch * (f->ey(i + 1, j, k) - f->ey(i, j, k));
          f->hz(i, j, k) = hzy(i, j, k) + hzx(i, j, k);
        }
      }
}

void ReferenceStepper::step_e() {
  const Dims& d = f->dims;
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        if (i < d.nx - 1 && j >= 1 && j < d.ny - 1 && k >= 1 && k < d.nz - 1) {
          float cy = prof.eda[1][j], cz = prof.eda[2][k];
          float by = prof.edb[1][j], bz = prof.edb[2][k];
          exy(i, j, k) = cy * exy(i, j, k) +
                         by * f->cex(i, j, k) * (f->hz(i, j, k) - f->hz(i, j - 1, k));
          exz(i, j, k) = cz * exz(i, j, k) -
                         bz * f->cex(i, j, k) * (f->hy(i, j, k) - f->hy(i, j, k - 1));
          f->ex(i, j, k) = exy(i, j, k) + exz(i, j, k);
        }
        if (j < d.ny - 1 && i >= 1 && i < d.nx - 1 && k >= 1 && k < d.nz - 1) {
          float cxv = prof.eda[0][i], cz = prof.eda[2][k];
          float bxv = prof.edb[0][i], bz = prof.edb[2][k];
          eyz(i, j, k) = cz * eyz(i, j, k) +
                         bz * f->cey(i, j, k) * (f->hx(i, j, k) - f->hx(i, j, k - 1));
          eyx(i, j, k) = cxv * eyx(i, j, k) -
                         bxv * f->cey(i, j, k) * (f->hz(i, j, k) - f->hz(i - 1, j, k));
          f->ey(i, j, k) = eyz(i, j, k) + eyx(i, j, k);
        }
        if (k < d.nz - 1 && i >= 1 && i < d.nx - 1 && j >= 1 && j < d.ny - 1) {
          float cxv = prof.eda[0][i], cy = prof.eda[1][j];
          float bxv = prof.edb[0][i], by = prof.edb[1][j];
          ezx(i, j, k) = cxv * ezx(i, j, k) +
                         bxv * f->cez(i, j, k) * (f->hy(i, j, k) - f->hy(i - 1, j, k));
          ezy(i, j, k) = cy * ezy(i, j, k) -
                         by * f->cez(i, j, k) * (f->hx(i, j, k) - f->hx(i, j - 1, k));
          f->ez(i, j, k) = ezx(i, j, k) + ezy(i, j, k);
        }
      }
}

double field_energy(const YeeFields& f, const FieldGrid& hx_prev, const FieldGrid& hy_prev,
                    const FieldGrid& hz_prev, std::array<int, 3> lo, std::array<int, 3> hi) {
  const Dims& d = f.dims;
  const double ch = f.ch;
  std::vector<double> partial(std::size_t(std::max(hi[0] - lo[0], 0)), 0.0);
#pragma omp parallel for schedule(static)
  for (int i = lo[0]; i < hi[0]; ++i) {
    double acc = 0;
    for (int j = lo[1]; j < hi[1]; ++j)
      for (int k = lo[2]; k < hi[2]; ++k) {
        std::size_t o = d.at(i, j, k);
        double epsx = ch / f.cex.data[o];
        double epsy = ch / f.cey.data[o];
        double epsz = ch / f.cez.data[o];
        double hxm = 0.5 * (double(f.hx.data[o]) + hx_prev.data[o]);
        double hym = 0.5 * (double(f.hy.data[o]) + hy_prev.data[o]);
        double hzm = 0.5 * (double(f.hz.data[o]) + hz_prev.data[o]);
        acc += epsx * double(f.ex.data[o]) * f.ex.data[o] +
               epsy * double(f.ey.data[o]) * f.ey.data[o] +
               epsz * double(f.ez.data[o]) * f.ez.data[o] + hxm * hxm + hym * hym + hzm * hzm;
      }
    partial[i - lo[0]] = acc;
  }
  double total = 0;
  for (double v : partial) total += v;
  return 0.5 * total * f.dx * f.dx * f.dx;
}

bool fields_corrupt(const YeeFields& f) {
  for (const FieldGrid* g : {&f.ex, &f.ey, &f.ez, &f.hx, &f.hy, &f.hz}) {
    for (float v : g->data)
      if (!std::isfinite(v)) return true;
  }
  return false;
}

}  // namespace h1sim
