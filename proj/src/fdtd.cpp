#include "h1sim/fdtd.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>

#include "h1sim/errors.hpp"
#include "h1sim/mode_analysis.hpp"
#include "h1sim/units.hpp"

namespace h1sim {

double DipoleSource::current(double t) const {
  const double W = width();
  if (t <= 0.0 || t >= 5.0 * W) return 0.0;
  const double tc = 2.5 * W;
  const double sigma = W / 2.3548200450309493;  // FWHM -> sigma
  const double omega0 = 2.0 * pi * c0 / carrier_wavelength;
  double x = (t - tc) / sigma;
  return amplitude * std::exp(-0.5 * x * x) * std::sin(omega0 * (t - tc));
}

RunParams RunParams::from_config(const Config& cfg) {
  RunParams p;
  p.resolution = cfg.get_int("resolution", p.resolution);
  p.free_cycles = cfg.get_number("free_cycles", p.free_cycles);
  p.max_free_cycles = cfg.get_number("max_free_cycles", std::max(p.free_cycles * 2, 600.0));
  p.courant_safety = cfg.get_number("courant_safety", p.courant_safety);
  p.pml.grading_order = cfg.get_int("pml_grading_order", p.pml.grading_order);
  p.pml.target_reflection = cfg.get_number("pml_target_reflection", p.pml.target_reflection);
  p.strict = cfg.get_int("strict", 0) != 0;
  return p;
}

Simulation::Simulation(const DielectricMap& map, const PmlSpec& pml, double courant_safety)
    : map_(&map) {
  const Dims& d = map.dims();
  fields_.allocate(d);
  fields_.dx = map.cell_size;
  fields_.dt = courant_safety * map.cell_size / (c0 * std::sqrt(3.0));
  fields_.ch = float(c0 * fields_.dt / fields_.dx);

  // Component permittivities: average of the four cells sharing each edge.
  const auto& eps = map.permittivity;
  auto cl = [](int v, int n) { return std::clamp(v, 0, n - 1); };
  for (int i = 0; i < d.nx; ++i)
    for (int j = 0; j < d.ny; ++j)
      for (int k = 0; k < d.nz; ++k) {
        double ex = 0.25 * (eps(i, cl(j - 1, d.ny), cl(k - 1, d.nz)) + eps(i, cl(j - 1, d.ny), k) +
                            eps(i, j, cl(k - 1, d.nz)) + eps(i, j, k));
        double ey = 0.25 * (eps(cl(i - 1, d.nx), j, cl(k - 1, d.nz)) + eps(cl(i - 1, d.nx), j, k) +
                            eps(i, j, cl(k - 1, d.nz)) + eps(i, j, k));
        double ez = 0.25 * (eps(cl(i - 1, d.nx), cl(j - 1, d.ny), k) + eps(cl(i - 1, d.nx), j, k) +
                            eps(i, cl(j - 1, d.ny), k) + eps(i, j, k));
        fields_.cex(i, j, k) = float(fields_.ch / ex);
        fields_.cey(i, j, k) = float(fields_.ch / ey);
        fields_.cez(i, j, k) = float(fields_.ch / ez);
      }

  pml_ = map.pml_cells;
  PmlSpec spec = pml;
  spec.thickness_cells = pml_;
  profiles_ = make_pml_profiles(d, fields_.dx, fields_.dt, spec);
  boxes_ = make_pml_boxes(d, pml_);

  hx_prev_ = FieldGrid(d);
  hy_prev_ = FieldGrid(d);
  hz_prev_ = FieldGrid(d);

  // Record plane: one cell above the top membrane surface at the cavity axis.
  int ic = int(map.origin[0]), jc = int(map.origin[1]);
  mid_k_ = int(map.origin[2]);
  int k_top = mid_k_;
  for (int k = mid_k_; k < d.nz; ++k)
    if (eps(ic, jc, k) > 1.5) k_top = k;
  plane_k_ = k_top + 2;
  if (plane_k_ >= d.nz - pml_ - 2)
    throw config_error("fdtd: record plane falls inside the PML; increase vertical padding");
}

std::optional<double> Simulation::step(const DipoleSource* source, bool sample_energy) {
  if (sample_energy) {
    std::copy(fields_.hx.data.begin(), fields_.hx.data.end(), hx_prev_.data.begin());
    std::copy(fields_.hy.data.begin(), fields_.hy.data.end(), hy_prev_.data.begin());
    std::copy(fields_.hz.data.begin(), fields_.hz.data.end(), hz_prev_.data.begin());
  }
  update_h(fields_, boxes_, profiles_, pml_);
  std::optional<double> U;
  if (sample_energy) {
    int lo = pml_ + 1;
    U = field_energy(fields_, hx_prev_, hy_prev_, hz_prev_, {lo, lo, lo},
                     {dims().nx - lo, dims().ny - lo, dims().nz - lo});
  }
  update_e(fields_, boxes_, profiles_, pml_);

  if (source) {
    double t_mid = (step_index_ + 0.5) * fields_.dt;
    double cur = source->current(t_mid);
    if (cur != 0.0) {
      int ic = int(map_->origin[0]) + int(std::lround(source->position[0] / fields_.dx));
      int jc = int(map_->origin[1]) + int(std::lround(source->position[1] / fields_.dx));
      int kc = int(map_->origin[2]) + int(std::lround(source->position[2] / fields_.dx));
      float s = float(0.5 * cur * fields_.dt);
      if (source->orientation == Polarization::X) {
        fields_.ex(ic - 1, jc, kc) += s;
        fields_.ex(ic, jc, kc) += s;
      } else {
        fields_.ey(ic, jc - 1, kc) += s;
        fields_.ey(ic, jc, kc) += s;
      }
    }
  }

  ++step_index_;
  if (step_index_ % 1000 == 0 && fields_corrupt(fields_))
    throw numerical_error("fdtd: non-finite field detected at step " +
                          std::to_string(step_index_) + "; unstable run");
  return U;
}

double Simulation::probe_value(const ProbeSpec& p) const {
  int i = int(map_->origin[0]) + int(std::lround(p.position[0] / fields_.dx));
  int j = int(map_->origin[1]) + int(std::lround(p.position[1] / fields_.dx));
  int k = int(map_->origin[2]) + int(std::lround(p.position[2] / fields_.dx));
  if (!dims().contains(i, j, k)) throw config_error("probe outside the grid");
  switch (p.component) {
    case 0: return fields_.ex(i, j, k);
    case 1: return fields_.ey(i, j, k);
    default: return fields_.ez(i, j, k);
  }
}

double Simulation::interior_energy() {
  int lo = pml_ + 1;
  return field_energy(fields_, fields_.hx, fields_.hy, fields_.hz, {lo, lo, lo},
                      {dims().nx - lo, dims().ny - lo, dims().nz - lo});
}

// ---------------------------------------------------------------------------
// Complex capture

struct Simulation::RealPlanes {
  int ilo = 0, jlo = 0;          // plane index window
  int pnx = 0, pny = 0;
  std::vector<double> pex, pey, phx, phy;  // record plane
  std::vector<double> mex, mey;            // midplane
  // Six faces of the interior box, tangential components averaged to the
  // face centers; order (t1, t2) cyclic with the face axis.
  struct Face {
    int axis = 0, sign = 1;
    int n1 = 0, n2 = 0;
    std::vector<double> et1, et2, ht1, ht2;
  };
  std::array<Face, 6> faces;
  std::vector<float> e0x, e0y, e0z;  // volume copy for the mode-volume sums
};

void Simulation::extract_planes(RealPlanes* out) const {
  const Dims& d = dims();
  const YeeFields& f = fields_;
  int lo = pml_ + 1;
  int hix = d.nx - lo, hiy = d.ny - lo, hiz = d.nz - lo;
  out->ilo = lo;
  out->jlo = lo;
  out->pnx = hix - lo;
  out->pny = hiy - lo;
  auto sz = std::size_t(out->pnx) * out->pny;
  out->pex.resize(sz);
  out->pey.resize(sz);
  out->phx.resize(sz);
  out->phy.resize(sz);
  out->mex.resize(sz);
  out->mey.resize(sz);
  for (int i = lo; i < hix; ++i)
    for (int j = lo; j < hiy; ++j) {
      std::size_t q = std::size_t(i - lo) * out->pny + (j - lo);
      out->pex[q] = f.ex(i, j, plane_k_);
      out->pey[q] = f.ey(i, j, plane_k_);
      out->phx[q] = 0.5 * (double(f.hx(i, j, plane_k_ - 1)) + f.hx(i, j, plane_k_));
      out->phy[q] = 0.5 * (double(f.hy(i, j, plane_k_ - 1)) + f.hy(i, j, plane_k_));
      out->mex[q] = f.ex(i, j, mid_k_);
      out->mey[q] = f.ey(i, j, mid_k_);
    }

  // Faces of the cell box [lo, hi) x ... with surface nodes at lo and hi.
  const int L[3] = {lo, lo, lo};
  const int H[3] = {hix, hiy, hiz};
  for (int fi = 0; fi < 6; ++fi) {
    auto& face = out->faces[fi];
    face.axis = fi / 2;
    face.sign = (fi % 2 == 0) ? -1 : +1;
    int a = face.axis, t1 = (a + 1) % 3, t2 = (a + 2) % 3;
    int node = face.sign < 0 ? L[a] : H[a];
    face.n1 = H[t1] - L[t1];
    face.n2 = H[t2] - L[t2];
    auto n = std::size_t(face.n1) * face.n2;
    face.et1.resize(n);
    face.et2.resize(n);
    face.ht1.resize(n);
    face.ht2.resize(n);
    for (int u = 0; u < face.n1; ++u)
      for (int v = 0; v < face.n2; ++v) {
        int c[3];
        c[a] = node;
        c[t1] = L[t1] + u;
        c[t2] = L[t2] + v;
        std::size_t q = std::size_t(u) * face.n2 + v;
        auto E = [&](int comp, int di, int dj, int dk) {
          int ii = c[0] + di, jj = c[1] + dj, kk = c[2] + dk;
          return comp == 0 ? double(f.ex(ii, jj, kk))
                           : comp == 1 ? double(f.ey(ii, jj, kk)) : double(f.ez(ii, jj, kk));
        };
        auto Hc = [&](int comp, int di, int dj, int dk) {
          int ii = c[0] + di, jj = c[1] + dj, kk = c[2] + dk;
          return comp == 0 ? double(f.hx(ii, jj, kk))
                           : comp == 1 ? double(f.hy(ii, jj, kk)) : double(f.hz(ii, jj, kk));
        };
        int s2[3] = {0, 0, 0};  // unit step along t2
        s2[t2] = 1;
        int s1[3] = {0, 0, 0};
        s1[t1] = 1;
        int sa[3] = {0, 0, 0};
        sa[a] = 1;
        // E_t1 lives at half-t1: average along t2 to reach the face center.
        face.et1[q] = 0.5 * (E(t1, 0, 0, 0) + E(t1, s2[0], s2[1], s2[2]));
        face.et2[q] = 0.5 * (E(t2, 0, 0, 0) + E(t2, s1[0], s1[1], s1[2]));
        // H_t1 lives at half-(a, t2): average along a (backwards) and t1.
        face.ht1[q] = 0.25 * (Hc(t1, -sa[0], -sa[1], -sa[2]) + Hc(t1, 0, 0, 0) +
                              Hc(t1, s1[0] - sa[0], s1[1] - sa[1], s1[2] - sa[2]) +
                              Hc(t1, s1[0], s1[1], s1[2]));
        face.ht2[q] = 0.25 * (Hc(t2, -sa[0], -sa[1], -sa[2]) + Hc(t2, 0, 0, 0) +
                              Hc(t2, s2[0] - sa[0], s2[1] - sa[1], s2[2] - sa[2]) +
                              Hc(t2, s2[0], s2[1], s2[2]));
      }
  }

  out->e0x.assign(f.ex.data.begin(), f.ex.data.end());
  out->e0y.assign(f.ey.data.begin(), f.ey.data.end());
  out->e0z.assign(f.ez.data.begin(), f.ez.data.end());
}

Simulation::Capture Simulation::capture_complex(double omega, double gamma_c) {
  const double T = 2.0 * pi / omega;
  const double quarter = T / 4.0;
  const int n1 = int(std::floor(quarter / fields_.dt));
  const double frac = quarter / fields_.dt - n1;
  const double corr = std::exp(gamma_c * quarter);

  if (n1 < 1) throw numerical_error("capture_complex: dt not resolving a quarter period");

  RealPlanes p0;
  extract_planes(&p0);
  double U0 = 0, Ua = 0, Ub = 0;
  for (int s = 0; s < n1; ++s) {
    auto u = step(nullptr, s == 0);
    if (s == 0) U0 = *u;
  }

  RealPlanes pa;
  extract_planes(&pa);
  Ua = *step(nullptr, true);
  RealPlanes pb;
  extract_planes(&pb);
  Ub = *step(nullptr, true);

  // Interpolate the quarter-period sample between the two adjacent steps.
  auto lerp = [&](const std::vector<double>& a, const std::vector<double>& b,
                  std::size_t q) { return (1.0 - frac) * a[q] + frac * b[q]; };
  const double UQ = (1.0 - frac) * Ua + frac * Ub;

  Capture cap;
  cap.U_ref = 0.5 * (U0 + UQ * std::exp(gamma_c * T / 2.0));

  const std::complex<double> I(0, 1);
  const std::complex<double> hphase =
      std::exp(I * (omega * fields_.dt / 2.0));  // H sits half a step late

  auto& pl = cap.plane;
  pl.nx = p0.pnx;
  pl.ny = p0.pny;
  pl.dx = fields_.dx;
  pl.x0 = (p0.ilo - map_->origin[0]) * fields_.dx;
  pl.y0 = (p0.jlo - map_->origin[1]) * fields_.dx;
  pl.z = (plane_k_ - map_->origin[2]) * fields_.dx;
  pl.omega = omega;
  auto sz = std::size_t(pl.nx) * pl.ny;
  pl.ex.resize(sz);
  pl.ey.resize(sz);
  pl.hx.resize(sz);
  pl.hy.resize(sz);
  cap.midplane = pl;
  cap.midplane.z = 0;
  cap.midplane.hx.clear();
  cap.midplane.hy.clear();
  for (std::size_t q = 0; q < sz; ++q) {
    pl.ex[q] = p0.pex[q] + I * corr * lerp(pa.pex, pb.pex, q);
    pl.ey[q] = p0.pey[q] + I * corr * lerp(pa.pey, pb.pey, q);
    pl.hx[q] = (p0.phx[q] + I * corr * lerp(pa.phx, pb.phx, q)) * hphase;
    pl.hy[q] = (p0.phy[q] + I * corr * lerp(pa.phy, pb.phy, q)) * hphase;
    cap.midplane.ex[q] = p0.mex[q] + I * corr * lerp(pa.mex, pb.mex, q);
    cap.midplane.ey[q] = p0.mey[q] + I * corr * lerp(pa.mey, pb.mey, q);
  }

  // Outward Poynting flux through the interior box.
  double flux = 0;
  for (int fi = 0; fi < 6; ++fi) {
    const auto& f0 = p0.faces[fi];
    const auto& fa = pa.faces[fi];
    const auto& fb = pb.faces[fi];
    double s = 0;
    for (std::size_t q = 0; q < f0.et1.size(); ++q) {
      std::complex<double> et1 = f0.et1[q] + I * corr * lerp(fa.et1, fb.et1, q);
      std::complex<double> et2 = f0.et2[q] + I * corr * lerp(fa.et2, fb.et2, q);
      std::complex<double> ht1 = (f0.ht1[q] + I * corr * lerp(fa.ht1, fb.ht1, q)) * hphase;
      std::complex<double> ht2 = (f0.ht2[q] + I * corr * lerp(fa.ht2, fb.ht2, q)) * hphase;
      s += (et1 * std::conj(ht2) - et2 * std::conj(ht1)).real();
    }
    flux += f0.sign * s;
  }
  cap.flux = 0.5 * c0 * flux * fields_.dx * fields_.dx;

  // Mode-volume sums from the complexified volume E field.
  const Dims& d = dims();
  int lo = pml_ + 1;
  double vol_sum = 0, vol_max = 0;
  for (int i = lo; i < d.nx - lo; ++i)
    for (int j = lo; j < d.ny - lo; ++j)
      for (int k = lo; k < d.nz - lo; ++k) {
        std::size_t o = d.at(i, j, k);
        double qx = (1 - frac) * pa.e0x[o] + frac * pb.e0x[o];
        double qy = (1 - frac) * pa.e0y[o] + frac * pb.e0y[o];
        double qz = (1 - frac) * pa.e0z[o] + frac * pb.e0z[o];
        double fx2 = double(p0.e0x[o]) * p0.e0x[o] + corr * corr * qx * qx;
        double fy2 = double(p0.e0y[o]) * p0.e0y[o] + corr * corr * qy * qy;
        double fz2 = double(p0.e0z[o]) * p0.e0z[o] + corr * corr * qz * qz;
        double ex_eps = fields_.ch / fields_.cex.data[o];
        double ey_eps = fields_.ch / fields_.cey.data[o];
        double ez_eps = fields_.ch / fields_.cez.data[o];
        double u = ex_eps * fx2 + ey_eps * fy2 + ez_eps * fz2;
        vol_sum += u;
        vol_max = std::max(vol_max, u);
      }
  cap.mode_volume_m3 = vol_max > 0 ? vol_sum / vol_max * std::pow(fields_.dx, 3) : 0.0;
  return cap;
}

void Simulation::save_checkpoint(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("cannot write checkpoint '" + path + "'");
  char header[160];
  std::snprintf(header, sizeof header, "h1sim checkpoint v1\nstep %ld\ndt %.17e\ndims %d %d %d\npml %d\n",
                step_index_, fields_.dt, dims().nx, dims().ny, dims().nz, pml_);
  out << header;
  auto blob = [&](const FieldGrid& g) {
    out.write(reinterpret_cast<const char*>(g.raw()), g.data.size() * sizeof(float));
  };
  for (const FieldGrid* g : {&fields_.ex, &fields_.ey, &fields_.ez, &fields_.hx, &fields_.hy, &fields_.hz})
    blob(*g);
  for (const auto& b : boxes_)
    for (const FieldGrid* g : {&b.exy, &b.exz, &b.eyx, &b.eyz, &b.ezx, &b.ezy, &b.hxy, &b.hxz,
                               &b.hyx, &b.hyz, &b.hzx, &b.hzy})
      blob(*g);
}

void Simulation::load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read checkpoint '" + path + "'");
  std::string magic;
  std::getline(in, magic);
  if (magic != "h1sim checkpoint v1") throw config_error("not a checkpoint: '" + path + "'");
  std::string word;
  long step;
  double dt;
  int nx, ny, nz, p;
  in >> word >> step >> word >> dt >> word >> nx >> ny >> nz >> word >> p;
  std::getline(in, word);
  if (nx != dims().nx || ny != dims().ny || nz != dims().nz || p != pml_)
    throw config_error("checkpoint grid does not match this simulation");
  if (std::abs(dt - fields_.dt) > 1e-24) throw config_error("checkpoint dt mismatch");
  step_index_ = step;
  auto blob = [&](FieldGrid& g) {
    in.read(reinterpret_cast<char*>(g.raw()), g.data.size() * sizeof(float));
  };
  for (FieldGrid* g : {&fields_.ex, &fields_.ey, &fields_.ez, &fields_.hx, &fields_.hy, &fields_.hz})
    blob(*g);
  for (auto& b : boxes_)
    for (FieldGrid* g : {&b.exy, &b.exz, &b.eyx, &b.eyz, &b.ezx, &b.ezy, &b.hxy, &b.hxz,
                         &b.hyx, &b.hyz, &b.hzx, &b.hzy})
      blob(*g);
  if (!in) throw config_error("checkpoint truncated: '" + path + "'");
}

RingdownResult run_ringdown(const CavityDesign& design, const RunParams& params,
                            Polarization orientation) {
  design.validate();
  DielectricMap map = rasterize(design, params.resolution);
  Simulation sim(map, params.pml, params.courant_safety);

  DipoleSource source;
  source.orientation = orientation;
  source.carrier_wavelength =
      predicted_wavelength(design.inner_hole_shift_d, design.membrane_thickness_h);

  const double a = design.lattice_constant_a;
  ProbeSpec probe{{0.2 * a, 0.1 * a, 0}, orientation == Polarization::X ? 0 : 1};
  ProbeSpec probe_alt{{-0.12 * a, 0.23 * a, 0}, probe.component};

  const double T0 = source.carrier_wavelength / c0;
  RingdownResult res;

  auto advance = [&](double until, const DipoleSource* src) {
    while (sim.time() < until) {
      bool sample = (sim.step_index() % params.energy_stride) == 0;
      double t_now = sim.time();
      auto U = sim.step(src, sample);
      if (U) {
        res.energy.t.push_back(t_now);
        res.energy.v.push_back(*U);
      }
      res.probe.t.push_back(sim.time());
      res.probe.v.push_back(sim.probe_value(probe));
      res.probe_alt.t.push_back(sim.time());
      res.probe_alt.v.push_back(sim.probe_value(probe_alt));
    }
  };

  advance(source.end_time(), &source);
  const double t_src_end = sim.time();

  // Field scale for the probe placement check.
  double field_scale = 0;
  const FieldGrid& comp = probe.component == 0 ? sim.fields().ex : sim.fields().ey;
  for (std::size_t q = 0; q < comp.data.size(); q += 3)
    field_scale = std::max(field_scale, double(std::abs(comp.data[q])));

  double free_cycles = params.free_cycles;
  DecayFit fit;
  while (true) {
    advance(t_src_end + free_cycles * T0, nullptr);

    double probe_max = 0;
    for (std::size_t q = 0; q < res.probe.v.size(); ++q)
      if (res.probe.t[q] > t_src_end) probe_max = std::max(probe_max, std::abs(res.probe.v[q]));
    if (probe_max < 1e-6 * field_scale)
      throw analysis_error("run_ringdown: probe sits at a field node; relocate the probe");

    // Fit the tail: the last two thirds of the free evolution.
    double t_fit = t_src_end + free_cycles * T0 / 3.0;
    std::size_t first = 0;
    while (first < res.probe.t.size() && res.probe.t[first] < t_fit) ++first;
    try {
      fit = fit_decay(std::span(res.probe.t).subspan(first), std::span(res.probe.v).subspan(first));
      break;
    } catch (const analysis_error&) {
      if (free_cycles + 100 > params.max_free_cycles) throw;
      free_cycles += 100;  // extension rule: ring down further, then refit
    }
  }
  res.free_cycles_used = free_cycles;

  auto cap = sim.capture_complex(fit.omega, fit.gamma_c);

  res.mode.polarization = orientation;
  res.mode.lambda = 2.0 * pi * c0 / fit.omega;
  res.mode.gamma_c = fit.gamma_c;
  res.mode.quality_factor = quality_factor(fit.omega, fit.gamma_c);
  res.mode.fit_residual = fit.residual;
  double lam_n = res.mode.lambda / design.slab_index;
  res.mode.mode_volume = cap.mode_volume_m3 / (lam_n * lam_n * lam_n);
  res.mode.purcell_max = purcell_max(res.mode.quality_factor, res.mode.mode_volume);
  res.mode.energy_ref = cap.U_ref;
  res.mode.emitted_power = emitted_power(fit.gamma_c, cap.U_ref);
  res.mode.poynting_flux = cap.flux;
  res.plane = std::move(cap.plane);
  res.midplane = std::move(cap.midplane);
  return res;
}

}  // namespace h1sim
