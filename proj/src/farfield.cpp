#include "h1sim/farfield.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>

#include "h1sim/errors.hpp"
#include "h1sim/units.hpp"

namespace h1sim {

namespace {

std::mutex fftw_mutex;  // FFTW plan creation is not thread-safe

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

// Forward 2D FFT of a staggered component. The result is phased to the true
// sample positions x0 + (i + sx)*dx so components can be combined per bin.
std::vector<std::complex<double>> fft_component(
    const std::vector<std::complex<double>>& field, int nx, int ny, int n,
    double dx, double x0, double y0, double sx, double sy) {
  std::vector<std::complex<double>> buf(std::size_t(n) * n, 0.0);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) buf[std::size_t(i) * n + j] = field[std::size_t(i) * ny + j];

  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    fftw_plan plan = fftw_plan_dft_2d(
        n, n, reinterpret_cast<fftw_complex*>(buf.data()),
        reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }

  const double dk = 2.0 * pi / (n * dx);
  for (int i = 0; i < n; ++i) {
    double kx = (i <= n / 2 ? i : i - n) * dk;
    for (int j = 0; j < n; ++j) {
      double ky = (j <= n / 2 ? j : j - n) * dk;
      double phase = -(kx * (x0 + sx * dx) + ky * (y0 + sy * dx));
      buf[std::size_t(i) * n + j] *= std::complex<double>(std::cos(phase), std::sin(phase));
    }
  }
  return buf;
}

}  // namespace

void Aperture::validate() const {
  if (na <= 0.0 || na > 1.0) throw config_error("aperture: NA must lie in (0, 1]");
}

FarFieldMap near_to_far(const PlaneField& plane, double lambda, int pad_factor,
                        bool strict) {
  if (plane.nx < 4 || plane.ny < 4) throw analysis_error("near_to_far: plane too small");
  if (lambda <= 0) throw analysis_error("near_to_far: bad wavelength");

  // Windowing quality: the mode must have decayed at the plane edge.
  double vmax = 0, edge = 0;
  for (int i = 0; i < plane.nx; ++i)
    for (int j = 0; j < plane.ny; ++j) {
      double m = std::sqrt(std::norm(plane.ex[plane.at(i, j)]) +
                           std::norm(plane.ey[plane.at(i, j)]));
      vmax = std::max(vmax, m);
      if (i == 0 || j == 0 || i == plane.nx - 1 || j == plane.ny - 1)
        edge = std::max(edge, m);
    }
  if (vmax <= 0) throw analysis_error("near_to_far: plane field is zero");
  double edge_ratio = edge / vmax;
  if (strict && edge_ratio > 0.01)
    throw analysis_error("near_to_far: field at plane edge above 1% of max; "
                         "enlarge the transverse extent");

  FarFieldMap map;
  map.n = next_pow2(pad_factor * std::max(plane.nx, plane.ny));
  map.dk = 2.0 * pi / (map.n * plane.dx);
  map.k0 = 2.0 * pi / lambda;
  map.lambda = lambda;
  map.edge_ratio = edge_ratio;

  const int n = map.n;
  map.ex = fft_component(plane.ex, plane.nx, plane.ny, n, plane.dx, plane.x0, plane.y0, 0.5, 0.0);
  map.ey = fft_component(plane.ey, plane.nx, plane.ny, n, plane.dx, plane.x0, plane.y0, 0.0, 0.5);

  const bool have_h = !plane.hx.empty();
  std::vector<std::complex<double>> hx, hy;
  if (have_h) {
    hx = fft_component(plane.hx, plane.nx, plane.ny, n, plane.dx, plane.x0, plane.y0, 0.0, 0.5);
    hy = fft_component(plane.hy, plane.nx, plane.ny, n, plane.dx, plane.x0, plane.y0, 0.5, 0.0);
  }

  map.power.assign(std::size_t(n) * n, 0.0);
  const double cell_area = plane.dx * plane.dx;
  const double norm = cell_area / (double(n) * n);  // Parseval for the padded DFT
  const double k0 = map.k0;

  double total = 0;
  for (int i = 0; i < n; ++i) {
    double kx = map.kx(i);
    for (int j = 0; j < n; ++j) {
      double ky = map.ky(j);
      double kpar2 = kx * kx + ky * ky;
      std::size_t q = map.at(i, j);
      if (kpar2 > k0 * k0) {
        map.ex[q] = 0.0;
        map.ey[q] = 0.0;
        continue;
      }
      double kz = std::sqrt(k0 * k0 - kpar2);
      std::complex<double> Ex = map.ex[q], Ey = map.ey[q];
      std::complex<double> Hx, Hy;
      if (have_h) {
        // Recorded H sits half a cell above the E plane; propagate it back.
        std::complex<double> shift(std::cos(kz * plane.dx / 2), -std::sin(kz * plane.dx / 2));
        Hx = hx[q] * shift;
        Hy = hy[q] * shift;
      } else {
        // Upward plane wave: H' = (k x E)/k0 with Ez from div E = 0.
        std::complex<double> Ez = -(kx * Ex + ky * Ey) / kz;
        Hx = (ky * Ez - kz * Ey) / k0;
        Hy = (kz * Ex - kx * Ez) / k0;
      }
      // Upward Poynting flux per bin; tiny negatives are reactive residue.
      double p = 0.5 * c0 * norm * (Ex * std::conj(Hy) - Ey * std::conj(Hx)).real();
      map.power[q] = std::max(p, 0.0);
      total += map.power[q];
    }
  }
  map.power_up = total;
  return map;
}

std::vector<double> radiation_pattern(const FarFieldMap& map, int npix) {
  std::vector<double> img(std::size_t(npix) * npix, 0.0);
  double pmax = 0;
  for (double p : map.power) pmax = std::max(pmax, p);
  if (pmax <= 0) throw analysis_error("radiation_pattern: map carries no power");
  for (int px = 0; px < npix; ++px) {
    double sx = -1.0 + 2.0 * px / (npix - 1);
    for (int py = 0; py < npix; ++py) {
      double sy = -1.0 + 2.0 * py / (npix - 1);
      if (sx * sx + sy * sy > 1.0) continue;
      int i = int(std::lround(sx * map.k0 / map.dk));
      int j = int(std::lround(sy * map.k0 / map.dk));
      int ii = (i % map.n + map.n) % map.n;
      int jj = (j % map.n + map.n) % map.n;
      img[std::size_t(px) * npix + py] = map.power[map.at(ii, jj)] / pmax;
    }
  }
  return img;
}

namespace {

double cone_sum(const FarFieldMap& map, double na) {
  double kmax2 = na * map.k0 * na * map.k0;
  double s = 0;
  for (int i = 0; i < map.n; ++i) {
    double kx = map.kx(i);
    for (int j = 0; j < map.n; ++j) {
      double ky = map.ky(j);
      if (kx * kx + ky * ky <= kmax2) s += map.power[map.at(i, j)];
    }
  }
  return s;
}

}  // namespace

double collection_efficiency(const FarFieldMap& map, const Aperture& ap, double P_ref) {
  ap.validate();
  if (P_ref <= 0) throw analysis_error("collection_efficiency: P_ref must be > 0");
  double eta = cone_sum(map, ap.na) / P_ref;
  if (eta > 0.5 * (1.0 + 0.2))
    throw analysis_error("collection_efficiency: eta above the 50% bound; "
                         "normalization inconsistent");
  return eta;
}

double overlap_K(const FarFieldMap& phi_h, const FarFieldMap& phi_v, const Aperture& ap,
                 bool amplitude_convention) {
  ap.validate();
  if (phi_h.n != phi_v.n || std::abs(phi_h.k0 - phi_v.k0) > 1e-9 * phi_h.k0)
    throw analysis_error("overlap_K: maps live on different grids");
  double kmax2 = ap.na * phi_h.k0 * ap.na * phi_h.k0;
  double cross = 0, eh = 0, ev = 0;
  for (int i = 0; i < phi_h.n; ++i) {
    double kx = phi_h.kx(i);
    for (int j = 0; j < phi_h.n; ++j) {
      double ky = phi_h.ky(j);
      if (kx * kx + ky * ky > kmax2) continue;
      std::size_t q = phi_h.at(i, j);
      double a = phi_h.power[q], b = phi_v.power[q];
      if (amplitude_convention) {
        a = std::sqrt(a);
        b = std::sqrt(b);
      }
      cross += std::sqrt(a * b);
      eh += a;
      ev += b;
    }
  }
  if (eh <= 0 || ev <= 0)
    throw analysis_error("overlap_K: a map is identically zero on the aperture");
  return cross * cross / (eh * ev);
}

}  // namespace h1sim
