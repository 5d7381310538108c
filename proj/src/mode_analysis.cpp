#include "h1sim/mode_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "h1sim/errors.hpp"
#include "h1sim/units.hpp"

namespace h1sim {

namespace {

struct Extremum {
  double t, value;  // refined position and signed value
};

// Least squares line y = a + b*x.
void fit_line(const std::vector<double>& x, const std::vector<double>& y,
              double* a, double* b) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  *b = (n * sxy - sx * sy) / denom;
  *a = (sy - *b * sx) / n;
}

}  // namespace

DecayFit fit_decay(std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size() || t.size() < 16)
    throw analysis_error("fit_decay: series too short");

  double vmax = 0;
  for (double x : v) vmax = std::max(vmax, std::abs(x));
  if (vmax <= 0) throw analysis_error("fit_decay: series is identically zero");

  // Local extrema, refined by a 3-point parabola. Ignore anything within the
  // noise floor.
  const double floor = 1e-6 * vmax;
  std::vector<Extremum> ext;
  for (size_t i = 1; i + 1 < v.size(); ++i) {
    double d1 = v[i] - v[i - 1];
    double d2 = v[i + 1] - v[i];
    if (d1 * d2 > 0 || (d1 == 0 && d2 == 0)) continue;
    if (std::abs(v[i]) < floor) continue;
    double denom = v[i - 1] - 2 * v[i] + v[i + 1];
    double dt = t[i + 1] - t[i];
    double shift = 0, value = v[i];
    if (std::abs(denom) > 0) {
      shift = 0.5 * (v[i - 1] - v[i + 1]) / denom;
      shift = std::clamp(shift, -0.5, 0.5);
      value = v[i] - 0.25 * (v[i - 1] - v[i + 1]) * shift;
    }
    ext.push_back({t[i] + shift * dt, value});
  }
  if (ext.size() < 6)
    throw analysis_error("fit_decay: no sustained oscillation in probe series");

  // Extrema alternate at T/2 spacing: omega from the index-vs-time slope.
  std::vector<double> idx(ext.size()), times(ext.size());
  for (size_t k = 0; k < ext.size(); ++k) {
    idx[k] = double(k);
    times[k] = ext[k].t;
  }
  double a, half_period;
  fit_line(idx, times, &a, &half_period);
  if (half_period <= 0) throw analysis_error("fit_decay: non-monotonic extrema");
  DecayFit fit;
  fit.omega = pi / half_period;

  // Envelope: |extremum| decays as exp(-gamma_c t) (the cosine correction at
  // the extremum is a constant factor, so it drops out of the slope).
  std::vector<double> logs(ext.size());
  for (size_t k = 0; k < ext.size(); ++k) logs[k] = std::log(std::abs(ext[k].value));
  double intercept, slope;
  fit_line(times, logs, &intercept, &slope);
  fit.gamma_c = -slope;
  if (fit.gamma_c < 0 && fit.gamma_c > -1e-6 * fit.omega) fit.gamma_c = 0;

  // Residual of the reconstructed signal; amplitude and phase from a linear
  // solve at the fitted omega and gamma_c.
  double sbb = 0, sbc = 0, scc = 0, svb = 0, svc = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    double env = std::exp(-fit.gamma_c * (t[i] - t[0]));
    double cb = env * std::cos(fit.omega * t[i]);
    double cc = env * std::sin(fit.omega * t[i]);
    sbb += cb * cb;
    sbc += cb * cc;
    scc += cc * cc;
    svb += v[i] * cb;
    svc += v[i] * cc;
  }
  double det = sbb * scc - sbc * sbc;
  if (std::abs(det) < 1e-300) throw analysis_error("fit_decay: degenerate fit");
  double B = (svb * scc - svc * sbc) / det;
  double C = (svc * sbb - svb * sbc) / det;
  double err2 = 0, norm2 = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    double env = std::exp(-fit.gamma_c * (t[i] - t[0]));
    double model = env * (B * std::cos(fit.omega * t[i]) + C * std::sin(fit.omega * t[i]));
    err2 += (v[i] - model) * (v[i] - model);
    norm2 += v[i] * v[i];
  }
  fit.residual = std::sqrt(err2 / norm2);
  if (fit.residual > 0.05)
    throw analysis_error("fit_decay: residual above 5%, ring-down not single-mode");
  return fit;
}

double purcell_max(double Q, double V_cubic_wavelengths) {
  if (V_cubic_wavelengths <= 0) throw analysis_error("purcell_max: mode volume must be > 0");
  return 3.0 / (4.0 * pi * pi) * Q / V_cubic_wavelengths;
}

double predicted_wavelength(double d, double h_m) {
  return (d * 0.28 + (h_m * 1e6) * 0.69 + 0.82) * 1e-6;
}

namespace {

// Bilinear sample of one staggered component grid; xs/ys are the offsets of
// the component position inside a cell (units of dx).
double sample_sq(const std::vector<std::complex<double>>& f, int nx, int ny,
                 double dx, double x0, double y0, double xs, double ys,
                 double x, double y, bool* ok) {
  double u = (x - x0) / dx - xs;
  double w = (y - y0) / dx - ys;
  int i = int(std::floor(u)), j = int(std::floor(w));
  if (i < 0 || j < 0 || i + 1 >= nx || j + 1 >= ny) {
    *ok = false;
    return 0;
  }
  double fu = u - i, fw = w - j;
  auto at = [&](int ii, int jj) { return f[std::size_t(ii) * ny + jj]; };
  std::complex<double> val = (1 - fu) * (1 - fw) * at(i, j) + fu * (1 - fw) * at(i + 1, j) +
                             (1 - fu) * fw * at(i, j + 1) + fu * fw * at(i + 1, j + 1);
  return std::norm(val);
}

}  // namespace

double midplane_intensity(const PlaneField& mid, double x, double y) {
  bool ok = true;
  double ix = sample_sq(mid.ex, mid.nx, mid.ny, mid.dx, mid.x0, mid.y0, 0.5, 0.0, x, y, &ok);
  double iy = sample_sq(mid.ey, mid.nx, mid.ny, mid.dx, mid.x0, mid.y0, 0.0, 0.5, x, y, &ok);
  if (!ok) throw analysis_error("beta: offset outside the recorded field region");
  return ix + iy;
}

std::pair<double, double> beta_factors(const PlaneField& mode_x, const PlaneField& mode_y,
                                       double offset_x, double offset_y,
                                       bool amplitude_ratio) {
  double cx = midplane_intensity(mode_x, 0, 0);
  double cy = midplane_intensity(mode_y, 0, 0);
  if (cx <= 0 || cy <= 0)
    throw analysis_error("beta: mode field vanishes at the cavity center");
  double bx = midplane_intensity(mode_x, offset_x, offset_y) / cx;
  double by = midplane_intensity(mode_y, offset_x, offset_y) / cy;
  if (amplitude_ratio) {
    bx = std::sqrt(bx);
    by = std::sqrt(by);
  }
  return {bx, by};
}

}  // namespace h1sim
