#include "h1sim/cascade.hpp"

#include <cmath>
#include <limits>

#include "h1sim/errors.hpp"
#include "h1sim/units.hpp"

namespace h1sim {

using std::complex;
static const complex<double> I(0.0, 1.0);

void CascadeRates::validate() const {
  if (gamma1 <= 0) throw config_error("cascade: gamma1 must be > 0");
  if (gamma_flip < 0 || cross_dephasing < 0 || pure_dephasing < 0)
    throw config_error("cascade: rates must be >= 0");
  if (std::abs(delta_gamma_flip) > gamma_flip)
    throw config_error("cascade: |delta_gamma_flip| must not exceed gamma_flip");
}

CascadeRates CascadeRates::from_config(const Config& cfg) {
  CascadeRates r;
  r.gamma1 = cfg.get_rate("gamma1", r.gamma1);
  r.gamma_flip = cfg.get_rate("gamma_flip", r.gamma_flip);
  r.delta_gamma_flip = cfg.get_rate("delta_gamma_flip", r.delta_gamma_flip);
  r.cross_dephasing = cfg.get_rate("cross_dephasing", r.cross_dephasing);
  if (cfg.has("splitting"))
    r.splitting_half = cfg.get_energy("splitting") / (2.0 * hbar);
  else
    r.splitting_half = cfg.get_rate("splitting_half", r.splitting_half);
  r.pure_dephasing = cfg.get_rate("pure_dephasing", r.pure_dephasing);
  r.validate();
  return r;
}

bool PairDensityMatrix::is_hermitian(double tol) const {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double PairDensityMatrix::trace_error() const { return std::abs(m.trace() - 1.0); }

double PairDensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (m + m.adjoint()));
  return es.eigenvalues().minCoeff();
}

void PairDensityMatrix::validate(double psd_floor) const {
  if (!is_hermitian(1e-10)) throw analysis_error("density matrix not Hermitian");
  if (trace_error() > 1e-10) throw analysis_error("density matrix trace != 1");
  if (min_eigenvalue() < psd_floor)
    throw analysis_error("density matrix not positive semidefinite");
}

IdealCoefficients ideal_coefficients(const CascadeRates& r) {
  r.validate();
  const double g1 = r.gamma1, gf = r.gamma_flip, dgf = r.delta_gamma_flip;
  const double G = r.cross_dephasing, dw = r.splitting_half;
  const double denom = (2 * dw) * (2 * dw) + (g1 + gf + G) * (g1 + gf + G) - dgf * dgf;
  if (denom <= 0) throw config_error("cascade: coefficient denominator not positive");
  IdealCoefficients c;
  c.alpha = 0.5 * (g1 + gf) / (g1 + 2 * gf);
  c.d = 0.5 * g1 * (g1 + 2 * G + gf) / denom;
  c.c1 = 0.5 * g1 * dw / denom;
  c.c2 = 0.5 * g1 * dgf / denom;
  return c;
}

PairDensityMatrix assemble_ideal(const IdealCoefficients& c) {
  PairDensityMatrix rho;
  rho.m(0, 0) = c.alpha;
  rho.m(1, 1) = 0.5 - c.alpha;
  rho.m(2, 2) = 0.5 - c.alpha;
  rho.m(3, 3) = c.alpha;
  rho.m(0, 3) = c.d - I * c.c1;
  rho.m(3, 0) = c.d + I * c.c1;
  rho.m(1, 2) = c.c2;
  rho.m(2, 1) = c.c2;
  return rho;
}

PairDensityMatrix ideal_density_matrix(const CascadeRates& rates) {
  return assemble_ideal(ideal_coefficients(rates));
}

PairDensityMatrix apply_overlap(const PairDensityMatrix& rho, double K) {
  if (K < 0.0 || K > 1.0) throw config_error("apply_overlap: K outside [0, 1]");
  PairDensityMatrix out = rho;
  out.m(0, 3) *= K;
  out.m(3, 0) *= K;
  out.m(1, 2) *= K;
  out.m(2, 1) *= K;
  return out;
}

double bell_closed_form(double alpha, double d, double c2, double K) {
  return 2.0 * std::sqrt(2.0) * (alpha + K * (d - c2));
}

Eigen::Matrix3d pauli_correlation(const PairDensityMatrix& rho) {
  Eigen::Matrix2cd sig[3];
  sig[0] << 0, 1, 1, 0;
  sig[1] << 0, -I, I, 0;
  sig[2] << 1, 0, 0, -1;
  Eigen::Matrix3d T;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Eigen::Matrix4cd op = Eigen::Matrix4cd::Zero();
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            for (int e = 0; e < 2; ++e)
              op(2 * a + c, 2 * b + e) = sig[i](a, b) * sig[j](c, e);
      T(i, j) = (rho.m * op).trace().real();
    }
  return T;
}

double bell_horodecki(const PairDensityMatrix& rho) {
  rho.validate(-1e-8);
  Eigen::Matrix3d T = pauli_correlation(rho);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(T.transpose() * T);
  auto u = es.eigenvalues();  // ascending
  return 2.0 * std::sqrt(u(1) + u(2));
}

double bell_fixed_angle(const PairDensityMatrix& rho) {
  Eigen::Matrix3d T = pauli_correlation(rho);
  Eigen::Matrix2d B;
  B << T(0, 0), T(0, 1), T(1, 0), T(1, 1);
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(B);
  return std::sqrt(2.0) * (T(2, 2) + svd.singularValues()(0));
}

void AsymmetryParams::validate() const {
  if (std::abs(delta_F) > 1.0) throw config_error("asymmetry: |delta_F| must be <= 1");
  if (g < 0) throw config_error("asymmetry: g must be >= 0");
}

PairDensityMatrix asymmetric_density_matrix(const AsymmetryParams& p) {
  p.validate();
  const double dF = p.delta_F;
  const double A = std::pow(1.0 + dF, 3);
  const double B = std::pow(1.0 - dF, 3);
  const double norm = A + B;  // = 2*(1 + 3 dF^2)
  const complex<double> coh =
      std::pow(1.0 - dF * dF, 2) / (complex<double>(1.0, -p.g) * norm);
  PairDensityMatrix rho;
  rho.m(0, 0) = A / norm;
  rho.m(3, 3) = B / norm;
  rho.m(0, 3) = coh;
  rho.m(3, 0) = std::conj(coh);
  return rho;
}

double figure_of_merit(double T1_bulk_s, double splitting_J, double Fp_max) {
  if (T1_bulk_s <= 0 || splitting_J < 0 || Fp_max <= 0)
    throw config_error("figure_of_merit: inputs must be positive");
  return T1_bulk_s * splitting_J / (hbar * Fp_max);
}

double mismatch_g(double T1_bulk_s, double splitting_J, double Fp_max,
                  double beta_x, double beta_y) {
  const double delta_omega = splitting_J / (2.0 * hbar);
  const double gamma_amp = 1.0 / (2.0 * T1_bulk_s);
  return 2.0 * delta_omega / (gamma_amp * Fp_max * (beta_x + beta_y));
}

MismatchCurve bell_vs_mismatch(const std::vector<BetaSample>& betas,
                               double T1_bulk_s, double splitting_J, double Fp_max) {
  if (betas.empty()) throw config_error("bell_vs_mismatch: no beta samples");
  MismatchCurve curve;
  for (const auto& b : betas) {
    MismatchPoint pt;
    pt.offset = b.offset;
    pt.beta_x = b.beta_x;
    pt.beta_y = b.beta_y;
    pt.delta_F = (b.beta_x - b.beta_y) / (b.beta_x + b.beta_y);
    pt.g = mismatch_g(T1_bulk_s, splitting_J, Fp_max, b.beta_x, b.beta_y);
    PairDensityMatrix rho = asymmetric_density_matrix({pt.delta_F, pt.g});
    pt.S_fixed = bell_fixed_angle(rho);
    pt.S_horodecki = bell_horodecki(rho);
    curve.points.push_back(pt);
  }
  // Largest offset with S_fixed >= 2, interpolating across the crossing.
  double thr = -1.0;
  bool all_above = true;
  for (size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    if (p.S_fixed >= 2.0) {
      thr = p.offset;
    } else {
      all_above = false;
      if (i > 0 && curve.points[i - 1].S_fixed >= 2.0) {
        const auto& q = curve.points[i - 1];
        double f = (q.S_fixed - 2.0) / (q.S_fixed - p.S_fixed);
        thr = q.offset + f * (p.offset - q.offset);
      }
      break;
    }
  }
  curve.threshold_offset =
      all_above ? std::numeric_limits<double>::infinity() : thr;
  return curve;
}

}  // namespace h1sim
