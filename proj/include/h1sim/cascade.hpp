#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "h1sim/config.hpp"

namespace h1sim {

// Rates of the biexciton cascade, canonical unit rad/s (equivalently 1/s).
// splitting_half is delta_omega: the level splitting is 2*hbar*delta_omega.
// pure_dephasing is carried for completeness but enters no coefficient.
struct CascadeRates {
  double gamma1 = 1.0;
  double gamma_flip = 0.0;
  double delta_gamma_flip = 0.0;
  double cross_dephasing = 0.0;  // Gamma = Gamma_H + Gamma_V
  double splitting_half = 0.0;   // delta_omega
  double pure_dephasing = 0.0;   // Gamma_1, stored but unused

  void validate() const;
  static CascadeRates from_config(const Config& cfg);
};

// 4x4 density matrix of the photon pair in basis [H1H2, H1V2, V1H2, V1V2].
struct PairDensityMatrix {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();

  bool is_hermitian(double tol = 1e-12) const;
  double trace_error() const;        // |tr - 1|
  double min_eigenvalue() const;     // of the Hermitian part
  void validate(double psd_floor = -1e-10) const;
};

struct IdealCoefficients {
  double alpha = 0.5, d = 0.5, c1 = 0.0, c2 = 0.0;
};

// Coefficients and matrix of the cascade pair state for a centered dot.
IdealCoefficients ideal_coefficients(const CascadeRates& rates);
PairDensityMatrix ideal_density_matrix(const CascadeRates& rates);
PairDensityMatrix assemble_ideal(const IdealCoefficients& c);

// Multiplies the coherences (1,4),(4,1),(2,3),(3,2) by the mode overlap K.
PairDensityMatrix apply_overlap(const PairDensityMatrix& rho, double K);

// S = 2*sqrt(2)*(alpha + K*(d - c2)); fixed measurement settings, valid for
// the spin-flip-free (alpha = 1/2) family.
double bell_closed_form(double alpha, double d, double c2, double K);

// Maximal CHSH value over all measurement settings (Horodecki criterion):
// 2*sqrt(u1+u2) with u1,u2 the two largest eigenvalues of T^T T.
double bell_horodecki(const PairDensityMatrix& rho);

// CHSH at the standard fixed angle geometry, with the in-plane measurement
// orientation aligned to the coherence phase: sqrt(2)*(t_zz + s_xy) where
// s_xy is the largest singular value of the in-plane correlation block.
double bell_fixed_angle(const PairDensityMatrix& rho);

// 3x3 Pauli correlation matrix T_ij = Tr(rho sigma_i x sigma_j).
Eigen::Matrix3d pauli_correlation(const PairDensityMatrix& rho);

// Polarization-asymmetric Purcell model. delta_F = (F_H-F_V)/(F_H+F_V),
// g = 2*delta_omega/(gamma1_bulk*(F_H+F_V)) with gamma1_bulk the amplitude
// decay rate. Diagonal ((1+dF)^3, 0, 0, (1-dF)^3) and coherences
// (1-dF^2)^2/(1 -+ i g), renormalized to unit trace.
struct AsymmetryParams {
  double delta_F = 0.0;
  double g = 0.0;
  void validate() const;
};
PairDensityMatrix asymmetric_density_matrix(const AsymmetryParams& p);

// Figure of merit r = T1_bulk * splitting / (hbar * Fp_max); the splitting is
// the full fine-structure splitting 2*hbar*delta_omega, in joules.
double figure_of_merit(double T1_bulk_s, double splitting_J, double Fp_max);

// Bell parameter versus dot position mismatch. Beta factors are the
// normalized squared mode amplitudes at the dot site.
struct MismatchPoint {
  double offset = 0;   // m
  double beta_x = 1, beta_y = 1;
  double delta_F = 0, g = 0;
  double S_fixed = 0;      // paper-convention fixed-angle CHSH
  double S_horodecki = 0;  // optimum over settings
};

struct MismatchCurve {
  std::vector<MismatchPoint> points;
  // Largest offset with fixed-angle S >= 2 (linear interpolation between
  // samples); negative if S < 2 everywhere, +inf if S >= 2 everywhere.
  double threshold_offset = 0;
};

struct BetaSample {
  double offset = 0;  // m
  double beta_x = 1, beta_y = 1;
};

MismatchCurve bell_vs_mismatch(const std::vector<BetaSample>& betas,
                               double T1_bulk_s, double splitting_J, double Fp_max);

// The g value seen by a displaced dot: 2*delta_omega/(gamma_amp*(F_X+F_Y))
// with gamma_amp = 1/(2 T1) and F_i = Fp_max * beta_i. At zero mismatch this
// equals the figure of merit r.
double mismatch_g(double T1_bulk_s, double splitting_J, double Fp_max,
                  double beta_x, double beta_y);

}  // namespace h1sim
