#pragma once

// Exact two-photon input-output model of a Fabry-Perot cavity with an
// internal parametric amplifier. Amplitude quadrature is amplified by e^q per
// pass, the phase quadrature (which carries the signal and is detected) is
// deamplified by e^-q.

#include <array>
#include <complex>

namespace sqz {

/// Full physical description of the squeezing cavity.
///
/// Power fractions are stored; amplitude coefficients are derived on demand so
/// that r^2 + t^2 = 1 holds for every element by construction.
struct OpticalConfig {
  double lambda0 = 1550e-9;  ///< carrier wavelength [m]
  double length = 0.0277;    ///< one-way optical length [m]
  double t_c_sq = 0.15;      ///< coupling mirror power transmissivity
  double t_b_sq = 0.0005;    ///< back mirror power transmissivity
  double r_int_sq = 0.0018;  ///< round-trip internal power loss
  double q = 0.0;            ///< single-pass amplitude squeeze factor
  double eta_det = 1.0;      ///< detection efficiency, eta = t_det^2
  double p_circ = 1.0;       ///< circulating power [W]

  double t_c() const;
  double r_c() const;
  double t_b() const;
  double r_b() const;
  double r_int() const;
  double t_int() const;
  double t_det() const;
  double r_det() const;

  /// l^2 = r_int^2 + t_b^2, the round-trip loss excluding the coupler.
  double loss_sq() const { return r_int_sq + t_b_sq; }
  /// Single-pass propagation time L/c; the round trip is 2*tau.
  double tau() const;
  /// Angular free spectral range pi/tau, the period of cos(2 Omega tau).
  double omega_fsr() const;
  /// 8 pi P_c / (hbar lambda L).
  double sensitivity_prefactor() const;
};

/// Throws Error{InvalidConfig} if any field is out of its physical range.
void validate(const OpticalConfig& cfg);

/// q_th = -1/2 ln(r_c r_b t_int). The q field of cfg is ignored.
double opo_threshold(const OpticalConfig& cfg);

/// Detected phase-quadrature noise PSD, shot noise = 1.
/// Throws AboveThreshold for q >= q_th.
double exact_noise_psd(const OpticalConfig& cfg, double omega);

/// Amplitude-quadrature (anti-squeezed) PSD: the noise formula with q -> -q.
double exact_antisqueezing_psd(const OpticalConfig& cfg, double omega);

/// |T(Omega)|^2 including the 8 pi P_c/(hbar lambda L) prefactor.
double exact_signal_tf_sq(const OpticalConfig& cfg, double omega);

/// T(Omega) / (2 i k_p E): the complex transfer function without the
/// mean-field factor.
std::complex<double> exact_signal_tf(const OpticalConfig& cfg, double omega);

/// Intra-cavity phase-quadrature spectrum, valid for Omega << FSR.
double intracavity_phase_psd(const OpticalConfig& cfg, double omega);

/// S^in(0) at cfg.q divided by S^in(0) at q = 0.
double intracavity_squeeze_ratio(const OpticalConfig& cfg);

namespace detail {

/// Noise PSD with a signed squeeze factor (negative: anti-squeezing). Only
/// |q| < q_th is checked.
double noise_psd_signed(const OpticalConfig& cfg, double q_signed, double omega);

/// Partial derivatives of noise_psd_signed with respect to
/// (q_signed, t_c_sq, r_int_sq, eta_det), with t_b_sq, length held fixed.
std::array<double, 4> noise_psd_signed_partials(const OpticalConfig& cfg, double q_signed,
                                                double omega);

}  // namespace detail

}  // namespace sqz
