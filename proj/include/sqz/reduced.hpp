#pragma once

// Small-parameter description of the squeezing cavity: three rates and the
// Lorentzian noise/signal forms they produce. All rates are angular (rad/s).

#include "sqz/optics.hpp"

namespace sqz {

struct CavityRates {
  double gamma_c = 0.0;    ///< coupler decay rate c t_c^2 / (4L)
  double gamma_s = 0.0;    ///< squeezing rate q c / L
  double gamma_l = 0.0;    ///< loss rate c l^2 / (4L)
  double eta = 1.0;        ///< detection efficiency
  double prefactor = 1.0;  ///< 8 pi P_c / (hbar lambda L); 1 for normalised use

  /// Total linewidth gamma_c + gamma_s + gamma_l.
  double total_rate() const { return gamma_c + gamma_s + gamma_l; }
};

/// Throws InvalidConfig for negative rates or eta outside [0, 1].
void validate(const CavityRates& rates);

CavityRates rates_from_optics(const OpticalConfig& cfg);

double approx_noise_psd(const CavityRates& rates, double omega);
double approx_signal_tf_sq(const CavityRates& rates, double omega);
/// |T|^2 / S_n in the reduced model.
double approx_snr(const CavityRates& rates, double omega);

/// B = sqrt(Gamma^2 - 4 gamma_c gamma_s eta). Throws NumericalDomain if the
/// radicand is not positive.
double closed_form_bandwidth(const CavityRates& rates);

/// S = prefactor * gamma_c eta / B^2.
double peak_sensitivity(const CavityRates& rates);

/// G = (gamma_c + gamma_l) / B, the sensitivity-bandwidth enhancement.
double enhancement_gain(const CavityRates& rates);

/// 8 pi P_c / (hbar lambda L). Throws InvalidConfig for non-positive inputs.
double standard_limit(double p_circ, double lambda0, double length);

}  // namespace sqz
