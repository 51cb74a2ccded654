#include "sqz/reduced.hpp"

#include <cmath>
#include <sstream>

#include "sqz/constants.hpp"
#include "sqz/error.hpp"

namespace sqz {

void validate(const CavityRates& rates) {
  auto nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  if (!nonneg(rates.gamma_c) || !nonneg(rates.gamma_s) || !nonneg(rates.gamma_l) ||
      !nonneg(rates.prefactor) || !(rates.eta >= 0.0 && rates.eta <= 1.0)) {
    std::ostringstream os;
    os << "rates out of range: gamma_c=" << rates.gamma_c << " gamma_s=" << rates.gamma_s
       << " gamma_l=" << rates.gamma_l << " eta=" << rates.eta
       << " prefactor=" << rates.prefactor;
    throw Error(ErrorCode::InvalidConfig, os.str());
  }
}

CavityRates rates_from_optics(const OpticalConfig& cfg) {
  validate(cfg);
  const double c_over_l = constants::c / cfg.length;
  CavityRates r;
  r.gamma_c = c_over_l * cfg.t_c_sq / 4.0;
  r.gamma_s = c_over_l * cfg.q;
  r.gamma_l = c_over_l * cfg.loss_sq() / 4.0;
  r.eta = cfg.eta_det;
  r.prefactor = cfg.sensitivity_prefactor();
  return r;
}

double approx_noise_psd(const CavityRates& rates, double omega) {
  validate(rates);
  const double g = rates.total_rate();
  return 1.0 - 4.0 * rates.gamma_c * rates.gamma_s * rates.eta / (g * g + omega * omega);
}

double approx_signal_tf_sq(const CavityRates& rates, double omega) {
  validate(rates);
  const double g = rates.total_rate();
  return rates.prefactor * rates.gamma_c * rates.eta / (g * g + omega * omega);
}

double approx_snr(const CavityRates& rates, double omega) {
  return approx_signal_tf_sq(rates, omega) / approx_noise_psd(rates, omega);
}

double closed_form_bandwidth(const CavityRates& rates) {
  validate(rates);
  const double g = rates.total_rate();
  const double radicand = g * g - 4.0 * rates.gamma_c * rates.gamma_s * rates.eta;
  if (!(radicand > 0.0)) {
    std::ostringstream os;
    os << "Gamma^2 - 4 gamma_c gamma_s eta = " << radicand << " is not positive";
    throw Error(ErrorCode::NumericalDomain, os.str());
  }
  return std::sqrt(radicand);
}

double peak_sensitivity(const CavityRates& rates) {
  const double b = closed_form_bandwidth(rates);
  return rates.prefactor * rates.gamma_c * rates.eta / (b * b);
}

double enhancement_gain(const CavityRates& rates) {
  return (rates.gamma_c + rates.gamma_l) / closed_form_bandwidth(rates);
}

double standard_limit(double p_circ, double lambda0, double length) {
  if (!(p_circ > 0.0 && lambda0 > 0.0 && length > 0.0) || !std::isfinite(p_circ) ||
      !std::isfinite(lambda0) || !std::isfinite(length)) {
    std::ostringstream os;
    os << "standard limit needs positive P_c, lambda, L (got " << p_circ << ", " << lambda0
       << ", " << length << ")";
    throw Error(ErrorCode::InvalidConfig, os.str());
  }
  return 8.0 * constants::pi * p_circ / (constants::hbar * lambda0 * length);
}

}  // namespace sqz
