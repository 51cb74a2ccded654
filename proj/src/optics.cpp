#include "sqz/optics.hpp"

#include <cmath>
#include <sstream>

#include "sqz/constants.hpp"
#include "sqz/error.hpp"

namespace sqz {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::AboveThreshold: return "AboveThreshold";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NumericalDomain: return "NumericalDomain";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::DegenerateJacobian: return "DegenerateJacobian";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidData: return "InvalidData";
  }
  return "Unknown";
}

double OpticalConfig::t_c() const { return std::sqrt(t_c_sq); }
double OpticalConfig::r_c() const { return std::sqrt(1.0 - t_c_sq); }
double OpticalConfig::t_b() const { return std::sqrt(t_b_sq); }
double OpticalConfig::r_b() const { return std::sqrt(1.0 - t_b_sq); }
double OpticalConfig::r_int() const { return std::sqrt(r_int_sq); }
double OpticalConfig::t_int() const { return std::sqrt(1.0 - r_int_sq); }
double OpticalConfig::t_det() const { return std::sqrt(eta_det); }
double OpticalConfig::r_det() const { return std::sqrt(1.0 - eta_det); }
double OpticalConfig::tau() const { return length / constants::c; }
double OpticalConfig::omega_fsr() const { return constants::pi / tau(); }

double OpticalConfig::sensitivity_prefactor() const {
  return 8.0 * constants::pi * p_circ / (constants::hbar * lambda0 * length);
}

namespace {

void require(bool ok, const char* field, double value, const char* range) {
  if (!ok) {
    std::ostringstream os;
    os << field << " = " << value << " outside " << range;
    throw Error(ErrorCode::InvalidConfig, os.str());
  }
}

bool is_fraction(double x) { return std::isfinite(x) && x >= 0.0 && x < 1.0; }

void check_below_threshold(const OpticalConfig& cfg, double q_abs) {
  const double q_th = opo_threshold(cfg);
  if (!(q_abs < q_th)) {
    std::ostringstream os;
    os << "q = " << q_abs << " >= OPO threshold " << q_th;
    throw Error(ErrorCode::AboveThreshold, os.str());
  }
}

// Common denominator |1 - X u e^{2 i Omega tau}|^2 with X = r_c r_b t_int,
// u = e^{-2q}.
double airy_denominator(double x, double u, double theta) {
  return 1.0 + x * x * u * u - 2.0 * x * u * std::cos(theta);
}

}  // namespace

void validate(const OpticalConfig& cfg) {
  require(std::isfinite(cfg.lambda0) && cfg.lambda0 > 0.0, "lambda0", cfg.lambda0, "(0, inf)");
  require(std::isfinite(cfg.length) && cfg.length > 0.0, "length", cfg.length, "(0, inf)");
  require(is_fraction(cfg.t_c_sq), "t_c_sq", cfg.t_c_sq, "[0, 1)");
  require(is_fraction(cfg.t_b_sq), "t_b_sq", cfg.t_b_sq, "[0, 1)");
  require(is_fraction(cfg.r_int_sq), "r_int_sq", cfg.r_int_sq, "[0, 1)");
  require(std::isfinite(cfg.q) && cfg.q >= 0.0, "q", cfg.q, "[0, inf)");
  require(std::isfinite(cfg.eta_det) && cfg.eta_det >= 0.0 && cfg.eta_det <= 1.0, "eta_det",
          cfg.eta_det, "[0, 1]");
  require(std::isfinite(cfg.p_circ) && cfg.p_circ >= 0.0, "p_circ", cfg.p_circ, "[0, inf)");
}

double opo_threshold(const OpticalConfig& cfg) {
  validate(cfg);
  // -1/2 ln(r_c r_b t_int) = -1/4 [ln(1-t_c^2) + ln(1-t_b^2) + ln(1-r_int^2)]
  return -0.25 * (std::log1p(-cfg.t_c_sq) + std::log1p(-cfg.t_b_sq) + std::log1p(-cfg.r_int_sq));
}

namespace detail {

double noise_psd_signed(const OpticalConfig& cfg, double q_signed, double omega) {
  check_below_threshold(cfg, std::abs(q_signed));
  const double rb = cfg.r_b();
  const double x = cfg.r_c() * rb * cfg.t_int();
  const double u = std::exp(-2.0 * q_signed);
  const double gain = -std::expm1(-2.0 * q_signed);  // 1 - e^{-2q}, exact zero at q = 0
  const double num = cfg.t_c_sq * cfg.eta_det * (1.0 - cfg.r_int_sq) * gain * (1.0 + u * rb * rb);
  return 1.0 - num / airy_denominator(x, u, 2.0 * omega * cfg.tau());
}

std::array<double, 4> noise_psd_signed_partials(const OpticalConfig& cfg, double q_signed,
                                                double omega) {
  check_below_threshold(cfg, std::abs(q_signed));
  const double a = cfg.t_c_sq;
  const double m = cfg.r_int_sq;
  const double eta = cfg.eta_det;
  const double rb2 = 1.0 - cfg.t_b_sq;
  const double x = cfg.r_c() * cfg.r_b() * cfg.t_int();
  const double u = std::exp(-2.0 * q_signed);
  const double cos_t = std::cos(2.0 * omega * cfg.tau());

  const double p = -std::expm1(-2.0 * q_signed) * (1.0 + u * rb2);
  const double k = a * eta * (1.0 - m);
  const double d = airy_denominator(x, u, 2.0 * omega * cfg.tau());
  const double d_dx = 2.0 * x * u * u - 2.0 * u * cos_t;
  const double d_du = 2.0 * x * x * u - 2.0 * x * cos_t;
  const double p_du = -cfg.t_b_sq - 2.0 * u * rb2;

  // S = 1 - k p / d
  const double ds_dk = -p / d;
  const double ds_dd = k * p / (d * d);

  const double ds_du = -k * p_du / d + ds_dd * d_du;
  const double ds_dq = ds_du * (-2.0 * u);
  const double ds_da = ds_dk * eta * (1.0 - m) + ds_dd * d_dx * (-x / (2.0 * (1.0 - a)));
  const double ds_dm = ds_dk * (-a * eta) + ds_dd * d_dx * (-x / (2.0 * (1.0 - m)));
  const double ds_deta = ds_dk * a * (1.0 - m);
  return {ds_dq, ds_da, ds_dm, ds_deta};
}

}  // namespace detail

double exact_noise_psd(const OpticalConfig& cfg, double omega) {
  validate(cfg);
  return detail::noise_psd_signed(cfg, cfg.q, omega);
}

double exact_antisqueezing_psd(const OpticalConfig& cfg, double omega) {
  validate(cfg);
  return detail::noise_psd_signed(cfg, -cfg.q, omega);
}

double exact_signal_tf_sq(const OpticalConfig& cfg, double omega) {
  validate(cfg);
  check_below_threshold(cfg, cfg.q);
  const double x = cfg.r_c() * cfg.r_b() * cfg.t_int();
  const double u = std::exp(-2.0 * cfg.q);
  const double num = u * cfg.t_c_sq * cfg.eta_det * (1.0 - cfg.r_int_sq);
  return cfg.sensitivity_prefactor() * num / airy_denominator(x, u, 2.0 * omega * cfg.tau());
}

std::complex<double> exact_signal_tf(const OpticalConfig& cfg, double omega) {
  validate(cfg);
  check_below_threshold(cfg, cfg.q);
  using namespace std::complex_literals;
  const double phase = omega * cfg.tau();
  const std::complex<double> num =
      cfg.t_c() * cfg.t_det() * cfg.t_int() * std::exp(cfg.q) * std::exp(1i * phase);
  const std::complex<double> den =
      std::exp(2.0 * cfg.q) - std::exp(2i * phase) * cfg.r_c() * cfg.r_b() * cfg.t_int();
  return num / den;
}

double intracavity_phase_psd(const OpticalConfig& cfg, double omega) {
  validate(cfg);
  check_below_threshold(cfg, cfg.q);
  const double rc2 = 1.0 - cfg.t_c_sq;
  const double rb2 = 1.0 - cfg.t_b_sq;
  const double ti2 = 1.0 - cfg.r_int_sq;
  const double u = std::exp(-2.0 * cfg.q);
  const double rcrb = cfg.r_c() * cfg.r_b();
  const double wt = omega * cfg.tau();

  const double num = rc2 * cfg.r_int_sq + cfg.t_c_sq + rc2 * cfg.t_b_sq * ti2 * u +
                     cfg.t_c_sq * rb2 * cfg.r_int_sq * ti2 * u * u;
  const double g = 1.0 - rcrb * ti2 * u;
  const double den = g * g + 4.0 * u * rcrb * ti2 * wt * wt;
  return num / den;
}

double intracavity_squeeze_ratio(const OpticalConfig& cfg) {
  OpticalConfig passive = cfg;
  passive.q = 0.0;
  return intracavity_phase_psd(cfg, 0.0) / intracavity_phase_psd(passive, 0.0);
}

}  // namespace sqz
