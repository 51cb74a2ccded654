#include "sqz/analysis.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "sqz/constants.hpp"
#include "sqz/error.hpp"
#include "sqz/parallel.hpp"

namespace sqz {

namespace {

constexpr int kSeedGridPoints = 64;
constexpr double kGoldenRelTol = 1e-8;
constexpr double kOptimumAgreement = 1e-6;

double exact_snr(const OpticalConfig& cfg, double omega) {
  return exact_signal_tf_sq(cfg, omega) / exact_noise_psd(cfg, omega);
}

double bisect_crossing(const std::function<double(double)>& f, double level, double lo,
                       double hi) {
  // f(lo) > level >= f(hi)
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Spectrum snr_spectrum(const OpticalConfig& cfg, std::span<const double> omega) {
  validate(cfg);
  Spectrum spec(std::vector<double>(omega.begin(), omega.end()));
  const std::size_t n = omega.size();
  std::vector<double> noise(n), signal(n), snr(n);
  parallel_for(n, [&](std::size_t i) {
    noise[i] = exact_noise_psd(cfg, omega[i]);
    signal[i] = exact_signal_tf_sq(cfg, omega[i]);
    snr[i] = signal[i] / noise[i];
  });
  spec.set_channel("noise_psd", "dimensionless", std::move(noise));
  spec.set_channel("signal_tf_sq", "1/(W*s)*scaled", std::move(signal));
  spec.set_channel("snr", "1/(W*s)*scaled", std::move(snr));
  return spec;
}

Spectrum snr_spectrum(const CavityRates& rates, std::span<const double> omega) {
  validate(rates);
  Spectrum spec(std::vector<double>(omega.begin(), omega.end()));
  const std::size_t n = omega.size();
  std::vector<double> noise(n), signal(n), snr(n);
  for (std::size_t i = 0; i < n; ++i) {
    noise[i] = approx_noise_psd(rates, omega[i]);
    signal[i] = approx_signal_tf_sq(rates, omega[i]);
    snr[i] = signal[i] / noise[i];
  }
  spec.set_channel("noise_psd", "dimensionless", std::move(noise));
  spec.set_channel("signal_tf_sq", "1/(W*s)*scaled", std::move(signal));
  spec.set_channel("snr", "1/(W*s)*scaled", std::move(snr));
  return spec;
}

double numeric_bandwidth(const Spectrum& spec, std::string_view channel,
                         const std::function<double(double)>& refine) {
  const auto values = spec.values(channel);
  const auto& omega = spec.omega();
  if (values.empty()) throw Error(ErrorCode::NoCrossing, "empty spectrum");

  const auto peak_it = std::max_element(values.begin(), values.end());
  const std::size_t peak = static_cast<std::size_t>(peak_it - values.begin());
  const double peak_value = refine ? refine(omega[peak]) : values[peak];
  const double half = 0.5 * peak_value;
  if (!(peak_value > 0.0)) throw Error(ErrorCode::NoCrossing, "channel has no positive peak");

  for (std::size_t j = peak + 1; j < values.size(); ++j) {
    if (values[j] > half) continue;
    const double lo = omega[j - 1];
    const double hi = omega[j];
    if (refine) return bisect_crossing(refine, half, lo, hi);
    const double f0 = values[j - 1];
    const double f1 = values[j];
    return lo + (hi - lo) * (f0 - half) / (f0 - f1);
  }
  std::ostringstream os;
  os << "channel '" << channel << "' never falls below half of its peak " << peak_value
     << " on [" << omega.front() << ", " << omega.back() << "]";
  throw Error(ErrorCode::NoCrossing, os.str());
}

double snr_bandwidth(const OpticalConfig& cfg) {
  const auto grid = linear_grid(0.0, 0.5 * cfg.omega_fsr(), 2049);
  const Spectrum spec = snr_spectrum(cfg, grid);
  return numeric_bandwidth(spec, "snr", [&cfg](double w) { return exact_snr(cfg, w); });
}

double snr_bandwidth(const CavityRates& rates) {
  const auto grid = linear_grid(0.0, 100.0 * rates.total_rate(), 2001);
  const Spectrum spec = snr_spectrum(rates, grid);
  return numeric_bandwidth(spec, "snr", [&rates](double w) { return approx_snr(rates, w); });
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol) {
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, a, b, 15, rel_tol * 0.1, &error, &l1);
  if (!std::isfinite(value) || error > rel_tol * std::abs(value)) {
    std::ostringstream os;
    os << "integral over [" << a << ", " << b << "] = " << value << " with error estimate "
       << error << " (relative tolerance " << rel_tol << ")";
    throw Error(ErrorCode::QuadratureFailure, os.str());
  }
  return value;
}

double integrated_sensitivity(const OpticalConfig& cfg) {
  validate(cfg);
  (void)exact_noise_psd(cfg, 0.0);  // threshold check
  // The integrand is symmetric about omega_FSR / 2, so the full period is
  // twice the half period.
  const double half_fsr = 0.5 * cfg.omega_fsr();
  return 2.0 * integrate_adaptive([&cfg](double w) { return exact_snr(cfg, w); }, 0.0, half_fsr,
                                  kQuadratureRelTol);
}

double integrated_sensitivity(const CavityRates& rates) {
  validate(rates);
  const double gamma = rates.total_rate();
  if (!(gamma > 0.0)) throw Error(ErrorCode::NumericalDomain, "total rate is zero");
  const double b = closed_form_bandwidth(rates);
  const double cutoff = std::max(100.0 * gamma, 1e3 * b);
  // The peak can be far narrower than Gamma near gamma_s = gamma_c, so the
  // range is split geometrically from B outward.
  auto snr = [&rates](double w) { return approx_snr(rates, w); };
  double body = integrate_adaptive(snr, 0.0, b, kQuadratureRelTol);
  const int decades = static_cast<int>(std::ceil(std::log10(cutoff / b) - 1e-9));
  for (int k = 0; k < decades; ++k) {
    const double lo = b * std::pow(10.0, k);
    const double hi = k + 1 == decades ? cutoff : 10.0 * lo;
    body += integrate_adaptive(snr, lo, hi, kQuadratureRelTol);
  }
  // Beyond the cutoff the reduced SNR is A / (B^2 + Omega^2) exactly.
  const double amplitude = rates.prefactor * rates.gamma_c * rates.eta;
  const double tail = amplitude / b * std::atan(b / cutoff);
  return body + tail;
}

double exact_gain(const OpticalConfig& cfg) {
  OpticalConfig passive = cfg;
  passive.q = 0.0;
  return integrated_sensitivity(cfg) / integrated_sensitivity(passive);
}

double reduced_gain_by_quadrature(const CavityRates& rates) {
  CavityRates passive = rates;
  passive.gamma_s = 0.0;
  return integrated_sensitivity(rates) / integrated_sensitivity(passive);
}

std::vector<GainCurve> gain_curve(const OpticalConfig& cfg, std::span<const double> eta_list,
                                  std::span<const double> q_grid) {
  validate(cfg);
  for (double eta : eta_list) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      std::ostringstream os;
      os << "gain curve needs eta in (0, 1], got " << eta;
      throw Error(ErrorCode::InvalidConfig, os.str());
    }
  }
  if (!std::is_sorted(q_grid.begin(), q_grid.end())) {
    throw Error(ErrorCode::InvalidConfig, "q grid must be ascending");
  }
  const double q_th = opo_threshold(cfg);
  for (double q : q_grid) {
    if (!(q >= 0.0)) throw Error(ErrorCode::InvalidConfig, "q grid values must be >= 0");
    if (!(q < q_th)) {
      std::ostringstream os;
      os << "q grid value " << q << " >= OPO threshold " << q_th;
      throw Error(ErrorCode::AboveThreshold, os.str());
    }
  }

  std::vector<GainCurve> curves(eta_list.size());
  std::vector<double> rho0(eta_list.size());
  for (std::size_t e = 0; e < eta_list.size(); ++e) {
    curves[e].eta = eta_list[e];
    curves[e].points.resize(q_grid.size());
  }
  parallel_for(eta_list.size(), [&](std::size_t e) {
    OpticalConfig passive = cfg;
    passive.eta_det = eta_list[e];
    passive.q = 0.0;
    rho0[e] = integrated_sensitivity(passive);
  });
  const std::size_t nq = q_grid.size();
  parallel_for(eta_list.size() * nq, [&](std::size_t k) {
    const std::size_t e = k / nq;
    const std::size_t i = k % nq;
    OpticalConfig point_cfg = cfg;
    point_cfg.eta_det = eta_list[e];
    point_cfg.q = q_grid[i];
    GainCurvePoint& p = curves[e].points[i];
    p.q = q_grid[i];
    p.detected_squeeze_db = 10.0 * std::log10(exact_noise_psd(point_cfg, 0.0));
    p.gain = integrated_sensitivity(point_cfg) / rho0[e];
    p.bandwidth = snr_bandwidth(point_cfg);
  });
  return curves;
}

namespace {

// Half-maximum frequency of a decreasing spectrum, by bisection in log omega.
double half_width(const std::function<double(double)>& f) {
  const double half = 0.5 * f(0.0);
  double lo = 1.0;
  double hi = 1.0;
  while (f(lo) <= half && lo > 1e-300) lo *= 1e-3;
  while (f(hi) > half) {
    hi *= 1e3;
    if (!std::isfinite(hi)) throw Error(ErrorCode::NoCrossing, "spectrum never falls to half");
  }
  if (lo >= hi) lo = hi * 1e-3;
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-12; ++i) {
    const double mid = std::sqrt(lo * hi);
    (f(mid) > half ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

// Integral over [0, inf) in units of the half width, which keeps the
// quadrature well scaled however narrow the line is.
double integrate_line(const std::function<double(double)>& f) {
  const double w = half_width(f);
  return w * integrate_adaptive([&](double x) { return f(w * x); }, 0.0,
                                std::numeric_limits<double>::infinity(), kQuadratureRelTol);
}

}  // namespace

double intracavity_variance_ratio(const OpticalConfig& cfg) {
  OpticalConfig passive = cfg;
  passive.q = 0.0;
  const double squeezed = integrate_line([&cfg](double w) { return intracavity_phase_psd(cfg, w); });
  const double reference =
      integrate_line([&passive](double w) { return intracavity_phase_psd(passive, w); });
  return squeezed / reference;
}

SqueezeCeiling outcoupled_squeezing_ceiling(const OpticalConfig& cfg, std::size_t points) {
  validate(cfg);
  const double q_th = opo_threshold(cfg);
  SqueezeCeiling out;
  OpticalConfig probe = cfg;
  for (std::size_t i = 0; i < points; ++i) {
    probe.q = q_th * static_cast<double>(i) / static_cast<double>(points);
    const double s = exact_noise_psd(probe, 0.0);
    if (s < out.min_noise_psd) {
      out.min_noise_psd = s;
      out.q_at_min = probe.q;
    }
  }
  return out;
}

double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double abs_tol, int max_iterations) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double u = b - inv_phi * (b - a);
  double v = a + inv_phi * (b - a);
  double fu = f(u), fv = f(v);
  for (int i = 0; i < max_iterations && (b - a) > abs_tol; ++i) {
    if (fu < fv) {
      a = u;
      u = v;
      fu = fv;
      v = a + inv_phi * (b - a);
      fv = f(v);
    } else {
      b = v;
      v = u;
      fv = fu;
      u = b - inv_phi * (b - a);
      fu = f(u);
    }
  }
  return 0.5 * (a + b);
}

OptimalSqueeze optimal_squeeze(const OpticalConfig& cfg) {
  validate(cfg);
  OptimalSqueeze out;
  out.q_threshold = opo_threshold(cfg);
  OpticalConfig passive = cfg;
  passive.q = 0.0;
  const CavityRates base = rates_from_optics(passive);
  const double c_over_l = constants::c / cfg.length;
  const double s_threshold = c_over_l * out.q_threshold;

  // G(s) = a / sqrt((a + s)^2 - b s) with a = gamma_c + gamma_l, b = 4 gamma_c eta.
  // dG/ds = 0 where 2 (a + s) = b, and there (a + s)^2 - b s = b (a - b / 4).
  const double a = base.gamma_c + base.gamma_l;
  const double b = 4.0 * base.gamma_c * base.eta;
  const double s_stationary = 0.5 * b - a;
  const double min_radicand = b * (a - 0.25 * b);

  if (s_stationary > 0.0 && min_radicand <= 1e-14 * a * a) {
    out.loss_limited = true;
    out.q_analytic = std::min(s_stationary, s_threshold) / c_over_l;
    out.q_opt = out.q_analytic;
    out.gain_max = std::numeric_limits<double>::infinity();
    return out;
  }
  out.q_analytic = std::clamp(s_stationary, 0.0, s_threshold) / c_over_l;

  auto gain_at = [&](double q) {
    CavityRates r = base;
    r.gamma_s = c_over_l * q;
    return enhancement_gain(r);
  };

  const double step = out.q_threshold / kSeedGridPoints;
  int best = 0;
  double best_gain = -1.0;
  for (int i = 0; i < kSeedGridPoints; ++i) {
    const double g = gain_at(i * step);
    if (g > best_gain) {
      best_gain = g;
      best = i;
    }
  }
  const double lo = std::max(0, best - 1) * step;
  const double hi = std::min(kSeedGridPoints, best + 1) * step;
  out.q_opt = golden_section_maximize(gain_at, lo, hi, kGoldenRelTol * out.q_threshold);
  // Golden section never samples the bracket ends; snap to an edge optimum.
  if (gain_at(lo) >= gain_at(out.q_opt)) out.q_opt = lo;
  out.gain_max = gain_at(out.q_opt);
  out.at_boundary = s_stationary <= 0.0 || s_stationary >= s_threshold;

  const double scale = out.at_boundary ? out.q_threshold : out.q_analytic;
  if (std::abs(out.q_opt - out.q_analytic) > kOptimumAgreement * scale) {
    std::ostringstream os;
    os << "golden-section optimum " << out.q_opt << " disagrees with stationary point "
       << out.q_analytic;
    throw std::logic_error(os.str());
  }
  return out;
}

}  // namespace sqz
