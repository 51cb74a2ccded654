#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "sqz/optics.hpp"
#include "sqz/reduced.hpp"
#include "sqz/spectrum.hpp"

namespace sqz {

/// Channels noise_psd, signal_tf_sq and snr on the given angular grid,
/// evaluated with the exact model.
Spectrum snr_spectrum(const OpticalConfig& cfg, std::span<const double> omega);
/// Same channels with the reduced (Lorentzian) model.
Spectrum snr_spectrum(const CavityRates& rates, std::span<const double> omega);

/// Frequency at which `channel` falls to half of its peak value.
///
/// The crossing is bracketed on the grid after the peak. Without `refine` it
/// is located by linear interpolation; with `refine` (the analytic channel as
/// a function of omega) the bracket is bisected to full precision and the
/// peak value is taken from refine(omega_peak). Throws NoCrossing if the
/// channel stays above half maximum on the whole grid.
double numeric_bandwidth(const Spectrum& spec, std::string_view channel,
                         const std::function<double(double)>& refine = {});

/// Half-maximum bandwidth of the exact SNR, searched on [0, omega_FSR / 2].
double snr_bandwidth(const OpticalConfig& cfg);
/// Half-maximum bandwidth of the reduced SNR, searched on [0, 100 Gamma].
double snr_bandwidth(const CavityRates& rates);

/// Relative tolerance of every integrated-sensitivity quadrature.
inline constexpr double kQuadratureRelTol = 1e-8;

/// rho = integral of |T|^2 / S_n over [0, omega_FSR] for the exact model.
double integrated_sensitivity(const OpticalConfig& cfg);

/// rho = integral of |T|^2 / S_n over [0, inf) for the reduced model.
///
/// Computed by adaptive quadrature up to max(100 Gamma, 1000 B) plus the
/// analytic Lorentzian tail. Since the reduced SNR is A / (B^2 + Omega^2), the result
/// equals (pi / 2) * S * B; ratios of rho are free of that constant.
double integrated_sensitivity(const CavityRates& rates);

/// rho(cfg) / rho(cfg with q = 0), exact model.
double exact_gain(const OpticalConfig& cfg);
/// rho(rates) / rho(rates with gamma_s = 0), reduced model by quadrature.
double reduced_gain_by_quadrature(const CavityRates& rates);

struct GainCurvePoint {
  double detected_squeeze_db = 0.0;  ///< 10 log10 S_n(0), exact model
  double gain = 1.0;                 ///< rho / rho_{q=0}, exact model
  double q = 0.0;
  double bandwidth = 0.0;  ///< half-maximum SNR bandwidth [rad/s]
};

struct GainCurve {
  double eta = 1.0;
  std::vector<GainCurvePoint> points;  ///< ordered by q
};

/// One curve per detection efficiency; cfg.eta_det and cfg.q are overridden by
/// the list entries. Every q must be below threshold (AboveThreshold).
std::vector<GainCurve> gain_curve(const OpticalConfig& cfg, std::span<const double> eta_list,
                                  std::span<const double> q_grid);

struct OptimalSqueeze {
  double q_opt = 0.0;       ///< golden-section argmax of the reduced G
  double gain_max = 1.0;    ///< G(q_opt); +inf when loss_limited
  double q_analytic = 0.0;  ///< stationary point of G in gamma_s, clamped to [0, q_th]
  double q_threshold = 0.0;
  /// No loss limits the enhancement (eta = 1, gamma_l = 0): G diverges at
  /// gamma_s = gamma_c and there is no finite optimum.
  bool loss_limited = false;
  /// The optimum sits on the edge of [0, q_th) rather than in its interior.
  bool at_boundary = false;
};

/// Maximises the reduced-model G over q in [0, q_th) with a 64-point seed grid
/// followed by golden-section search (relative q interval 1e-8), and checks
/// the result against the closed-form stationary point to 1e-6.
OptimalSqueeze optimal_squeeze(const OpticalConfig& cfg);

/// Integral of S^in over [0, inf) at cfg.q divided by the same at q = 0:
/// the reduction of the intra-cavity phase-quadrature variance.
double intracavity_variance_ratio(const OpticalConfig& cfg);

struct SqueezeCeiling {
  double min_noise_psd = 1.0;  ///< smallest detected S_n(0) found on the scan
  double q_at_min = 0.0;
};

/// Scans exact S_n(0) over `points` values of q evenly covering [0, q_th)
/// (cfg.q ignored) and returns the deepest detected squeezing.
SqueezeCeiling outcoupled_squeezing_ceiling(const OpticalConfig& cfg, std::size_t points = 200);

/// Golden-section maximisation of a unimodal f on [lo, hi]; stops when the
/// bracket is narrower than abs_tol.
double golden_section_maximize(const std::function<double(double)>& f, double lo, double hi,
                               double abs_tol, int max_iterations = 200);

/// Adaptive Gauss-Kronrod integral of f over [a, b] (b may be +inf). Throws
/// QuadratureFailure if the error estimate exceeds rel_tol * |integral|.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol);

}  // namespace sqz
