#pragma once

// Weighted nonlinear least-squares fit of the exact noise model to measured
// squeezing (and optionally anti-squeezing) spectra, and the predictions that
// follow from the fitted parameters.

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqz/optics.hpp"
#include "sqz/spectrum.hpp"

namespace sqz {

/// Fitted parameters, in this order everywhere (covariance rows included).
enum class Param : std::size_t { Q = 0, TcSq = 1, LossSq = 2, Eta = 3 };
inline constexpr std::size_t kParamCount = 4;
inline constexpr std::array<std::string_view, kParamCount> kParamNames = {"q", "t_c_sq", "l_sq",
                                                                         "eta"};
using ParamVector = std::array<double, kParamCount>;

/// Returns the index of a parameter name, or nullopt.
std::optional<std::size_t> param_index(std::string_view name);

struct MeasuredSpectrum {
  std::vector<double> freq_hz;   ///< strictly increasing
  std::vector<double> psd_db;    ///< relative to shot noise
  std::vector<double> sigma_db;  ///< 1 sigma per point; empty means uniform 1 dB

  std::size_t size() const { return freq_hz.size(); }
  double sigma(std::size_t i) const { return sigma_db.empty() ? 1.0 : sigma_db[i]; }
};

/// Throws InvalidData for mismatched lengths, unordered frequencies or
/// non-positive sigmas.
void validate(const MeasuredSpectrum& data);

struct Interval {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
};

enum class FitSpace { Decibel, Linear };

struct FitOptions {
  /// Supplies lambda0, length, t_b_sq, p_circ; t_c_sq also seeds the default
  /// initial guess.
  OpticalConfig known;
  ParamVector init{};
  std::array<Interval, kParamCount> bounds{};
  std::array<bool, kParamCount> fixed{};
  FitSpace space = FitSpace::Decibel;
  int max_iterations = 500;
};

/// Default options: q = q_th / 2, eta = 0.85, l^2 = 1000 ppm (at least t_b^2),
/// t_c^2 from `known`; q in [0, inf), t_c^2 and eta in [0, 1],
/// l^2 in [t_b^2, 1].
FitOptions default_fit_options(const OpticalConfig& known);

struct FitResult {
  ParamVector params{};
  /// Row-major 4x4 in Param order; rows and columns of fixed parameters are zero.
  std::array<double, kParamCount * kParamCount> covariance{};
  double chi2_reduced = 0.0;
  std::array<bool, kParamCount> bounds_hit{};
  std::array<bool, kParamCount> fixed{};
  int iterations = 0;
  std::string termination;
  /// The known configuration with the fitted parameters applied.
  OpticalConfig config;

  double variance(Param p) const {
    const auto i = static_cast<std::size_t>(p);
    return covariance[i * kParamCount + i];
  }
  double value(Param p) const { return params[static_cast<std::size_t>(p)]; }
};

/// Weighted least squares of 10 log10 S_n (or S_n itself in FitSpace::Linear)
/// against the data, Levenberg-Marquardt in log / logit coordinates.
///
/// Anti-squeezing data, when given, is modelled with q -> -q and breaks the
/// q-eta degeneracy of a single spectrum. Throws InsufficientData (< 8
/// points), DegenerateJacobian (column-normalised Jacobian with
/// sigma_min / sigma_max < 1e-6 at the start or at the optimum),
/// NonConvergence (iteration cap) or InvalidConfig (init outside bounds).
FitResult fit_squeezing_spectrum(const MeasuredSpectrum& squeezing,
                                 const std::optional<MeasuredSpectrum>& antisqueezing,
                                 const FitOptions& options);

inline constexpr double kDegenerateRatio = 1e-6;

/// Predicted signal deamplification 10 log10(|T|^2 / |T|^2_{q=0}) on
/// freq_hz with a +-band_sigma confidence band propagated from the fit
/// covariance. Channels: deamp_db, deamp_db_lo, deamp_db_hi,
/// squeezing_db_model. `known` supplies the non-fitted fields.
Spectrum predict_deamplification(const FitResult& fit, const OpticalConfig& known,
                                 std::span<const double> freq_hz, double band_sigma = 2.0);

/// predict_deamplification plus snr_gain_db = deamp_db - squeezing_db.
Spectrum snr_improvement(const FitResult& fit, std::span<const double> freq_hz);

/// Builds the exact-model configuration for a parameter vector.
OpticalConfig config_from_params(const OpticalConfig& known, const ParamVector& p);

}  // namespace sqz
