#pragma once

// Direct numerical solution of the cavity's input-output equations, one
// 3x3 complex linear system per quadrature. Independent of the closed forms
// in optics.hpp and used to verify them.

#include <complex>

#include "sqz/optics.hpp"

namespace sqz {

/// Coefficients of the detected field on each uncorrelated unit-variance
/// input port: the coupler vacuum v, the back-mirror port n_c, internal
/// loss n_int and detection loss n_ext.
struct PortCoefficients {
  std::complex<double> v;
  std::complex<double> n_c;
  std::complex<double> n_int;
  std::complex<double> n_ext;

  /// Sum of squared moduli: the PSD of the detected quadrature.
  double psd() const;
};

struct IoSolution {
  PortCoefficients amplitude;  ///< d_x, the amplified quadrature
  PortCoefficients phase;      ///< d_y, the squeezed (detected) quadrature
  /// Coefficient of the signal source 2 i k_p E x(Omega) in d_y.
  std::complex<double> signal;
  /// Smallest reciprocal condition number of the two system matrices.
  double rcond = 0.0;

  double noise_psd() const { return phase.psd(); }
  double antisqueezing_psd() const { return amplitude.psd(); }
  /// |T|^2 with the 8 pi P_c / (hbar lambda L) normalisation.
  double signal_tf_sq(double prefactor) const { return prefactor * std::norm(signal); }
};

/// Systems with reciprocal condition number below this are reported singular.
inline constexpr double kSingularRcond = 1e-12;

/// Solves both quadrature systems at angular frequency omega. Does not check
/// the threshold; throws Error{SingularSystem} when a system matrix is
/// numerically singular, which happens at q = q_th for Omega = k pi / tau.
IoSolution io_system_solve(const OpticalConfig& cfg, double omega);

}  // namespace sqz
