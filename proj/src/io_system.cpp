#include "sqz/io_system.hpp"

#include <Eigen/Dense>
#include <sstream>

#include "sqz/error.hpp"

namespace sqz {

namespace {

using Mat3 = Eigen::Matrix3cd;
using Rhs = Eigen::Matrix<std::complex<double>, 3, 5>;

struct QuadratureSolve {
  Eigen::Matrix<std::complex<double>, 1, 5> detected;
  double rcond;
};

// Unknowns (a, b, d): field after the coupler heading into the cavity, field
// returning to the coupler, detected field. Source columns are
// (v, n_c, n_int, n_ext, s).
QuadratureSolve solve_quadrature(const OpticalConfig& cfg, double omega, double q_signed,
                                 bool with_signal) {
  using namespace std::complex_literals;
  const double tau = cfg.tau();
  const std::complex<double> z = std::exp(2i * omega * tau);
  const std::complex<double> z1 = std::exp(1i * omega * tau);
  const double t_c = cfg.t_c(), r_c = cfg.r_c();
  const double t_b = cfg.t_b(), r_b = cfg.r_b();
  const double t_int = cfg.t_int(), r_int = cfg.r_int();
  const double t_det = cfg.t_det(), r_det = cfg.r_det();

  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.0;
  m(0, 1) = -r_c;
  m(1, 0) = -t_int * r_b * z * std::exp(2.0 * q_signed);
  m(1, 1) = 1.0;
  m(2, 1) = -t_det * t_c;
  m(2, 2) = 1.0;

  Rhs rhs = Rhs::Zero();
  rhs(0, 0) = t_c;
  rhs(1, 1) = t_int * t_b * z1 * std::exp(q_signed);
  rhs(1, 2) = r_int;
  rhs(2, 0) = -t_det * r_c;
  rhs(2, 3) = r_det;
  if (with_signal) rhs(1, 4) = t_int * z1 * std::exp(q_signed);

  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double rcond = sv(2) / sv(0);
  if (!(rcond >= kSingularRcond)) {
    std::ostringstream os;
    os << "input-output system singular (rcond = " << rcond << ") at q = " << q_signed
       << ", omega = " << omega;
    throw Error(ErrorCode::SingularSystem, os.str());
  }
  const Rhs sol = svd.solve(rhs);
  return {sol.row(2), rcond};
}

PortCoefficients ports(const Eigen::Matrix<std::complex<double>, 1, 5>& row) {
  return {row(0), row(1), row(2), row(3)};
}

}  // namespace

double PortCoefficients::psd() const {
  return std::norm(v) + std::norm(n_c) + std::norm(n_int) + std::norm(n_ext);
}

IoSolution io_system_solve(const OpticalConfig& cfg, double omega) {
  validate(cfg);
  // The amplitude quadrature sees round-trip gain e^{2q}, the phase
  // quadrature e^{-2q}; only the phase quadrature carries the signal.
  const QuadratureSolve x = solve_quadrature(cfg, omega, cfg.q, false);
  const QuadratureSolve y = solve_quadrature(cfg, omega, -cfg.q, true);
  IoSolution out;
  out.amplitude = ports(x.detected);
  out.phase = ports(y.detected);
  out.signal = y.detected(4);
  out.rcond = std::min(x.rcond, y.rcond);
  return out;
}

}  // namespace sqz
