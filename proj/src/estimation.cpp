#include "sqz/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sqz/constants.hpp"
#include "sqz/error.hpp"

namespace sqz {

namespace {

constexpr double kDbPerNeper = 10.0 / std::numbers::ln10;  // d(10 log10 S) = kDbPerNeper dS / S
constexpr double kRelDecreaseTol = 1e-10;
constexpr double kGradientTol = 1e-8;
constexpr double kBoundHitTol = 1e-6;
constexpr std::size_t kMinPoints = 8;

std::size_t idx(Param p) { return static_cast<std::size_t>(p); }

// Smooth map between an unbounded coordinate x and a bounded parameter p.
struct Transform {
  Interval bounds;

  bool two_sided() const { return std::isfinite(bounds.hi); }

  double to_param(double x) const {
    if (two_sided()) return bounds.lo + (bounds.hi - bounds.lo) / (1.0 + std::exp(-x));
    return bounds.lo + std::exp(x);
  }
  double dparam_dx(double x) const {
    if (two_sided()) {
      const double s = 1.0 / (1.0 + std::exp(-x));
      return (bounds.hi - bounds.lo) * s * (1.0 - s);
    }
    return std::exp(x);
  }
  double to_x(double p) const {
    if (two_sided()) {
      const double s = (p - bounds.lo) / (bounds.hi - bounds.lo);
      return std::log(s / (1.0 - s));
    }
    return std::log(p - bounds.lo);
  }
  bool at_bound(double p, double init) const {
    if (two_sided()) {
      const double w = bounds.hi - bounds.lo;
      return (p - bounds.lo) < kBoundHitTol * w || (bounds.hi - p) < kBoundHitTol * w;
    }
    return (p - bounds.lo) < kBoundHitTol * (init - bounds.lo);
  }
};

struct Dataset {
  const MeasuredSpectrum* data;
  double sign;  // +1 squeezing, -1 anti-squeezing
};

class Problem {
 public:
  Problem(std::vector<Dataset> sets, const FitOptions& opt) : sets_(std::move(sets)), opt_(opt) {
    for (std::size_t k = 0; k < kParamCount; ++k) {
      if (!opt_.fixed[k]) free_.push_back(k);
    }
    for (const auto& s : sets_) rows_ += s.data->size();
  }

  std::size_t rows() const { return rows_; }
  const std::vector<std::size_t>& free() const { return free_; }

  // Weighted residuals and the Jacobian with respect to the free physical
  // parameters.
  void evaluate(const ParamVector& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const OpticalConfig cfg = config_from_params(opt_.known, p);
    r.resize(static_cast<Eigen::Index>(rows_));
    if (jac) jac->resize(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(free_.size()));
    Eigen::Index row = 0;
    for (const auto& set : sets_) {
      const MeasuredSpectrum& d = *set.data;
      const double q = set.sign * p[idx(Param::Q)];
      for (std::size_t i = 0; i < d.size(); ++i, ++row) {
        const double omega = constants::two_pi * d.freq_hz[i];
        const double s = detail::noise_psd_signed(cfg, q, omega);
        if (!(s > 0.0)) throw Error(ErrorCode::NumericalDomain, "model PSD not positive");
        const double sigma_db = d.sigma(i);
        double scale;  // d(residual)/dS
        if (opt_.space == FitSpace::Decibel) {
          r(row) = (kDbPerNeper * std::log(s) - d.psd_db[i]) / sigma_db;
          scale = kDbPerNeper / (s * sigma_db);
        } else {
          const double s_data = std::pow(10.0, d.psd_db[i] / 10.0);
          const double sigma_lin = sigma_db * s_data / kDbPerNeper;
          r(row) = (s - s_data) / sigma_lin;
          scale = 1.0 / sigma_lin;
        }
        if (!jac) continue;
        // Partials are with respect to (q_signed, t_c^2, r_int^2, eta);
        // l^2 = r_int^2 + t_b^2 with t_b^2 fixed.
        const auto g = detail::noise_psd_signed_partials(cfg, q, omega);
        const std::array<double, kParamCount> dp = {set.sign * g[0], g[1], g[2], g[3]};
        for (std::size_t c = 0; c < free_.size(); ++c) {
          (*jac)(row, static_cast<Eigen::Index>(c)) = scale * dp[free_[c]];
        }
      }
    }
  }

 private:
  std::vector<Dataset> sets_;
  const FitOptions& opt_;
  std::vector<std::size_t> free_;
  std::size_t rows_ = 0;
};

double conditioning_ratio(const Eigen::MatrixXd& jac) {
  if (jac.cols() == 0) return 1.0;
  Eigen::MatrixXd normalised = jac;
  for (Eigen::Index c = 0; c < jac.cols(); ++c) {
    const double n = jac.col(c).norm();
    if (!(n > 0.0)) return 0.0;
    normalised.col(c) /= n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normalised);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) / sv(0);
}

void check_identifiable(const Eigen::MatrixXd& jac, const char* where) {
  const double ratio = conditioning_ratio(jac);
  if (!(ratio >= kDegenerateRatio)) {
    std::ostringstream os;
    os << "Jacobian " << where << " has sigma_min/sigma_max = " << ratio
       << "; the free parameters are not separately identifiable from these data";
    throw Error(ErrorCode::DegenerateJacobian, os.str());
  }
}

void check_data(const MeasuredSpectrum& d, const OpticalConfig& known, const char* label) {
  validate(d);
  const double f_max = known.omega_fsr() / constants::two_pi;
  if (!d.freq_hz.empty() && !(d.freq_hz.back() < f_max)) {
    std::ostringstream os;
    os << label << " frequencies reach " << d.freq_hz.back() << " Hz, beyond the FSR " << f_max
       << " Hz";
    throw Error(ErrorCode::InvalidData, os.str());
  }
}

}  // namespace

std::optional<std::size_t> param_index(std::string_view name) {
  for (std::size_t k = 0; k < kParamCount; ++k) {
    if (kParamNames[k] == name) return k;
  }
  return std::nullopt;
}

void validate(const MeasuredSpectrum& data) {
  if (data.psd_db.size() != data.freq_hz.size() ||
      (!data.sigma_db.empty() && data.sigma_db.size() != data.freq_hz.size())) {
    throw Error(ErrorCode::InvalidData, "measured spectrum columns differ in length");
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data.freq_hz[i]) || !std::isfinite(data.psd_db[i])) {
      throw Error(ErrorCode::InvalidData, "non-finite value in measured spectrum");
    }
    if (i > 0 && !(data.freq_hz[i] > data.freq_hz[i - 1])) {
      throw Error(ErrorCode::InvalidData, "measured frequencies not strictly increasing");
    }
    if (!data.sigma_db.empty() && !(data.sigma_db[i] > 0.0)) {
      throw Error(ErrorCode::InvalidData, "sigma_db must be positive");
    }
  }
}

OpticalConfig config_from_params(const OpticalConfig& known, const ParamVector& p) {
  OpticalConfig cfg = known;
  cfg.q = p[idx(Param::Q)];
  cfg.t_c_sq = p[idx(Param::TcSq)];
  cfg.r_int_sq = std::max(0.0, p[idx(Param::LossSq)] - known.t_b_sq);
  cfg.eta_det = p[idx(Param::Eta)];
  return cfg;
}

FitOptions default_fit_options(const OpticalConfig& known) {
  FitOptions opt;
  opt.known = known;
  opt.bounds[idx(Param::Q)] = {0.0, std::numeric_limits<double>::infinity()};
  opt.bounds[idx(Param::TcSq)] = {0.0, 1.0};
  opt.bounds[idx(Param::LossSq)] = {known.t_b_sq, 1.0};
  opt.bounds[idx(Param::Eta)] = {0.0, 1.0};
  const double l_sq = std::max(1000e-6, known.t_b_sq + 100e-6);
  OpticalConfig guess = known;
  guess.r_int_sq = l_sq - known.t_b_sq;
  opt.init = {0.5 * opo_threshold(guess), known.t_c_sq, l_sq, 0.85};
  return opt;
}

FitResult fit_squeezing_spectrum(const MeasuredSpectrum& squeezing,
                                 const std::optional<MeasuredSpectrum>& antisqueezing,
                                 const FitOptions& options) {
  validate(options.known);
  check_data(squeezing, options.known, "squeezing");
  if (squeezing.size() < kMinPoints) {
    std::ostringstream os;
    os << "squeezing spectrum has " << squeezing.size() << " points, need at least "
       << kMinPoints;
    throw Error(ErrorCode::InsufficientData, os.str());
  }
  std::vector<Dataset> sets = {{&squeezing, +1.0}};
  if (antisqueezing) {
    check_data(*antisqueezing, options.known, "anti-squeezing");
    sets.push_back({&*antisqueezing, -1.0});
  }

  // Bounds and transforms; l^2 can never drop below t_b^2.
  std::array<Transform, kParamCount> tf;
  for (std::size_t k = 0; k < kParamCount; ++k) tf[k].bounds = options.bounds[k];
  tf[idx(Param::LossSq)].bounds.lo =
      std::max(tf[idx(Param::LossSq)].bounds.lo, options.known.t_b_sq);
  for (std::size_t k = 0; k < kParamCount; ++k) {
    const auto& b = tf[k].bounds;
    const double v = options.init[k];
    const bool inside = options.fixed[k] ? (v >= b.lo && v <= b.hi) : (v > b.lo && v < b.hi);
    if (!inside || !(b.hi > b.lo)) {
      std::ostringstream os;
      os << "initial " << kParamNames[k] << " = " << v << " not inside (" << b.lo << ", " << b.hi
         << ")";
      throw Error(ErrorCode::InvalidConfig, os.str());
    }
  }

  const Problem problem(std::move(sets), options);
  const auto& free = problem.free();
  const auto n_free = static_cast<Eigen::Index>(free.size());
  if (problem.rows() <= free.size()) {
    throw Error(ErrorCode::InsufficientData, "fewer data points than free parameters");
  }

  ParamVector p = options.init;
  Eigen::VectorXd x(n_free);
  for (Eigen::Index c = 0; c < n_free; ++c) x(c) = tf[free[c]].to_x(p[free[c]]);
  auto params_at = [&](const Eigen::VectorXd& xv) {
    ParamVector out = options.init;
    for (Eigen::Index c = 0; c < n_free; ++c) out[free[c]] = tf[free[c]].to_param(xv(c));
    return out;
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd jac_phys;
  problem.evaluate(p, r, &jac_phys);
  check_identifiable(jac_phys, "at the initial guess");

  FitResult result;
  double cost = 0.5 * r.squaredNorm();
  double lambda = 1e-3;
  int iter = 0;
  bool converged = n_free == 0;
  if (converged) result.termination = "nothing to fit";
  for (; !converged && iter < options.max_iterations; ++iter) {
    Eigen::MatrixXd jac = jac_phys;
    for (Eigen::Index c = 0; c < n_free; ++c) jac.col(c) *= tf[free[c]].dparam_dx(x(c));
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (grad.norm() < kGradientTol) {
      converged = true;
      result.termination = "gradient norm below tolerance";
      break;
    }
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::VectorXd diag = jtj.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd a = jtj;
      a.diagonal() += lambda * diag;
      const Eigen::VectorXd step = a.ldlt().solve(-grad);
      const Eigen::VectorXd x_trial = x + step;
      const ParamVector p_trial = params_at(x_trial);
      Eigen::VectorXd r_trial;
      double cost_trial = std::numeric_limits<double>::infinity();
      try {
        problem.evaluate(p_trial, r_trial, nullptr);
        cost_trial = 0.5 * r_trial.squaredNorm();
      } catch (const Error&) {
        // Trial step left the model's domain (e.g. crossed the OPO threshold).
      }
      if (std::isfinite(cost_trial) && cost_trial < cost) {
        const double rel_decrease = (cost - cost_trial) / cost;
        x = x_trial;
        p = p_trial;
        cost = cost_trial;
        problem.evaluate(p, r, &jac_phys);
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (rel_decrease < kRelDecreaseTol) {
          converged = true;
          result.termination = "relative objective decrease below tolerance";
        }
      } else {
        lambda *= 4.0;
        if (lambda > 1e16) {
          // No descent direction left at working precision.
          converged = true;
          result.termination = "relative objective decrease below tolerance";
          break;
        }
      }
    }
  }
  result.iterations = iter;
  if (!converged) {
    std::ostringstream os;
    os << "no convergence after " << options.max_iterations << " iterations (objective "
       << 2.0 * cost << ", q = " << p[0] << ")";
    throw Error(ErrorCode::NonConvergence, os.str());
  }

  check_identifiable(jac_phys, "at the optimum");

  const double dof = static_cast<double>(problem.rows() - free.size());
  result.chi2_reduced = r.squaredNorm() / dof;
  result.params = p;
  result.fixed = options.fixed;
  result.config = config_from_params(options.known, p);
  for (std::size_t k = 0; k < kParamCount; ++k) {
    result.bounds_hit[k] = !options.fixed[k] && tf[k].at_bound(p[k], options.init[k]);
  }
  if (n_free > 0) {
    const Eigen::MatrixXd jtj = jac_phys.transpose() * jac_phys;
    Eigen::MatrixXd cov = jtj.completeOrthogonalDecomposition().pseudoInverse();
    cov = 0.5 * (cov + cov.transpose()) * result.chi2_reduced;
    for (Eigen::Index i = 0; i < n_free; ++i) {
      for (Eigen::Index j = 0; j < n_free; ++j) {
        result.covariance[free[i] * kParamCount + free[j]] = cov(i, j);
      }
    }
  }
  return result;
}

namespace {

double deamp_db(const OpticalConfig& known, const ParamVector& p, double omega) {
  const OpticalConfig cfg = config_from_params(known, p);
  OpticalConfig passive = cfg;
  passive.q = 0.0;
  return 10.0 * std::log10(exact_signal_tf_sq(cfg, omega) / exact_signal_tf_sq(passive, omega));
}

// Physical domain of each parameter for finite-difference probes.
bool in_domain(const OpticalConfig& known, std::size_t k, double v) {
  switch (static_cast<Param>(k)) {
    case Param::Q: return v >= 0.0;
    case Param::TcSq: return v >= 0.0 && v < 1.0;
    case Param::LossSq: return v >= known.t_b_sq && v < 1.0;
    case Param::Eta: return v >= 0.0 && v <= 1.0;
  }
  return false;
}

}  // namespace

Spectrum predict_deamplification(const FitResult& fit, const OpticalConfig& known,
                                 std::span<const double> freq_hz, double band_sigma) {
  std::vector<double> omega(freq_hz.size());
  for (std::size_t i = 0; i < freq_hz.size(); ++i) omega[i] = constants::two_pi * freq_hz[i];
  Spectrum spec(omega);
  const OpticalConfig cfg = config_from_params(known, fit.params);
  const std::size_t n = omega.size();
  std::vector<double> deamp(n), lo(n), hi(n), sqz_db(n);

  for (std::size_t i = 0; i < n; ++i) {
    deamp[i] = deamp_db(known, fit.params, omega[i]);
    sqz_db[i] = 10.0 * std::log10(exact_noise_psd(cfg, omega[i]));

    // First-order propagation, finite-difference gradient with relative step 1e-6.
    std::array<double, kParamCount> grad{};
    for (std::size_t k = 0; k < kParamCount; ++k) {
      if (fit.covariance[k * kParamCount + k] == 0.0) continue;
      const double v = fit.params[k];
      const double h = 1e-6 * (v != 0.0 ? std::abs(v) : 1.0);
      ParamVector plus = fit.params, minus = fit.params;
      plus[k] = v + h;
      minus[k] = v - h;
      const bool up = in_domain(known, k, plus[k]);
      const bool down = in_domain(known, k, minus[k]);
      if (up && down) {
        grad[k] = (deamp_db(known, plus, omega[i]) - deamp_db(known, minus, omega[i])) / (2.0 * h);
      } else if (up) {
        grad[k] = (deamp_db(known, plus, omega[i]) - deamp[i]) / h;
      } else if (down) {
        grad[k] = (deamp[i] - deamp_db(known, minus, omega[i])) / h;
      }
    }
    double var = 0.0;
    for (std::size_t a = 0; a < kParamCount; ++a) {
      for (std::size_t b = 0; b < kParamCount; ++b) {
        var += grad[a] * fit.covariance[a * kParamCount + b] * grad[b];
      }
    }
    const double half_width = band_sigma * std::sqrt(std::max(0.0, var));
    lo[i] = deamp[i] - half_width;
    hi[i] = deamp[i] + half_width;
  }
  spec.set_channel("deamp_db", "dB", std::move(deamp));
  spec.set_channel("deamp_db_lo", "dB", std::move(lo));
  spec.set_channel("deamp_db_hi", "dB", std::move(hi));
  spec.set_channel("squeezing_db_model", "dB", std::move(sqz_db));
  return spec;
}

Spectrum snr_improvement(const FitResult& fit, std::span<const double> freq_hz) {
  Spectrum spec = predict_deamplification(fit, fit.config, freq_hz);
  const auto deamp = spec.values("deamp_db");
  const auto sqz_db = spec.values("squeezing_db_model");
  std::vector<double> gain(spec.size());
  for (std::size_t i = 0; i < gain.size(); ++i) gain[i] = deamp[i] - sqz_db[i];
  spec.set_channel("snr_gain_db", "dB", std::move(gain));
  return spec;
}

}  // namespace sqz
