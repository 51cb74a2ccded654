#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "sqz/error.hpp"
#include "sqz/estimation.hpp"
#include "sqz/optics.hpp"
#include "sqz/spectrum.hpp"

using namespace sqz;

namespace {

OpticalConfig truth() {
  OpticalConfig cfg;
  cfg.t_c_sq = 0.15;
  cfg.t_b_sq = 0.0005;
  cfg.r_int_sq = 0.0018;  // l^2 = 0.0023
  cfg.eta_det = 0.82;
  cfg.q = 0.02;
  return cfg;
}

MeasuredSpectrum synth(const OpticalConfig& cfg, bool anti, double f0, double f1, std::size_t n,
                       double noise_db = 0.0, std::mt19937_64* rng = nullptr) {
  MeasuredSpectrum d;
  d.freq_hz = log_grid(f0, f1, n);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double f : d.freq_hz) {
    const double w = 2.0 * M_PI * f;
    const double s = anti ? exact_antisqueezing_psd(cfg, w) : exact_noise_psd(cfg, w);
    double db = 10.0 * std::log10(s);
    if (rng) db += noise_db * gauss(*rng);
    d.psd_db.push_back(db);
    d.sigma_db.push_back(noise_db > 0.0 ? noise_db : 0.1);
  }
  return d;
}

FitOptions joint_options(const OpticalConfig& known) {
  FitOptions opt = default_fit_options(known);
  opt.fixed[static_cast<std::size_t>(Param::TcSq)] = true;
  return opt;
}

ErrorCode fit_error(const MeasuredSpectrum& sq, const std::optional<MeasuredSpectrum>& anti,
                    const FitOptions& opt) {
  try {
    fit_squeezing_spectrum(sq, anti, opt);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidConfig;  // sentinel: nothing thrown
}

}  // namespace

TEST_SUITE("estimation") {

TEST_CASE("noiseless joint round trip") {
  const OpticalConfig t = truth();
  const auto sq = synth(t, false, 5e6, 2e8, 50);
  const auto anti = synth(t, true, 5e6, 2e8, 50);
  const FitResult fit = fit_squeezing_spectrum(sq, anti, joint_options(t));
  CHECK(fit.value(Param::Q) == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(fit.value(Param::LossSq) == doctest::Approx(0.0023).epsilon(1e-6));
  CHECK(fit.value(Param::Eta) == doctest::Approx(0.82).epsilon(1e-6));
  CHECK(fit.value(Param::TcSq) == 0.15);
  CHECK(fit.chi2_reduced < 1e-12);
  CHECK(fit.fixed[static_cast<std::size_t>(Param::TcSq)]);
  for (bool b : fit.bounds_hit) CHECK_FALSE(b);
  for (std::size_t i = 0; i < kParamCount; ++i) {
    CHECK(fit.covariance[i * kParamCount + i] >= 0.0);
    for (std::size_t j = 0; j < kParamCount; ++j) {
      CHECK(fit.covariance[i * kParamCount + j] ==
            doctest::Approx(fit.covariance[j * kParamCount + i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("single spectrum with two free parameters") {
  const OpticalConfig t = truth();
  const auto sq = synth(t, false, 5e6, 2e9, 60);
  FitOptions opt = default_fit_options(t);
  opt.fixed[static_cast<std::size_t>(Param::TcSq)] = true;
  opt.fixed[static_cast<std::size_t>(Param::LossSq)] = true;
  opt.init[static_cast<std::size_t>(Param::LossSq)] = 0.0023;
  const FitResult fit = fit_squeezing_spectrum(sq, std::nullopt, opt);
  CHECK(fit.value(Param::Q) == doctest::Approx(0.02).epsilon(1e-6));
  CHECK(fit.value(Param::Eta) == doctest::Approx(0.82).epsilon(1e-6));
}

TEST_CASE("unidentifiable combinations raise DegenerateJacobian") {
  const OpticalConfig t = truth();
  const auto sq = synth(t, false, 5e6, 2e8, 50);
  const auto anti = synth(t, true, 5e6, 2e8, 50);
  // t_c^2, l^2 and eta enter the noise only through two combinations.
  CHECK(fit_error(sq, anti, default_fit_options(t)) == ErrorCode::DegenerateJacobian);

  // q and eta from a single spectrum far below the linewidth.
  const auto low = synth(t, false, 1e3, 3e4, 40);
  FitOptions opt = default_fit_options(t);
  opt.fixed[static_cast<std::size_t>(Param::TcSq)] = true;
  opt.fixed[static_cast<std::size_t>(Param::LossSq)] = true;
  opt.init[static_cast<std::size_t>(Param::LossSq)] = 0.0023;
  CHECK(fit_error(low, std::nullopt, opt) == ErrorCode::DegenerateJacobian);
}

TEST_CASE("vacuum data drives q to zero") {
  MeasuredSpectrum d;
  d.freq_hz = log_grid(1e6, 1e9, 30);
  d.psd_db.assign(30, 0.0);
  OpticalConfig known = truth();
  FitOptions opt = default_fit_options(known);
  opt.fixed = {false, true, true, true};
  opt.init[static_cast<std::size_t>(Param::LossSq)] = 0.0023;
  opt.init[static_cast<std::size_t>(Param::Eta)] = 0.82;
  const FitResult fit = fit_squeezing_spectrum(d, std::nullopt, opt);
  CHECK(fit.value(Param::Q) < 1e-6);
  CHECK(fit.chi2_reduced < 1e-10);
}

TEST_CASE("decibel and linear objectives agree") {
  const OpticalConfig t = truth();
  // The two estimators differ at second order in the residuals, so the
  // comparison uses data close to the model.
  std::mt19937_64 rng(11);
  const auto sq = synth(t, false, 5e6, 2e9, 200, 0.01, &rng);
  const auto anti = synth(t, true, 5e6, 2e9, 200, 0.01, &rng);
  FitOptions opt = joint_options(t);
  const FitResult db = fit_squeezing_spectrum(sq, anti, opt);
  opt.space = FitSpace::Linear;
  const FitResult lin = fit_squeezing_spectrum(sq, anti, opt);
  for (auto p : {Param::Q, Param::LossSq, Param::Eta}) {
    CHECK(lin.value(p) == doctest::Approx(db.value(p)).epsilon(1e-4));
  }
}

TEST_CASE("input errors") {
  const OpticalConfig t = truth();
  const auto few = synth(t, false, 5e6, 2e8, 3);
  CHECK(fit_error(few, std::nullopt, joint_options(t)) == ErrorCode::InsufficientData);

  auto beyond = synth(t, false, 5e6, 2e8, 20);
  beyond.freq_hz.back() = 1e10;
  CHECK(fit_error(beyond, std::nullopt, joint_options(t)) == ErrorCode::InvalidData);

  auto unsorted = synth(t, false, 5e6, 2e8, 20);
  std::swap(unsorted.freq_hz[3], unsorted.freq_hz[4]);
  CHECK(fit_error(unsorted, std::nullopt, joint_options(t)) == ErrorCode::InvalidData);

  FitOptions bad = joint_options(t);
  bad.init[static_cast<std::size_t>(Param::Eta)] = 1.5;
  const auto ok = synth(t, false, 5e6, 2e8, 20);
  CHECK(fit_error(ok, std::nullopt, bad) == ErrorCode::InvalidConfig);

  FitOptions capped = joint_options(t);
  capped.max_iterations = 1;
  const auto anti = synth(t, true, 5e6, 2e8, 20);
  CHECK(fit_error(ok, anti, capped) == ErrorCode::NonConvergence);
}

TEST_CASE("prediction band") {
  const OpticalConfig t = truth();
  std::mt19937_64 rng(3);
  const auto sq = synth(t, false, 5e6, 2e9, 100, 0.1, &rng);
  const auto anti = synth(t, true, 5e6, 2e9, 100, 0.1, &rng);
  FitResult fit = fit_squeezing_spectrum(sq, anti, joint_options(t));
  const std::vector<double> grid = {0.0, 1e7, 1e8, 5e8};
  const Spectrum p1 = predict_deamplification(fit, t, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(p1.values("deamp_db_lo")[i] < p1.values("deamp_db")[i]);
    CHECK(p1.values("deamp_db_hi")[i] > p1.values("deamp_db")[i]);
    CHECK(p1.values("deamp_db")[i] < 0.0);
  }
  FitResult doubled = fit;
  for (double& c : doubled.covariance) c *= 2.0;
  const Spectrum p2 = predict_deamplification(doubled, t, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w1 = p1.values("deamp_db_hi")[i] - p1.values("deamp_db_lo")[i];
    const double w2 = p2.values("deamp_db_hi")[i] - p2.values("deamp_db_lo")[i];
    CHECK(w2 == doctest::Approx(std::sqrt(2.0) * w1).epsilon(1e-9));
  }
}

TEST_CASE("noiseless prediction matches the generator") {
  const OpticalConfig t = truth();
  const auto sq = synth(t, false, 5e6, 2e8, 50);
  const auto anti = synth(t, true, 5e6, 2e8, 50);
  const FitResult fit = fit_squeezing_spectrum(sq, anti, joint_options(t));
  const std::vector<double> grid = {0.0};
  const Spectrum p = predict_deamplification(fit, t, grid);
  OpticalConfig passive = t;
  passive.q = 0.0;
  const double expect =
      10.0 * std::log10(exact_signal_tf_sq(t, 0.0) / exact_signal_tf_sq(passive, 0.0));
  CHECK(std::abs(p.values("deamp_db")[0] - expect) < 1e-6);
}

TEST_CASE("zero squeezing predicts nothing") {
  FitResult fit;
  fit.params = {0.0, 0.15, 0.0023, 0.82};
  fit.config = config_from_params(truth(), fit.params);
  const std::vector<double> grid = {0.0, 1e8};
  const Spectrum p = predict_deamplification(fit, truth(), grid);
  const Spectrum g = snr_improvement(fit, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(p.values("deamp_db")[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    CHECK(p.values("deamp_db_lo")[i] == p.values("deamp_db_hi")[i]);
    CHECK(g.values("snr_gain_db")[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  }
}

TEST_CASE("snr improvement") {
  FitResult fit;
  fit.params = {0.02, 0.15, 0.0023, 0.82};
  fit.config = config_from_params(truth(), fit.params);
  const double fsr_hz = fit.config.omega_fsr() / (2.0 * M_PI);
  const std::vector<double> grid = {0.0, 0.4 * fsr_hz};
  const Spectrum g = snr_improvement(fit, grid);
  CHECK(g.values("snr_gain_db")[0] > 0.0);
  CHECK(std::abs(g.values("snr_gain_db")[1]) < 0.05);
}

TEST_CASE("parameter names") {
  CHECK(param_index("q") == 0u);
  CHECK(param_index("l_sq") == 2u);
  CHECK_FALSE(param_index("gamma").has_value());
  OpticalConfig c = config_from_params(truth(), {0.01, 0.1, 0.003, 0.9});
  CHECK(c.r_int_sq == doctest::Approx(0.0025).epsilon(1e-14));
  CHECK(c.t_b_sq == 0.0005);
}

}  // TEST_SUITE
