#include <cmath>

#include "doctest.h"
#include "sqz/error.hpp"
#include "sqz/optics.hpp"

using namespace sqz;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no sqz::Error thrown");
  return ErrorCode::InvalidConfig;
}

}  // namespace

TEST_SUITE("optics") {

TEST_CASE("reference cavity threshold and timing") {
  OpticalConfig cfg;
  CHECK(opo_threshold(cfg) == doctest::Approx(0.041205169121521).epsilon(1e-10));
  CHECK(cfg.tau() == doctest::Approx(0.0277 / 299792458.0).epsilon(1e-15));
  CHECK(cfg.omega_fsr() * cfg.tau() == doctest::Approx(M_PI).epsilon(1e-15));

  OpticalConfig lossless_back = cfg;
  lossless_back.t_b_sq = 0.0;
  lossless_back.r_int_sq = 0.0;
  CHECK(opo_threshold(lossless_back) == doctest::Approx(0.0406297).epsilon(1e-6));
}

TEST_CASE("vacuum input gives shot noise exactly") {
  OpticalConfig cfg;
  cfg.eta_det = 0.7;
  for (double w : {0.0, 1e6, 3.3e8, 1e10}) {
    CHECK(exact_noise_psd(cfg, w) == 1.0);
    CHECK(exact_antisqueezing_psd(cfg, w) == 1.0);
  }
}

TEST_CASE("frozen values at the reference cavity") {
  OpticalConfig cfg;
  cfg.q = 0.02;
  cfg.eta_det = 0.82;
  CHECK(exact_noise_psd(cfg, 0.0) == doctest::Approx(0.28905831119994).epsilon(1e-11));
  CHECK(exact_signal_tf_sq(cfg, 0.0) == doctest::Approx(4.932724225074754e+43).epsilon(1e-11));
  CHECK(std::norm(exact_signal_tf(cfg, 0.0)) == doctest::Approx(8.8865789644302).epsilon(1e-11));
  CHECK(cfg.sensitivity_prefactor() == doctest::Approx(5.5507572090661857e+42).epsilon(1e-14));
}

TEST_CASE("squeezing below and anti-squeezing above shot noise") {
  OpticalConfig cfg;
  cfg.eta_det = 0.9;
  for (double f : {0.1, 0.5, 0.9}) {
    cfg.q = f * opo_threshold(cfg);
    for (double w : {0.0, 1e8, 1e9}) {
      CHECK(exact_noise_psd(cfg, w) < 1.0);
      CHECK(exact_antisqueezing_psd(cfg, w) > 1.0);
    }
  }
}

TEST_CASE("noise is periodic in the free spectral range and symmetric") {
  OpticalConfig cfg;
  cfg.q = 0.03;
  const double fsr = cfg.omega_fsr();
  for (double w : {1e7, 2e8, 1.1e9}) {
    CHECK(exact_noise_psd(cfg, w + fsr) == doctest::Approx(exact_noise_psd(cfg, w)).epsilon(1e-9));
    CHECK(exact_noise_psd(cfg, fsr - w) == doctest::Approx(exact_noise_psd(cfg, w)).epsilon(1e-9));
  }
}

TEST_CASE("detection loss mixes the spectrum toward shot noise") {
  OpticalConfig cfg;
  cfg.q = 0.025;
  const double ideal = exact_noise_psd(cfg, 0.0);
  cfg.eta_det = 0.6;
  CHECK(exact_noise_psd(cfg, 0.0) == doctest::Approx(0.6 * ideal + 0.4).epsilon(1e-13));
}

TEST_CASE("threshold and configuration errors") {
  OpticalConfig cfg;
  cfg.q = opo_threshold(cfg);
  CHECK(code_of([&] { exact_noise_psd(cfg, 0.0); }) == ErrorCode::AboveThreshold);
  CHECK(code_of([&] { exact_signal_tf_sq(cfg, 0.0); }) == ErrorCode::AboveThreshold);
  cfg.q = -0.001;
  CHECK(code_of([&] { exact_noise_psd(cfg, 0.0); }) == ErrorCode::InvalidConfig);
  OpticalConfig bad;
  bad.t_c_sq = 1.5;
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidConfig);
  bad = {};
  bad.length = 0.0;
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidConfig);
  bad = {};
  bad.eta_det = std::nan("");
  CHECK(code_of([&] { validate(bad); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("analytic partials match central differences") {
  OpticalConfig cfg;
  cfg.eta_det = 0.82;
  for (double qs : {0.02, -0.02, 0.035}) {
    for (double w : {0.0, 2e8, 9e8}) {
      const auto d = detail::noise_psd_signed_partials(cfg, qs, w);
      auto f = [&](int k, double h) {
        OpticalConfig c = cfg;
        double q = qs;
        if (k == 0) q += h;
        if (k == 1) c.t_c_sq += h;
        if (k == 2) c.r_int_sq += h;
        if (k == 3) c.eta_det += h;
        return detail::noise_psd_signed(c, q, w);
      };
      for (int k = 0; k < 4; ++k) {
        const double h = 1e-6;
        const double fd = (f(k, h) - f(k, -h)) / (2.0 * h);
        CHECK(d[k] == doctest::Approx(fd).epsilon(1e-6).scale(1e-9));
      }
    }
  }
}

TEST_CASE("intra-cavity spectrum") {
  OpticalConfig cfg;
  CHECK(intracavity_squeeze_ratio(cfg) == 1.0);
  cfg.q = 0.02;
  CHECK(intracavity_squeeze_ratio(cfg) < 1.0);
  CHECK(intracavity_phase_psd(cfg, 5e8) < intracavity_phase_psd(cfg, 0.0));
}

}  // TEST_SUITE
