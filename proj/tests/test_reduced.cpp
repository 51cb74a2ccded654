#include <cmath>

#include "doctest.h"
#include "sqz/error.hpp"
#include "sqz/reduced.hpp"

using namespace sqz;

TEST_SUITE("reduced") {

TEST_CASE("rates of the reference cavity") {
  OpticalConfig cfg;
  cfg.q = 0.02;
  cfg.eta_det = 0.82;
  const CavityRates r = rates_from_optics(cfg);
  CHECK(r.gamma_c == doctest::Approx(4.0586e8).epsilon(1e-4));
  CHECK(r.gamma_l == doctest::Approx(6.223e6).epsilon(1e-3));
  CHECK(r.gamma_s == doctest::Approx(0.02 * 299792458.0 / 0.0277).epsilon(1e-14));
  CHECK(r.eta == 0.82);
  CHECK(r.prefactor == doctest::Approx(5.5507572090661857e+42).epsilon(1e-14));
}

TEST_CASE("hand case") {
  CavityRates r{1.0, 0.5, 0.0, 1.0, 1.0};
  CHECK(closed_form_bandwidth(r) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(enhancement_gain(r) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(peak_sensitivity(r) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(approx_noise_psd(r, 0.0) == doctest::Approx(1.0 - 4.0 * 0.5 / 2.25).epsilon(1e-15));
}

TEST_CASE("no squeezing and no loss saturates the standard limit") {
  CavityRates r{3.0e8, 0.0, 0.0, 1.0, standard_limit(1.0, 1550e-9, 0.0277)};
  CHECK(peak_sensitivity(r) * closed_form_bandwidth(r) ==
        doctest::Approx(r.prefactor).epsilon(1e-14));
  CHECK(enhancement_gain(r) == 1.0);
  for (double w : {0.0, 1e8, 1e10}) CHECK(approx_noise_psd(r, w) == 1.0);
}

TEST_CASE("reduced snr is a Lorentzian") {
  CavityRates r{2.0, 0.7, 0.1, 0.9, 3.0};
  const double b = closed_form_bandwidth(r);
  const double s0 = approx_snr(r, 0.0);
  CHECK(s0 == doctest::Approx(peak_sensitivity(r)).epsilon(1e-14));
  CHECK(approx_snr(r, b) == doctest::Approx(0.5 * s0).epsilon(1e-14));
}

TEST_CASE("errors") {
  CavityRates below{1.0, 1.0, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(closed_form_bandwidth(below), Error);
  CavityRates negative{-1.0, 0.0, 0.0, 1.0, 1.0};
  CHECK_THROWS_AS(validate(negative), Error);
  CHECK_THROWS_AS(standard_limit(0.0, 1e-6, 1.0), Error);
}

}  // TEST_SUITE
