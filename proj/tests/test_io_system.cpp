#include <cmath>
#include <random>

#include "doctest.h"
#include "sqz/error.hpp"
#include "sqz/io_system.hpp"
#include "sqz/optics.hpp"

using namespace sqz;

TEST_SUITE("io_system") {

TEST_CASE("oracle matches the closed forms at the reference cavity") {
  OpticalConfig cfg;
  cfg.eta_det = 0.82;
  for (double f : {0.0, 0.3, 0.8, 0.99}) {
    cfg.q = f * opo_threshold(cfg);
    for (double w : {0.0, 5e7, 4e8, 2.1e9}) {
      const IoSolution s = io_system_solve(cfg, w);
      CHECK(s.noise_psd() == doctest::Approx(exact_noise_psd(cfg, w)).epsilon(1e-11));
      CHECK(s.antisqueezing_psd() ==
            doctest::Approx(exact_antisqueezing_psd(cfg, w)).epsilon(1e-11));
      CHECK(s.signal_tf_sq(cfg.sensitivity_prefactor()) ==
            doctest::Approx(exact_signal_tf_sq(cfg, w)).epsilon(1e-11));
      CHECK(std::abs(s.signal - exact_signal_tf(cfg, w)) <=
            1e-11 * std::abs(exact_signal_tf(cfg, w)));
    }
  }
}

TEST_CASE("frozen oracle value") {
  OpticalConfig cfg;
  cfg.q = 0.02;
  cfg.eta_det = 0.82;
  CHECK(io_system_solve(cfg, 0.0).noise_psd() == doctest::Approx(0.28905831119994).epsilon(1e-11));
}

TEST_CASE("vacuum input: port coefficients are unitary") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    OpticalConfig cfg;
    cfg.t_c_sq = 0.01 + 0.5 * u(rng);
    cfg.t_b_sq = 0.01 * u(rng);
    cfg.r_int_sq = 0.01 * u(rng);
    cfg.eta_det = 0.5 + 0.5 * u(rng);
    const IoSolution s = io_system_solve(cfg, 1e9 * u(rng));
    CHECK(s.noise_psd() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(s.antisqueezing_psd() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("threshold makes the amplitude system singular") {
  OpticalConfig cfg;
  cfg.q = opo_threshold(cfg);
  CHECK_THROWS_AS(io_system_solve(cfg, 0.0), Error);
  try {
    io_system_solve(cfg, 0.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularSystem);
  }
  // Away from resonance the same q is regular.
  CHECK_NOTHROW(io_system_solve(cfg, 0.5 * cfg.omega_fsr()));
  cfg.q -= 1e-6;
  const IoSolution s = io_system_solve(cfg, 0.0);
  CHECK(s.rcond > kSingularRcond);
  CHECK(s.rcond < 1e-5);
}

}  // TEST_SUITE
