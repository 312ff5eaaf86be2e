#include "zeno/spectrum.hpp"

#include <cmath>

#include "doctest.h"

using namespace zeno;

TEST_CASE("thermal occupation at the gap") {
  InverseTemperature T{1.0};
  // 1 / (e - 1)
  CHECK(thermal_occupation(1.0, T) == doctest::Approx(0.5819767068693265).epsilon(1e-15));
  // n(-w) = -(1 + n(w)) for any w, T
  for (double w : {0.2, 1.0, 3.7}) {
    CHECK(thermal_occupation(-w, T) ==
          doctest::Approx(-(1.0 + thermal_occupation(w, T))).epsilon(1e-14));
  }
  CHECK_THROWS_AS((void)thermal_occupation(0.0, T), std::domain_error);

  auto T0 = InverseTemperature::zero_temperature();
  CHECK(thermal_occupation(2.0, T0) == 0.0);
  CHECK(thermal_occupation(-2.0, T0) == -1.0);
}

TEST_CASE("lorentzian coupling spectrum shape") {
  BathSpectrumSpec spec;  // defaults: eta^2 = 0.07, w0 = 1, gamma = 0.1
  CHECK(g0(spec.omega0, spec) == doctest::Approx(0.07).epsilon(1e-15));
  CHECK(g0(spec.omega0 + spec.gamma, spec) == doctest::Approx(0.035).epsilon(1e-15));
  CHECK(g0(spec.omega0 - spec.gamma, spec) == doctest::Approx(0.035).epsilon(1e-15));
  CHECK(g0(0.0, spec) == 0.0);
  CHECK(g0(-1.0, spec) == 0.0);
}

TEST_CASE("detailed balance of the finite-temperature spectrum") {
  BathSpectrumSpec spec;
  Spectrum s = make_spectrum(spec);
  InverseTemperature T{1.3};
  const double beta = T.alpha / spec.omega_a;
  for (double w : {0.05, 0.4, 1.0, 1.31, 2.2}) {
    const double fwd = gT(w, s, T);
    const double bwd = gT(-w, s, T);
    REQUIRE(fwd > 0.0);
    CHECK(bwd / fwd == doctest::Approx(std::exp(-beta * w)).epsilon(1e-12));
  }

  auto T0 = InverseTemperature::zero_temperature();
  CHECK(gT(1.0, s, T0) == doctest::Approx(0.07).epsilon(1e-15));
  CHECK(gT(-1.0, s, T0) == 0.0);
}

TEST_CASE("tabulated spectrum interpolation and validation") {
  TabulatedSpectrum tab;
  tab.omega = {1.0, 2.0, 3.0};
  tab.g0 = {0.0, 0.4, 0.1};
  CHECK_NOTHROW(tab.validate());
  CHECK(tab(1.5) == doctest::Approx(0.2));
  CHECK(tab(2.0) == doctest::Approx(0.4));
  CHECK(tab(3.0) == doctest::Approx(0.1));  // endpoint included
  CHECK(tab(0.5) == 0.0);
  CHECK(tab(3.5) == 0.0);

  TabulatedSpectrum bad = tab;
  bad.omega = {1.0, 1.0, 3.0};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = tab;
  bad.g0[1] = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("discretization reproduces the window integral") {
  BathSpectrumSpec spec;
  auto model = discretize(spec, 40);
  CHECK(model.size() == 40);
  CHECK(model.warning.empty());

  // integral over [w0 - 5 gamma, w0 + 5 gamma] of the Lorentzian:
  // 2 eta^2 gamma atan(5) = 0.0192276107372302...
  const double exact = 2.0 * spec.eta_max_sq * spec.gamma * std::atan(5.0);
  CHECK(model.window_integral == doctest::Approx(exact).epsilon(1e-10));
  // endpoint-rule mode strengths approach the same area
  CHECK(model.sum_eta_sq == doctest::Approx(exact).epsilon(0.01));

  // modes are symmetric about the peak, strongest in the middle
  CHECK(model.omega.front() == doctest::Approx(0.5));
  CHECK(model.omega.back() == doctest::Approx(1.5));
}

TEST_CASE("discretization clamps windows that would cross zero") {
  BathSpectrumSpec spec;
  spec.omega0 = 0.2;  // 0.2 - 5 * 0.1 < 0
  auto model = discretize(spec, 20);
  CHECK_FALSE(model.warning.empty());
  CHECK(model.omega.front() > 0.0);
}
