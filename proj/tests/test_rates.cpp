#include "zeno/rates.hpp"

#include <cmath>

#include "doctest.h"

using namespace zeno;
using namespace zeno::rates;

namespace {
const InverseTemperature kT1{1.0};
const InverseTemperature kT0 = InverseTemperature::zero_temperature();
Spectrum default_spectrum() { return make_spectrum(BathSpectrumSpec{}); }
}  // namespace

TEST_CASE("sinc handles the origin and matches sin/x away from it") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(sinc(1e-9) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sinc(2.0) == doctest::Approx(std::sin(2.0) / 2.0).epsilon(1e-15));
  CHECK(sinc(-3.5) == doctest::Approx(std::sin(-3.5) / -3.5).epsilon(1e-15));
}

TEST_CASE("rates vanish at t = 0 and reject negative times") {
  auto s = default_spectrum();
  CHECK(rate(0.0, Level::excited, s, kT1) == 0.0);
  CHECK(integrated_rate(0.0, Level::ground, s, kT1) == 0.0);
  CHECK_THROWS_AS((void)rate(-1.0, Level::excited, s, kT1), std::invalid_argument);
}

TEST_CASE("short times follow the universal linear law") {
  auto s = default_spectrum();
  for (auto T : {kT0, kT1}) {
    const double r0 = rdot0(s, T);
    const double t = 1e-5;
    CHECK(rate(t, Level::excited, s, T) / (2.0 * t) ==
          doctest::Approx(r0).epsilon(1e-6));
    CHECK(rate(t, Level::ground, s, T) / (2.0 * t) ==
          doctest::Approx(r0).epsilon(1e-6));
  }
  // frozen reference integrals of G_T over the window
  CHECK(rdot0(s, kT0) == doctest::Approx(0.021118503759287914).epsilon(1e-9));
  CHECK(rdot0(s, kT1) == doctest::Approx(0.06486865512922621).epsilon(1e-9));
}

TEST_CASE("rates match independently integrated references") {
  auto s = default_spectrum();
  CHECK(rate(5.0, Level::excited, s, kT0) ==
        doctest::Approx(0.17309733362905028).epsilon(1e-8));
  CHECK(rate(5.0, Level::excited, s, kT1) ==
        doctest::Approx(0.24286359973032964).epsilon(1e-8));
  CHECK(rate(5.0, Level::ground, s, kT1) ==
        doctest::Approx(0.06319547756190937).epsilon(1e-8));
  // the ground rate swings negative while the window still resolves ~1/t
  CHECK(rate(2.8, Level::ground, s, kT0) ==
        doctest::Approx(-0.011500680420545153).epsilon(1e-8));
}

TEST_CASE("long-time rates settle on the golden-rule values") {
  auto s = default_spectrum();
  const auto m = markov_rates(s, kT0);
  CHECK(m.r_e == doctest::Approx(0.439822971502571).epsilon(1e-12));
  CHECK(m.r_g == 0.0);
  CHECK(rate(500.0, Level::excited, s, kT0) ==
        doctest::Approx(m.r_e).epsilon(1e-3));

  // detailed balance of the asymptotic rates at the gap
  const auto mt = markov_rates(s, kT1);
  CHECK(mt.r_g / mt.r_e == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("halving the panel width cap does not move the rate") {
  auto s = default_spectrum();
  for (double t : {0.3, 5.0, 40.0}) {
    const double full = rate(t, Level::excited, s, kT1, 1.0);
    const double half = rate(t, Level::excited, s, kT1, 0.5);
    CHECK(std::abs(full - half) <= 1e-8 * std::max(1.0, std::abs(full)));
  }
}

TEST_CASE("integrated rate equals the time integral of the rate") {
  auto s = default_spectrum();
  // frozen kernel-form values
  CHECK(integrated_rate(5.0, Level::excited, s, kT0) ==
        doctest::Approx(0.4682776808821694).epsilon(1e-8));
  CHECK(integrated_rate(5.0, Level::ground, s, kT0) ==
        doctest::Approx(0.016591606890180157).epsilon(1e-8));
  CHECK(integrated_rate(5.0, Level::excited, s, kT1) ==
        doctest::Approx(0.7949434136894507).epsilon(1e-8));

  // cross-route check: Simpson integration of R(s) over [0, 5]
  const int n = 400;  // even
  const double h = 5.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * rate(i * h, Level::excited, s, kT1);
  }
  acc *= h / 3.0;
  CHECK(integrated_rate(5.0, Level::excited, s, kT1) ==
        doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("rate table interpolates between its nodes") {
  auto s = default_spectrum();
  RateGrid grid;
  auto table = build_rate_table(s, kT1, 8.0, grid);
  REQUIRE(table.times.front() == 0.0);
  REQUIRE(table.times.back() == doctest::Approx(8.0));
  CHECK(table.rdot0 == doctest::Approx(rdot0(s, kT1)));
  CHECK(table.markov_e == doctest::Approx(markov_rates(s, kT1).r_e));

  RateInterpolant interp(table);
  for (double t : {0.013, 0.4, 1.7, 3.21, 6.9}) {
    const double direct = rate(t, Level::excited, s, kT1);
    CHECK(interp.r_e(t) == doctest::Approx(direct).epsilon(5e-5));
    const double directg = rate(t, Level::ground, s, kT1);
    CHECK(interp.r_g(t) == doctest::Approx(directg).epsilon(5e-5));
  }
  // clamping past the table end
  CHECK(interp.r_e(9.5) == table.r_e.back());
  CHECK(interp.r_e(-1.0) == table.r_e.front());
}

TEST_CASE("sparse tail grid still tracks the relaxed rate") {
  auto s = default_spectrum();
  RateGrid grid;
  grid.dense_until = 10.0;
  auto table = build_rate_table(s, kT0, 60.0, grid, false);
  CHECK(table.j_e.empty());
  RateInterpolant interp(table);
  for (double t : {25.0, 47.3}) {
    CHECK(interp.r_e(t) ==
          doctest::Approx(rate(t, Level::excited, s, kT0)).epsilon(1e-3));
  }
}
