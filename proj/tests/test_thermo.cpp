#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "zeno/thermo.hpp"

using namespace zeno;
using namespace zeno::thermo;

namespace {

BathSpectrumSpec fig2c_spec() {
  BathSpectrumSpec s;
  s.omega0 = 1.0 / 0.7;
  s.eta_max_sq = 4.36;
  s.gamma = 0.1;
  return s;
}

}  // namespace

TEST_CASE("binary relative entropy basics") {
  me::QubitPopulations half{0.5, 0.5};
  CHECK(relative_entropy({1.0, 0.0}, half) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-14));
  CHECK(relative_entropy({0.0, 1.0}, {0.3, 0.7}) ==
        doctest::Approx(0.3566749439387324).epsilon(1e-14));
  CHECK(relative_entropy({0.27, 0.73}, {0.27, 0.73}) == 0.0);
  for (double p = 0.05; p < 1.0; p += 0.1) {
    CHECK(relative_entropy({p, 1.0 - p}, {0.37, 0.63}) >= 0.0);
    if (std::abs(p - 0.37) > 1e-12)
      CHECK(relative_entropy({p, 1.0 - p}, {0.37, 0.63}) > 0.0);
  }
  CHECK_THROWS_AS(relative_entropy({0.5, 0.5}, {0.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(relative_entropy({0.5, 0.5}, {1.0, 0.0}), std::domain_error);
}

TEST_CASE("sigma agrees with a numerical entropy derivative") {
  const double a = 0.3, b = 0.1;
  me::RateFunctions rf{[a](double) { return a; }, [b](double) { return b; }};
  me::EvolveOptions opt;
  opt.n_samples = 400;
  auto tr = me::evolve({0.9, 0.1}, {}, 6.0, rf, opt);
  me::QubitPopulations ref{b / (a + b), a / (a + b)};
  auto ent = sigma(tr, ref);

  REQUIRE(ent.times.size() == tr.times.size());
  for (double s : ent.entropy) CHECK(s >= 0.0);
  // relaxation toward the reference: the distance shrinks monotonically
  for (double sg : ent.sigma) CHECK(sg > 0.0);
  for (std::size_t i = 1; i + 1 < ent.times.size(); ++i) {
    const double num =
        -(ent.entropy[i + 1] - ent.entropy[i - 1]) / (ent.times[i + 1] - ent.times[i - 1]);
    CHECK(ent.sigma[i] == doctest::Approx(num).epsilon(2e-4));
  }

  // starting at the reference: S stays ~0 and sigma ~0
  auto eq = me::evolve(ref, {}, 3.0, rf, opt);
  auto ent_eq = sigma(eq, ref);
  for (double s : ent_eq.entropy) CHECK(s < 1e-12);
  for (double sg : ent_eq.sigma) CHECK(std::abs(sg) < 1e-6);
}

TEST_CASE("sigma flips sign exactly when the trajectory departs the reference") {
  // pure pumping crosses the reference from below: approach then departure
  me::RateFunctions rf{[](double) { return 0.0; }, [](double) { return 0.25; }};
  me::EvolveOptions opt;
  opt.n_samples = 600;
  auto tr = me::evolve({0.1, 0.9}, {}, 12.0, rf, opt);
  me::QubitPopulations ref{0.5, 0.5};
  auto ent = sigma(tr, ref);

  bool saw_positive = false, saw_negative = false;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double dist_rate = tr.rho_dot[i] * (tr.rho_ee[i] > ref.rho_ee ? 1.0 : -1.0);
    if (std::abs(tr.rho_ee[i] - ref.rho_ee) < 1e-3) continue;  // crossing region
    if (ent.sigma[i] > 1e-12) {
      CHECK(dist_rate < 0.0);
      saw_positive = true;
    } else if (ent.sigma[i] < -1e-12) {
      CHECK(dist_rate > 0.0);
      saw_negative = true;
    }
  }
  CHECK(saw_positive);
  CHECK(saw_negative);
}

TEST_CASE("high-temperature detuning bound") {
  CHECK(1e-8 * high_t_bound(1e-8, 1.0) == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(high_t_bound(1.0, 1.0) == doctest::Approx(3.5615528128088303).epsilon(1e-14));
  // scale invariance: only beta*omega_a matters for beta*Omega
  CHECK(0.05 * high_t_bound(0.05, 1.0) ==
        doctest::Approx(2.5 * high_t_bound(2.5, 0.02)).epsilon(1e-12));
  for (double beta : {1e-3, 0.05, 0.5, 3.0, 50.0})
    CHECK(beta * high_t_bound(beta, 1.0) > 1.0);
  CHECK_THROWS_AS(high_t_bound(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("cooling margin is never positive at zero temperature") {
  BathSpectrumSpec fig1;
  auto T0 = InverseTemperature::zero_temperature();
  for (double t : {0.05, 0.5, 5.0, 50.0, 200.0}) {
    auto chk = cooling_condition(fig1, T0, t);
    CHECK(chk.margin < 0.0);
    CHECK(!chk.cooling);
  }
}

TEST_CASE("detuned strong-coupling bath admits cooling intervals at moderate alpha") {
  auto spec = fig2c_spec();
  InverseTemperature beta{1.0};
  auto at_peak = cooling_condition(spec, beta, 7.2872);
  CHECK(at_peak.cooling);
  CHECK(at_peak.margin == doctest::Approx(1.028966).epsilon(1e-3));
  CHECK(!cooling_condition(spec, beta, 0.1).cooling);

  auto scan = scan_cooling(spec, beta, 300);
  CHECK(scan.any_cooling);
  REQUIRE(!scan.onsets.empty());
  // refined onset is a genuine bracket: sign flips across it
  const double on = scan.onsets.front();
  CHECK(cooling_condition(spec, beta, on * 0.999).margin < 0.0);
  CHECK(cooling_condition(spec, beta, on * 1.001).margin > 0.0);

  // margins vary smoothly where the log grid resolves the oscillation in t;
  // past that the spacing exceeds the period and point-to-point jumps are real
  for (std::size_t i = 1; i < scan.margins.size(); ++i) {
    if (scan.times[i] - scan.times[i - 1] >= 0.3) break;
    CHECK(std::abs(scan.margins[i] - scan.margins[i - 1]) < 0.2);
  }
  for (double m : scan.margins) CHECK(std::abs(m) < 10.0);
}

TEST_CASE("no cooling when all spectral weight sits far above the bound") {
  const double alpha = 0.05;
  const double bound = high_t_bound(alpha, 1.0);
  CHECK(bound == doctest::Approx(41.953438).epsilon(1e-6));

  TabulatedSpectrum tab;
  tab.omega_a = 1.0;
  const int n = 2001;
  tab.omega.resize(n);
  tab.g0.resize(n);
  for (int i = 0; i < n; ++i) {
    const double w = 100.0 + 2000.0 * i / (n - 1);
    const double u = (w - 1100.0) / 1000.0;
    tab.omega[i] = w;
    tab.g0[i] = 0.07 * std::pow(std::cos(0.5 * M_PI * u), 2);
  }
  REQUIRE(tab.omega.front() > bound);

  auto scan = scan_cooling(make_spectrum(tab), InverseTemperature{alpha}, 20.0, 400);
  CHECK(!scan.any_cooling);
  for (double m : scan.margins) CHECK(m < 0.0);
}
