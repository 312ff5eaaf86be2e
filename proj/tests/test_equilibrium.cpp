#include "zeno/equilibrium.hpp"

#include <cmath>

#include "doctest.h"

using namespace zeno;
using namespace zeno::eq;

namespace {
const InverseTemperature kT1{1.0};
const InverseTemperature kT0 = InverseTemperature::zero_temperature();
}  // namespace

TEST_CASE("bare thermal populations") {
  CHECK(bare_purity(kT1) == doctest::Approx(-0.46211715726000974).epsilon(1e-15));
  CHECK(rho_ee_bare(kT1) == doctest::Approx(0.2689414213699951).epsilon(1e-14));
  CHECK(rho_ee_bare(kT1) + rho_gg_bare(kT1) == doctest::Approx(1.0));
  CHECK(bare_purity(kT0) == -1.0);
  CHECK(bare_purity(InverseTemperature{0.0}) == 0.0);
}

TEST_CASE("kernel values at the removable singularities") {
  // both kernels equal alpha^2/2 where their argument vanishes
  auto at_gap = kcoeff(1.0, kT1);
  CHECK(at_gap.k_plus == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at_gap.kt_plus == doctest::Approx(1.0).epsilon(1e-14));
  auto at_neg_gap = kcoeff(-1.0, kT1);
  CHECK(at_neg_gap.k_minus == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(at_neg_gap.kt_minus == doctest::Approx(-1.0).epsilon(1e-14));

  InverseTemperature Th{2.0};
  CHECK(kcoeff(1.0, Th).k_plus == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("kernel values at zero frequency") {
  auto k = kcoeff(0.0, kT1);
  CHECK(k.k_plus == doctest::Approx(0.71828182845904524).epsilon(1e-14));
  CHECK(k.k_minus == doctest::Approx(0.36787944117144232).epsilon(1e-14));
  CHECK(k.kt_plus == doctest::Approx(1.7182818284590452).epsilon(1e-14));
  CHECK(k.kt_minus == doctest::Approx(-0.63212055882855768).epsilon(1e-14));
}

TEST_CASE("kernel series branch agrees with the direct form") {
  // z+ = 0.25 sits in the series branch, z+ = 0.75 in the direct one
  auto series = kcoeff(0.75, kT1);
  CHECK(series.k_plus == doctest::Approx(0.54440666700386375).epsilon(1e-14));
  auto mirror = kcoeff(1.25, kT1);  // z+ = -0.25
  CHECK(mirror.k_plus == doctest::Approx(0.46081252914247789).epsilon(1e-14));

  // no jump when crossing the branch switch at |z| = 0.5
  const double eps = 1e-9;
  auto below = kcoeff(0.5 + eps, kT1);
  auto above = kcoeff(0.5 - eps, kT1);
  CHECK(std::abs(below.k_plus - above.k_plus) < 1e-8);

  CHECK_THROWS_AS((void)kcoeff(1.0, kT0), std::invalid_argument);
}

TEST_CASE("coupling reduces the equilibrium purity magnitude") {
  BathSpectrumSpec spec;
  // frozen from a 40-digit quadrature of the defining integrals
  CHECK(corrected_purity(spec, kT1) ==
        doctest::Approx(-0.45399926057598129).epsilon(1e-7));
  CHECK(corrected_purity(spec, InverseTemperature{3.0}) ==
        doctest::Approx(-0.88241630115623431).epsilon(1e-7));
  CHECK(std::abs(corrected_purity(spec, kT1)) < std::abs(bare_purity(kT1)));
}

TEST_CASE("zero-temperature purity comes from the dressed ground state") {
  BathSpectrumSpec spec;
  CHECK(corrected_purity(spec, kT0) ==
        doctest::Approx(-0.98914508182021714).epsilon(1e-9));
  // stronger coupling, still perturbative: scales linearly in eta^2
  BathSpectrumSpec strong = spec;
  strong.eta_max_sq = 0.14;
  const double a1 = (1.0 + corrected_purity(spec, kT0)) / 2.0;
  const double a2 = (1.0 + corrected_purity(strong, kT0)) / 2.0;
  CHECK(a2 / a1 == doctest::Approx(2.0).epsilon(2e-2));
}

TEST_CASE("interaction energy is negative and matches frozen values") {
  BathSpectrumSpec spec;
  CHECK(mean_interaction_energy(spec, kT1) ==
        doctest::Approx(-0.05513197871708708).epsilon(1e-7));
  CHECK(mean_interaction_energy(spec, InverseTemperature{3.0}) ==
        doctest::Approx(-0.036764879013357319).epsilon(1e-7));
  for (double alpha : {0.3, 1.0, 2.0, 5.0})
    CHECK(mean_interaction_energy(spec, InverseTemperature{alpha}) < 0.0);

  // at T = 0 the general expression reduces to the ground-state shift
  CHECK(mean_interaction_energy(spec, kT0) ==
        doctest::Approx(lamb_shift_t0(spec)).epsilon(1e-12));
  CHECK(lamb_shift_t0(spec) ==
        doctest::Approx(-0.021209025254519651).epsilon(1e-9));
}

TEST_CASE("perturbative guard trips on strong coupling") {
  BathSpectrumSpec strong;
  strong.eta_max_sq = 50.0;
  CHECK_THROWS_AS((void)corrected_purity(strong, kT1), StrongCouplingError);

  // the correction integral grows linearly in alpha, so cold + weakly
  // coupled eventually leaves the perturbative window too
  BathSpectrumSpec spec;
  CHECK_THROWS_AS((void)corrected_purity(spec, InverseTemperature{120.0}),
                  StrongCouplingError);
  CHECK_THROWS_AS((void)corrected_purity(spec, InverseTemperature{2000.0}),
                  StrongCouplingError);
}

TEST_CASE("equilibrium report is self-consistent") {
  BathSpectrumSpec spec;
  auto rep = report(spec, kT1);
  CHECK(rep.rho_ee + rep.rho_gg == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.p_eq_corrected == doctest::Approx(rep.rho_ee - rep.rho_gg).epsilon(1e-12));
  CHECK(rep.p_eq_bare == doctest::Approx(bare_purity(kT1)));
  CHECK(rep.mean_hsb < 0.0);
  CHECK(rep.lamb_shift_t0 < 0.0);
}
