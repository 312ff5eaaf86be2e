#pragma once
// thermo.hpp — entropy-distance diagnostics and the cooling-condition test.

#include <vector>

#include "zeno/master_equation.hpp"
#include "zeno/spectrum.hpp"

namespace zeno::thermo {

// Binary relative entropy S(p || p0) in nats, with the 0 ln 0 = 0 convention.
// The reference must be strictly interior.
double relative_entropy(me::QubitPopulations p, me::QubitPopulations p0);

struct EntropyTrace {
  std::vector<double> times;
  std::vector<double> entropy;  // S(rho(t) || p0)
  std::vector<double> sigma;    // -dS/dt
};

// sigma(t) = -rho_dot * ln[rho (1-p0) / ((1-rho) p0)], evaluated from the
// engine's stored rho_dot so measurement events add no differencing noise.
EntropyTrace sigma(const me::SimulationTrace& trace, me::QubitPopulations p0);

struct CoolingCheck {
  double margin = 0.0;  // LHS - RHS of the spectral cooling inequality
  bool cooling = false;
};

// Signed test of whether a measurement interval t can push the populations
// below the bath's detailed-balance point:
//   int G0 sin^2((w-wa)t/2)/(w-wa)^2 (n(wa) - n(w))
//     > int G0 sin^2((w+wa)t/2)/(w+wa)^2 (n(wa) + n(w) + 1).
// At T = 0 the left side vanishes and cooling is never possible.
CoolingCheck cooling_condition(const Spectrum& s, InverseTemperature beta, double t);
inline CoolingCheck cooling_condition(const BathSpectrumSpec& spec, InverseTemperature beta,
                                      double t) {
  return cooling_condition(make_spectrum(spec), beta, t);
}

// Necessary high-temperature window: cooling requires spectral weight inside
// (omega_a, Omega), with beta*Omega = 1 + [beta wa + sqrt(4 + 12 beta wa +
// (beta wa)^2)]/2.  Always exceeds 1/beta.
double high_t_bound(double beta, double omega_a);

struct CoolingScan {
  std::vector<double> times;    // logarithmic grid
  std::vector<double> margins;
  bool any_cooling = false;
  double best_time = 0.0;       // argmax of the margin
  double best_margin = 0.0;
  std::vector<double> onsets;   // bisection-refined sign changes, - to +
};

// Margin scan over a log grid, [1e-2/omega_a, t_max] with t_max defaulting to
// 20 memory times (t_c = 1/gamma is only meaningful for the Lorentzian spec,
// so generic spectra pass t_max explicitly).
CoolingScan scan_cooling(const Spectrum& s, InverseTemperature beta, double t_max,
                         int n_points = 2000);
CoolingScan scan_cooling(const BathSpectrumSpec& spec, InverseTemperature beta,
                         int n_points = 2000);

}  // namespace zeno::thermo
