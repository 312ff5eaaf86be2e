#pragma once
// equilibrium.hpp — second-order corrections to the joint thermal state of a
// qubit coupled to a bosonic bath without the rotating-wave approximation.

#include <stdexcept>

#include "zeno/spectrum.hpp"

namespace zeno::eq {

// Raised when the second-order correction integral exceeds the perturbative
// validity threshold (0.5) and the expansion can no longer be trusted.
struct StrongCouplingError : std::runtime_error {
  double integral_term;
  explicit StrongCouplingError(double term)
      : std::runtime_error("equilibrium: correction integral " +
                           std::to_string(term) +
                           " >= 0.5; coupling too strong for the perturbative branch"),
        integral_term(term) {}
};

// Uncorrected qubit purity P = rho_ee - rho_gg = tanh(-alpha/2).
inline double bare_purity(InverseTemperature T) { return std::tanh(-0.5 * T.alpha); }

inline double rho_ee_bare(InverseTemperature T) { return 0.5 * (1.0 + bare_purity(T)); }
inline double rho_gg_bare(InverseTemperature T) { return 0.5 * (1.0 - bare_purity(T)); }

// Dimensionless kernels of the second-order (Heims) expansion.  With
// z+ = alpha (1 - w/w_a) and z- = alpha (1 + w/w_a):
//   K+      = alpha^2 (e^{z+} - z+ - 1) / z+^2
//   K-      = alpha^2 (e^{-z-} + z- - 1) / z-^2
//   Ktilde+ = alpha (e^{z+} - 1) / z+
//   Ktilde- = alpha (e^{-z-} - 1) / z-
// All removable singularities (w = +-w_a) are handled by series branches.
struct KCoefficients {
  double k_plus = 0.0;
  double k_minus = 0.0;
  double kt_plus = 0.0;
  double kt_minus = 0.0;
};

KCoefficients kcoeff(double omega, InverseTemperature T, double omega_a = 1.0);

// Purity of the interaction-corrected equilibrium state.  The zero-temperature
// case is evaluated from the analytic beta -> inf limit (see the .cpp notes);
// finite alpha uses the full kernel integrals.
double corrected_purity(const Spectrum& s, InverseTemperature T);

// <H_SB> at equilibrium to second order in the coupling; < 0 for all beta > 0.
double mean_interaction_energy(const Spectrum& s, InverseTemperature T);

// Ground-state interaction energy -2 * integral G0(w) / (w_a + w) dw, i.e. the
// zero-temperature Lamb-type shift the general expression must reduce to.
double lamb_shift_t0(const Spectrum& s);

struct EquilibriumReport {
  double p_eq_bare = 0.0;
  double p_eq_corrected = 0.0;
  double rho_ee = 0.0;  // corrected populations, sum to 1 by construction
  double rho_gg = 0.0;
  double mean_hsb = 0.0;
  double lamb_shift_t0 = 0.0;
};

EquilibriumReport report(const Spectrum& s, InverseTemperature T);

inline double corrected_purity(const BathSpectrumSpec& spec, InverseTemperature T) {
  return corrected_purity(make_spectrum(spec), T);
}
inline double mean_interaction_energy(const BathSpectrumSpec& spec,
                                      InverseTemperature T) {
  return mean_interaction_energy(make_spectrum(spec), T);
}
inline double lamb_shift_t0(const BathSpectrumSpec& spec) {
  return lamb_shift_t0(make_spectrum(spec));
}
inline EquilibriumReport report(const BathSpectrumSpec& spec, InverseTemperature T) {
  return report(make_spectrum(spec), T);
}

}  // namespace zeno::eq
