#pragma once
// spectrum.hpp — bath coupling spectra, thermal occupation, discrete mode sets.
//
// Conventions: hbar = 1 internally; frequencies are in units of the qubit gap
// omega_a unless a spec carries its own omega_a.  Temperatures enter through
// the dimensionless alpha = beta * hbar * omega_a (alpha = inf means T = 0).

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace zeno {

struct InverseTemperature {
  double alpha = 1.0;  // beta * hbar * omega_a, in [0, inf]

  static InverseTemperature zero_temperature() {
    return {std::numeric_limits<double>::infinity()};
  }
  bool is_zero_temperature() const { return std::isinf(alpha); }
};

// Lorentzian coupling spectrum G0(w) = eta_max^2 Gamma^2 / (Gamma^2 + (w - w0)^2)
// for w > 0, zero otherwise.  eta_max^2 carries units of frequency so that
// integral G0 dw is a squared rate.
struct BathSpectrumSpec {
  double eta_max_sq = 0.07;  // peak coupling strength, units of omega_a
  double omega0 = 1.0;       // spectrum peak, > 0
  double gamma = 0.1;        // half width at half maximum, > 0 (1 / t_c)
  double omega_a = 1.0;      // qubit gap the spectrum is expressed against

  void validate() const {
    if (!(eta_max_sq >= 0.0)) throw std::invalid_argument("eta_max_sq must be >= 0");
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
    if (!(omega_a > 0.0)) throw std::invalid_argument("omega_a must be > 0");
  }
};

// Tabulated zero-temperature spectrum, linearly interpolated on its grid and
// zero outside it.  Lets tests and configs plug in non-Lorentzian shapes.
struct TabulatedSpectrum {
  std::vector<double> omega;  // strictly increasing, all > 0
  std::vector<double> g0;     // same length, all >= 0
  double omega_a = 1.0;

  void validate() const;
  double operator()(double w) const;
};

// Type-erased positive-frequency spectrum plus its integration window.
struct Spectrum {
  std::function<double(double)> g0;
  double omega_min = 1e-6;  // infrared edge of the quadrature window
  double omega_max = 5.0;
  double omega_a = 1.0;
};

Spectrum make_spectrum(const BathSpectrumSpec& spec);
Spectrum make_spectrum(const TabulatedSpectrum& tab);

inline double thermal_occupation(double omega, InverseTemperature T,
                                 double omega_a = 1.0) {
  if (omega == 0.0)
    throw std::domain_error("thermal_occupation: pole at omega = 0");
  if (T.is_zero_temperature()) return omega > 0.0 ? 0.0 : -1.0;
  const double beta = T.alpha / omega_a;
  return 1.0 / std::expm1(beta * omega);
}

inline double g0(double omega, const BathSpectrumSpec& s) {
  if (omega <= 0.0) return 0.0;
  const double d = omega - s.omega0;
  return s.eta_max_sq * s.gamma * s.gamma / (s.gamma * s.gamma + d * d);
}

// Finite-temperature spectrum G_T(w) = G0(w)(n(w)+1) + G0(-w) n(-w).
// Satisfies detailed balance G_T(-w) = exp(-beta w) G_T(w) identically.
inline double gT(double omega, const Spectrum& s, InverseTemperature T) {
  double out = 0.0;
  const double gp = omega > 0.0 ? s.g0(omega) : 0.0;
  const double gm = omega < 0.0 ? s.g0(-omega) : 0.0;
  if (gp != 0.0) out += gp * (thermal_occupation(omega, T, s.omega_a) + 1.0);
  if (gm != 0.0) out += gm * thermal_occupation(-omega, T, s.omega_a);
  return out;
}

inline double gT(double omega, const BathSpectrumSpec& spec, InverseTemperature T) {
  return gT(omega, make_spectrum(spec), T);
}

// One bath mode of a discretized spectrum.
struct DiscreteBathModel {
  std::vector<double> omega;  // strictly increasing, > 0
  std::vector<double> eta;    // >= 0, units of frequency (energy at hbar = 1)
  double omega_a = 1.0;       // qubit gap carried along for solvers
  double sum_eta_sq = 0.0;    // reported against window_integral below
  double window_integral = 0.0;
  std::string warning;        // non-empty if the window had to be clamped

  std::size_t size() const { return omega.size(); }
};

// Uniform grid over [max(omega_min, omega0 - coverage*gamma), omega0 + coverage*gamma]
// with eta_k = sqrt(G0(omega_k) * dw).  A grid reaching omega <= 0 is clamped
// with a warning recorded on the result.
DiscreteBathModel discretize(const BathSpectrumSpec& spec, int n_modes,
                             double coverage = 5.0);

}  // namespace zeno
