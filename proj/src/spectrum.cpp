#include "zeno/spectrum.hpp"

#include <algorithm>

#include "zeno/quadrature.hpp"

namespace zeno {

void TabulatedSpectrum::validate() const {
  if (omega.size() < 2 || omega.size() != g0.size())
    throw std::invalid_argument("tabulated spectrum needs >= 2 matching samples");
  for (std::size_t i = 0; i < omega.size(); ++i) {
    if (!(omega[i] > 0.0)) throw std::invalid_argument("tabulated omega must be > 0");
    if (i && !(omega[i] > omega[i - 1]))
      throw std::invalid_argument("tabulated omega must be strictly increasing");
    if (!(g0[i] >= 0.0)) throw std::invalid_argument("tabulated g0 must be >= 0");
  }
}

double TabulatedSpectrum::operator()(double w) const {
  if (w <= omega.front() || w >= omega.back()) {
    // exact endpoints still count; beyond them the spectrum is zero
    if (w == omega.front()) return g0.front();
    if (w == omega.back()) return g0.back();
    return 0.0;
  }
  auto it = std::upper_bound(omega.begin(), omega.end(), w);
  const std::size_t i = static_cast<std::size_t>(it - omega.begin());
  const double t = (w - omega[i - 1]) / (omega[i] - omega[i - 1]);
  return g0[i - 1] + t * (g0[i] - g0[i - 1]);
}

Spectrum make_spectrum(const BathSpectrumSpec& spec) {
  spec.validate();
  Spectrum s;
  s.g0 = [spec](double w) { return g0(w, spec); };
  s.omega_min = 1e-6 * spec.omega_a;
  s.omega_max = spec.omega0 + 40.0 * spec.gamma;
  s.omega_a = spec.omega_a;
  return s;
}

Spectrum make_spectrum(const TabulatedSpectrum& tab) {
  tab.validate();
  Spectrum s;
  s.g0 = tab;
  s.omega_min = std::max(tab.omega.front(), 1e-6 * tab.omega_a);
  s.omega_max = tab.omega.back();
  s.omega_a = tab.omega_a;
  return s;
}

DiscreteBathModel discretize(const BathSpectrumSpec& spec, int n_modes,
                             double coverage) {
  spec.validate();
  if (n_modes < 2) throw std::invalid_argument("discretize: need at least 2 modes");
  if (!(coverage > 0.0)) throw std::invalid_argument("discretize: coverage must be > 0");

  DiscreteBathModel out;
  out.omega_a = spec.omega_a;
  double hi = spec.omega0 + coverage * spec.gamma;
  double lo = spec.omega0 - coverage * spec.gamma;
  if (lo <= 0.0) {
    // clamp so the lowest mode sits one grid spacing above zero
    lo = hi / n_modes;
    out.warning = "discretize: window reached omega <= 0; lower edge clamped to " +
                  std::to_string(lo);
  }

  const double dw = (hi - lo) / (n_modes - 1);
  out.omega.resize(n_modes);
  out.eta.resize(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    const double wk = lo + k * dw;
    out.omega[k] = wk;
    out.eta[k] = std::sqrt(g0(wk, spec) * dw);
    out.sum_eta_sq += out.eta[k] * out.eta[k];
  }

  out.window_integral =
      integrate_adaptive([&spec](double w) { return g0(w, spec); }, lo, hi, 1e-12)
          .value;
  return out;
}

}  // namespace zeno
