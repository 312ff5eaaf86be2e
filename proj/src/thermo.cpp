#include "zeno/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zeno/quadrature.hpp"
#include "zeno/rates.hpp"

namespace zeno::thermo {
namespace {

constexpr double kQuadTol = 1e-11;

double xlogx_ratio(double p, double p0) {
  if (p <= 0.0) return 0.0;
  return p * std::log(p / p0);
}

// breakpoints at the zeros of sin((w - center) t / 2), spacing 2 pi / t
std::vector<double> sin_sq_breakpoints(double lo, double hi, double center, double t) {
  std::vector<double> pts{lo};
  if (t > 0.0) {
    const double step = 2.0 * M_PI / t;
    double k = std::ceil((lo - center) / step);
    for (double z = center + k * step; z < hi; z += step)
      if (z > pts.back() + 1e-12 * (hi - lo)) pts.push_back(z);
  }
  if (hi > pts.back()) pts.push_back(hi);
  return pts;
}

}  // namespace

double relative_entropy(me::QubitPopulations p, me::QubitPopulations p0) {
  if (!(p0.rho_ee > 0.0) || !(p0.rho_ee < 1.0))
    throw std::domain_error("relative_entropy: reference populations on the boundary");
  if (p.rho_ee < 0.0 || p.rho_ee > 1.0)
    throw std::domain_error("relative_entropy: populations outside [0, 1]");
  return xlogx_ratio(p.rho_ee, p0.rho_ee) + xlogx_ratio(1.0 - p.rho_ee, 1.0 - p0.rho_ee);
}

EntropyTrace sigma(const me::SimulationTrace& trace, me::QubitPopulations p0) {
  if (!(p0.rho_ee > 0.0) || !(p0.rho_ee < 1.0))
    throw std::domain_error("sigma: reference populations on the boundary");
  EntropyTrace out;
  out.times = trace.times;
  out.entropy.reserve(trace.times.size());
  out.sigma.reserve(trace.times.size());
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double p = trace.rho_ee[i];
    out.entropy.push_back(relative_entropy({p, 1.0 - p}, p0));
    // boundary populations give an infinite slope; IEEE semantics carry it
    const double lodds = std::log((p * (1.0 - p0.rho_ee)) / ((1.0 - p) * p0.rho_ee));
    out.sigma.push_back(-trace.rho_dot[i] * lodds);
  }
  return out;
}

CoolingCheck cooling_condition(const Spectrum& s, InverseTemperature beta, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("cooling_condition: t must be positive");
  const double wa = s.omega_a;
  const double quarter_t_sq = 0.25 * t * t;
  const double cap = 8.0 * M_PI / t;
  const double n_a = beta.is_zero_temperature() ? 0.0 : thermal_occupation(wa, beta, wa);
  // tolerance follows the integrand scale so long times stay affordable
  const double tol = kQuadTol * (1.0 + quarter_t_sq * (2.0 * n_a + 1.0));

  double lhs = 0.0;
  if (!beta.is_zero_temperature()) {
    auto f = [&](double w) {
      const double g = s.g0(w);
      if (g == 0.0) return 0.0;
      const double occ_gap = n_a - thermal_occupation(w, beta, wa);
      const double sc = rates::sinc(0.5 * (w - wa) * t);
      return g * quarter_t_sq * sc * sc * occ_gap;
    };
    lhs = integrate_panels(f, sin_sq_breakpoints(s.omega_min, s.omega_max, wa, t), tol, cap)
              .value;
  }

  auto f_rhs = [&](double w) {
    const double g = s.g0(w);
    if (g == 0.0) return 0.0;
    const double n_w = beta.is_zero_temperature() ? 0.0 : thermal_occupation(w, beta, wa);
    const double sc = rates::sinc(0.5 * (w + wa) * t);
    return g * quarter_t_sq * sc * sc * (n_a + n_w + 1.0);
  };
  const double rhs =
      integrate_panels(f_rhs, sin_sq_breakpoints(s.omega_min, s.omega_max, -wa, t), tol, cap)
          .value;

  CoolingCheck out;
  out.margin = lhs - rhs;
  out.cooling = out.margin > 0.0;
  return out;
}

double high_t_bound(double beta, double omega_a) {
  if (!(beta > 0.0)) throw std::invalid_argument("high_t_bound: beta must be positive");
  if (!(omega_a > 0.0)) throw std::invalid_argument("high_t_bound: omega_a must be positive");
  const double x = beta * omega_a;
  return (1.0 + 0.5 * (x + std::sqrt(4.0 + 12.0 * x + x * x))) / beta;
}

CoolingScan scan_cooling(const Spectrum& s, InverseTemperature beta, double t_max,
                         int n_points) {
  if (!(t_max > 0.0)) throw std::invalid_argument("scan_cooling: t_max must be positive");
  if (n_points < 2) throw std::invalid_argument("scan_cooling: need at least two points");
  const double t_min = 1e-2 / s.omega_a;

  CoolingScan out;
  out.times.reserve(n_points);
  out.margins.reserve(n_points);
  const double ratio = std::log(t_max / t_min) / (n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const double t = t_min * std::exp(ratio * i);
    const auto chk = cooling_condition(s, beta, t);
    out.times.push_back(t);
    out.margins.push_back(chk.margin);
    if (chk.margin > out.best_margin) {
      out.best_margin = chk.margin;
      out.best_time = t;
      out.any_cooling = true;
    }
  }

  // refine each - to + crossing by bisection; margins are continuous in t
  for (int i = 1; i < n_points; ++i) {
    if (!(out.margins[i - 1] <= 0.0 && out.margins[i] > 0.0)) continue;
    double lo = out.times[i - 1], hi = out.times[i];
    for (int it = 0; it < 60 && (hi - lo) > 1e-10 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (cooling_condition(s, beta, mid).margin > 0.0 ? hi : lo) = mid;
    }
    out.onsets.push_back(0.5 * (lo + hi));
  }
  return out;
}

CoolingScan scan_cooling(const BathSpectrumSpec& spec, InverseTemperature beta,
                         int n_points) {
  return scan_cooling(make_spectrum(spec), beta, 20.0 / spec.gamma, n_points);
}

}  // namespace zeno::thermo
