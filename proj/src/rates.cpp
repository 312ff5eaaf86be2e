#include "zeno/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "zeno/quadrature.hpp"

namespace zeno::rates {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQuadTol = 1e-11;

// Panel edges for an integrand oscillating like sin[(w - center) t]: the
// zeros sit at center + k pi / t.  Edges outside (lo, hi) are dropped.
std::vector<double> oscillation_breakpoints(double lo, double hi,
                                            double center, double t) {
  std::vector<double> pts{lo, hi};
  if (t > 0.0) {
    const double step = kPi / t;
    const double k_lo = std::ceil((lo - center) / step);
    const double k_hi = std::floor((hi - center) / step);
    for (double k = k_lo; k <= k_hi; k += 1.0) {
      const double w = center + k * step;
      if (w > lo && w < hi) pts.push_back(w);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double require_window(const Spectrum& s) {
  if (!(s.omega_max > s.omega_min) || !(s.omega_min > 0.0))
    throw std::invalid_argument("rates: spectrum window is empty");
  return s.omega_max;
}

}  // namespace

double sinc(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double rate(double t, Level which, const Spectrum& s, InverseTemperature T,
            double panel_scale) {
  if (t < 0.0) throw std::invalid_argument("rates: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double hi = require_window(s);
  const double lo = s.omega_min;
  const double wa = s.omega_a;
  // Kernel argument is (w - wa) for the excited level, (w + wa) for ground.
  const double shift = (which == Level::excited) ? wa : -wa;
  const double max_w = panel_scale * kPi / (8.0 * t);

  // omega > 0 branch: G0(w) (n+1) sinc[(w - shift) t]
  auto pos = [&](double w) {
    const double occ = T.is_zero_temperature()
                           ? 0.0
                           : thermal_occupation(w, T, wa);
    return s.g0(w) * (1.0 + occ) * sinc((w - shift) * t);
  };
  double total =
      integrate_panels(pos, oscillation_breakpoints(lo, hi, shift, t),
                       kQuadTol, max_w)
          .value;

  // omega < 0 branch, mapped to nu = -omega: G0(nu) n(nu) sinc[(-nu - shift) t].
  // The kernel argument crosses zero at nu = -shift, i.e. only the ground
  // branch has a stationary point here (at nu = wa).
  if (!T.is_zero_temperature()) {
    auto neg = [&](double nu) {
      return s.g0(nu) * thermal_occupation(nu, T, wa) *
             sinc((-nu - shift) * t);
    };
    total += integrate_panels(neg, oscillation_breakpoints(lo, hi, -shift, t),
                              kQuadTol, max_w)
                 .value;
  }
  return 2.0 * t * total;
}

double rdot0(const Spectrum& s, InverseTemperature T) {
  const double hi = require_window(s);
  const double lo = s.omega_min;
  const double wa = s.omega_a;
  auto pos = [&](double w) {
    const double occ =
        T.is_zero_temperature() ? 0.0 : thermal_occupation(w, T, wa);
    return s.g0(w) * (1.0 + occ);
  };
  double total = integrate_adaptive(pos, lo, hi, kQuadTol).value;
  if (!T.is_zero_temperature()) {
    auto neg = [&](double nu) { return s.g0(nu) * thermal_occupation(nu, T, wa); };
    total += integrate_adaptive(neg, lo, hi, kQuadTol).value;
  }
  return total;
}

double integrated_rate(double t, Level which, const Spectrum& s,
                       InverseTemperature T) {
  if (t < 0.0) throw std::invalid_argument("rates: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double hi = require_window(s);
  const double lo = s.omega_min;
  const double wa = s.omega_a;
  const double t2 = t * t;
  const double max_w = kPi / (8.0 * t);

  // J(t) = t^2 * integral G0 [ a(w) sinc^2((w - wa) t/2) +
  //                            b(w) sinc^2((w + wa) t/2) ] dw
  // with (a, b) = (n+1, n) for the excited level and (n, n+1) for ground.
  auto kernel_m = [&](double w) { return sinc(0.5 * (w - wa) * t); };
  auto kernel_p = [&](double w) { return sinc(0.5 * (w + wa) * t); };
  auto f = [&](double w) {
    const double occ =
        T.is_zero_temperature() ? 0.0 : thermal_occupation(w, T, wa);
    const double km = kernel_m(w), kp = kernel_p(w);
    const double a = (which == Level::excited) ? (1.0 + occ) : occ;
    const double b = (which == Level::excited) ? occ : (1.0 + occ);
    return s.g0(w) * (a * km * km + b * kp * kp);
  };
  auto bp = oscillation_breakpoints(lo, hi, wa, 0.5 * t);
  return t2 * integrate_panels(f, bp, kQuadTol, max_w).value;
}

MarkovRates markov_rates(const Spectrum& s, InverseTemperature T) {
  MarkovRates m;
  m.r_e = 2.0 * kPi * gT(s.omega_a, s, T);
  m.r_g = 2.0 * kPi * gT(-s.omega_a, s, T);
  return m;
}

RateTable build_rate_table(const Spectrum& s, InverseTemperature T,
                           double horizon, RateGrid grid,
                           bool with_integrated) {
  if (!(horizon > 0.0))
    throw std::invalid_argument("rates: table horizon must be > 0");
  double dense_until = grid.dense_until > 0.0
                           ? std::min(grid.dense_until, horizon)
                           : horizon;

  std::vector<double> ts{0.0};
  for (double t = grid.t_min; t < grid.t_uniform_start; t *= grid.geo_ratio)
    ts.push_back(t);
  for (double t = grid.t_uniform_start; t < dense_until; t += grid.dt_uniform)
    ts.push_back(t);
  if (dense_until < horizon) {
    double dt = grid.dt_uniform;
    for (double t = dense_until; t < horizon; t += dt) {
      ts.push_back(t);
      dt *= grid.tail_ratio;
    }
  } else {
    ts.push_back(dense_until);
  }
  if (ts.back() < horizon) ts.push_back(horizon);

  RateTable tab;
  tab.times = std::move(ts);
  const std::size_t n = tab.times.size();
  tab.r_e.resize(n);
  tab.r_g.resize(n);
  if (with_integrated) {
    tab.j_e.resize(n);
    tab.j_g.resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double t = tab.times[i];
    tab.r_e[i] = rate(t, Level::excited, s, T);
    tab.r_g[i] = rate(t, Level::ground, s, T);
    if (with_integrated) {
      tab.j_e[i] = integrated_rate(t, Level::excited, s, T);
      tab.j_g[i] = integrated_rate(t, Level::ground, s, T);
    }
  }
  tab.rdot0 = rdot0(s, T);
  const MarkovRates m = markov_rates(s, T);
  tab.markov_e = m.r_e;
  tab.markov_g = m.r_g;
  return tab;
}

namespace {

std::vector<double> hermite_slopes(const std::vector<double>& t,
                                   const std::vector<double>& y) {
  const std::size_t n = t.size();
  std::vector<double> m(n, 0.0);
  if (n < 2) return m;
  m[0] = (y[1] - y[0]) / (t[1] - t[0]);
  m[n - 1] = (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i)
    m[i] = (y[i + 1] - y[i - 1]) / (t[i + 1] - t[i - 1]);
  return m;
}

}  // namespace

RateInterpolant::RateInterpolant(RateTable table) : table_(std::move(table)) {
  if (table_.times.size() < 2)
    throw std::invalid_argument("rates: interpolant needs >= 2 samples");
  slopes_e_ = hermite_slopes(table_.times, table_.r_e);
  slopes_g_ = hermite_slopes(table_.times, table_.r_g);
}

double RateInterpolant::eval(const std::vector<double>& y,
                             const std::vector<double>& m, double t) const {
  const std::vector<double>& ts = table_.times;
  if (t <= ts.front()) return y.front();
  if (t >= ts.back()) return y.back();
  const auto it = std::upper_bound(ts.begin(), ts.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - ts.begin()) - 1;
  const double h = ts[i + 1] - ts[i];
  const double u = (t - ts[i]) / h;
  const double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * y[i] + (u3 - 2 * u2 + u) * h * m[i] +
         (-2 * u3 + 3 * u2) * y[i + 1] + (u3 - u2) * h * m[i + 1];
}

}  // namespace zeno::rates
