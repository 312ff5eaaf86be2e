#include "zeno/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace zeno::me {
namespace {

// Dormand-Prince 5(4) pair, FSAL.  One scalar equation, so the usual arrays
// collapse to doubles and the integrator stays self-contained.
struct DormandPrince {
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                          a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                          a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                          a65 = -5103.0 / 18656.0;
  static constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                          b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  static constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
  static constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
  static constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
  static constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
  static constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
  static constexpr double e7 = -1.0 / 40.0;
};

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

}  // namespace

QubitPopulations initial_from_temperature(InverseTemperature alpha_s) {
  if (alpha_s.alpha < 0.0) throw std::invalid_argument("initial_from_temperature: alpha < 0");
  double ee = 0.0;
  if (!alpha_s.is_zero_temperature()) ee = 0.5 * (1.0 + std::tanh(-0.5 * alpha_s.alpha));
  return {ee, 1.0 - ee};
}

MeasurementSchedule MeasurementSchedule::periodic(double first, double interval, int count,
                                                  double duration) {
  if (count < 0) throw std::invalid_argument("periodic schedule: negative count");
  if (count > 0 && interval <= 0.0)
    throw std::invalid_argument("periodic schedule: interval must be positive");
  MeasurementSchedule s;
  s.events.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) s.events.push_back({first + interval * k, duration});
  return s;
}

void MeasurementSchedule::validate(double horizon) const {
  double prev_end = -1.0;
  double prev_time = -1.0;
  for (const auto& ev : events) {
    if (ev.time < 0.0 || ev.time > horizon)
      throw std::invalid_argument("measurement schedule: event outside [0, horizon]");
    if (ev.duration < 0.0)
      throw std::invalid_argument("measurement schedule: negative duration");
    if (ev.time <= prev_time)
      throw std::invalid_argument("measurement schedule: event times must increase strictly");
    if (prev_end >= 0.0 && ev.time <= prev_end)
      throw std::invalid_argument("measurement schedule: event overlaps the previous one");
    prev_time = ev.time;
    prev_end = ev.time + ev.duration;
  }
}

RateFunctions direct_rates(const Spectrum& s, InverseTemperature beta_bath) {
  auto sp = std::make_shared<Spectrum>(s);
  return {[sp, beta_bath](double t) {
            return rates::rate(t, rates::Level::excited, *sp, beta_bath);
          },
          [sp, beta_bath](double t) {
            return rates::rate(t, rates::Level::ground, *sp, beta_bath);
          }};
}

RateFunctions tabulated_rates(const rates::RateInterpolant& interp) {
  auto it = std::make_shared<rates::RateInterpolant>(interp);
  return {[it](double t) { return it->r_e(t); },
          [it](double t) { return it->r_g(t); }};
}

SimulationTrace evolve(QubitPopulations initial, const MeasurementSchedule& schedule,
                       double horizon, const RateFunctions& rates, EvolveOptions opt) {
  if (horizon <= 0.0) throw std::invalid_argument("evolve: horizon must be positive");
  if (!rates.r_e || !rates.r_g) throw std::invalid_argument("evolve: missing rate functions");
  schedule.validate(horizon);

  SimulationTrace trace;
  for (const auto& ev : schedule.events) {
    trace.event_times.push_back(ev.time + 0.5 * ev.duration);
    if (ev.duration > 0.0 && trace.warning.empty())
      trace.warning =
          "finite-duration events collapsed to impulsive resets at their midpoints; "
          "use the full solver for detector back-action";
  }

  const int n = opt.n_samples > 0 ? opt.n_samples : 1000;
  std::vector<double> stops;
  stops.reserve(static_cast<std::size_t>(n) + trace.event_times.size() + 1);
  for (int i = 0; i <= n; ++i) stops.push_back(horizon * i / n);
  stops.insert(stops.end(), trace.event_times.begin(), trace.event_times.end());
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [horizon](double a, double b) { return b - a < 1e-13 * horizon; }),
              stops.end());

  double clock_origin = 0.0;
  auto rhs = [&](double t, double y) {
    const double tp = std::max(0.0, t - clock_origin);
    return rates.r_g(tp) * (1.0 - y) - rates.r_e(tp) * y;
  };

  double t = 0.0;
  double y = clamp01(initial.rho_ee);
  std::size_t next_event = 0;
  auto at_event = [&](double tt) {
    return next_event < trace.event_times.size() &&
           std::abs(tt - trace.event_times[next_event]) < 1e-13 * std::max(1.0, horizon);
  };

  trace.times.reserve(stops.size());
  trace.rho_ee.reserve(stops.size());
  trace.rho_dot.reserve(stops.size());

  double h = horizon / (100.0 * n);  // refined by the controller immediately
  double k1 = rhs(t, y);
  if (stops.front() < 1e-13 * horizon) {
    if (at_event(0.0)) ++next_event;  // reset at t = 0 is a no-op
    trace.times.push_back(0.0);
    trace.rho_ee.push_back(y);
    trace.rho_dot.push_back(k1);
  }

  for (double stop : stops) {
    if (stop < 1e-13 * horizon) continue;
    while (t < stop) {
      bool clipped = false;
      if (t + h >= stop) {
        h = stop - t;
        clipped = true;
      }
      using D = DormandPrince;
      const double k2 = rhs(t + h * D::a21, y + h * D::a21 * k1);
      const double k3 = rhs(t + h * 0.3, y + h * (D::a31 * k1 + D::a32 * k2));
      const double k4 = rhs(t + h * 0.8, y + h * (D::a41 * k1 + D::a42 * k2 + D::a43 * k3));
      const double k5 = rhs(t + h * (8.0 / 9.0),
                            y + h * (D::a51 * k1 + D::a52 * k2 + D::a53 * k3 + D::a54 * k4));
      const double k6 = rhs(t + h, y + h * (D::a61 * k1 + D::a62 * k2 + D::a63 * k3 +
                                            D::a64 * k4 + D::a65 * k5));
      const double y5 =
          y + h * (D::b1 * k1 + D::b3 * k3 + D::b4 * k4 + D::b5 * k5 + D::b6 * k6);
      const double k7 = rhs(t + h, y5);
      const double err = std::abs(h * (D::e1 * k1 + D::e3 * k3 + D::e4 * k4 + D::e5 * k5 +
                                       D::e6 * k6 + D::e7 * k7));
      const double tol = opt.atol + opt.rtol * std::max(std::abs(y), std::abs(y5));
      if (err <= tol) {
        t = clipped ? stop : t + h;
        y = clamp01(y5);
        k1 = k7;  // FSAL
      }
      double factor = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
      h *= std::min(5.0, std::max(0.2, factor));
      if (h < 1e-14 * std::max(1.0, t))
        throw std::runtime_error("evolve: step size underflow (tolerance failure)");
    }
    if (at_event(stop)) {
      ++next_event;
      if (schedule.rethermalize) clock_origin = stop;
      k1 = rhs(t, y);  // rate clock may have been reset
    }
    trace.times.push_back(stop);
    trace.rho_ee.push_back(y);
    trace.rho_dot.push_back(k1);
  }
  return trace;
}

SimulationTrace evolve(QubitPopulations initial, const MeasurementSchedule& schedule,
                       double horizon, const Spectrum& s, InverseTemperature beta_bath,
                       EvolveOptions opt) {
  if (opt.n_samples <= 0) {
    // Sample finely enough to resolve beats at w0 + w_a.
    const double period = 2.0 * M_PI / (s.omega_a + std::max(s.omega_a, s.omega_max * 0.5));
    const double n = std::ceil(horizon / (period / 16.0));
    opt.n_samples = static_cast<int>(std::min(20000.0, std::max(400.0, n)));
  }
  // Long horizons amortize the rate quadrature through a table; the dense
  // region covers the memory time, the tail grid stretches geometrically.
  if (horizon * s.omega_a > 15.0) {
    rates::RateGrid grid;
    grid.dense_until = std::min(horizon, 30.0 / s.omega_a);
    auto table = rates::build_rate_table(s, beta_bath, horizon, grid, false);
    return evolve(initial, schedule, horizon, tabulated_rates(rates::RateInterpolant(table)),
                  opt);
  }
  return evolve(initial, schedule, horizon, direct_rates(s, beta_bath), opt);
}

}  // namespace zeno::me
