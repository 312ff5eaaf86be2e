#pragma once
// master_equation.hpp — reduced population dynamics of the probed qubit.
//
// Between measurements the diagonal state obeys
//   d rho_ee / dt = R_g(t') rho_gg - R_e(t') rho_ee
// where t' is the time since the last measurement event: a non-selective
// measurement erases system-bath correlations, so the memory kernel restarts.
// Coherences stay zero throughout (the initial states used here are diagonal
// and measurements keep them so), which reduces the state to one number.

#include <functional>
#include <string>
#include <vector>

#include "zeno/rates.hpp"
#include "zeno/spectrum.hpp"

namespace zeno::me {

struct QubitPopulations {
  double rho_ee = 0.0;
  double rho_gg = 1.0;
};

// rho_ee = (1 + tanh(-alpha_s/2)) / 2; alpha_s = inf gives the ground state.
QubitPopulations initial_from_temperature(InverseTemperature alpha_s);

struct Measurement {
  double time = 0.0;      // start of the event
  double duration = 0.0;  // 0 = impulsive
};

struct MeasurementSchedule {
  std::vector<Measurement> events;  // strictly increasing, non-overlapping
  // Erase the correlation clock at each event (bath taken as re-thermalized).
  // When false the rates keep running on the absolute time axis instead.
  bool rethermalize = true;

  static MeasurementSchedule periodic(double first, double interval, int count,
                                      double duration = 0.0);
  void validate(double horizon) const;
};

// Rates as functions of the correlation-clock time; lets tests substitute
// closed-form rates and production code choose direct quadrature vs a table.
struct RateFunctions {
  std::function<double(double)> r_e;
  std::function<double(double)> r_g;
};

RateFunctions direct_rates(const Spectrum& s, InverseTemperature beta_bath);
RateFunctions tabulated_rates(const rates::RateInterpolant& interp);

struct EvolveOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  int n_samples = 0;  // 0: pick a grid resolving the w0 + w_a oscillation
};

struct SimulationTrace {
  std::vector<double> times;
  std::vector<double> rho_ee;
  std::vector<double> rho_dot;      // RHS at each sample (right limit at events)
  std::vector<double> event_times;  // effective impulsive instants
  std::vector<double> sigma;        // left empty here; an entropy pass fills it
  std::string warning;              // set when finite events were collapsed
};

// Integrates the rate equation over [0, horizon] with event stops.  Finite
// event durations are collapsed to an impulsive reset at t + duration/2 (this
// engine has no detector model); a warning is recorded on the trace.
SimulationTrace evolve(QubitPopulations initial, const MeasurementSchedule& schedule,
                       double horizon, const RateFunctions& rates,
                       EvolveOptions opt = {});

// Convenience: build rates from the spectrum, choosing a cached table when
// the horizon makes per-step quadrature expensive.
SimulationTrace evolve(QubitPopulations initial, const MeasurementSchedule& schedule,
                       double horizon, const Spectrum& s, InverseTemperature beta_bath,
                       EvolveOptions opt = {});

}  // namespace zeno::me
