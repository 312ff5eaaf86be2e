#pragma once
// scheduler.hpp — greedy peak/trough placement of measurement times.
//
// Every non-selective readout restarts the population transient, so placing
// the next readout at a trough of rho_ee(t) ratchets the qubit down (cooling)
// and placing it at a peak ratchets it up (heating).  The placement is
// myopic: one window is scanned per event, with no lookahead across events.

#include <limits>
#include <string>
#include <vector>

#include "zeno/exact_bath.hpp"
#include "zeno/master_equation.hpp"
#include "zeno/spectrum.hpp"

namespace zeno::sched {

enum class Direction { cool, heat };
enum class Engine { master_equation, exact };

struct ScheduleObjective {
  Direction direction = Direction::cool;
  int n_measurements = 10;  // 0 is allowed and returns the unmeasured trace
  double dt_min = 0.0;      // scan window per interval, 0 < dt_min < dt_max
  double dt_max = 0.0;
  Engine engine = Engine::master_equation;
  // End of the reported trace.  0 means the protocol ends at the last
  // measurement, so final_rho_ee is the population the schedule ratcheted to
  // (K = 0 falls back to one window of free evolution).
  double trace_horizon = 0.0;

  void validate() const;
};

struct ScheduleResult {
  me::MeasurementSchedule schedule;
  me::SimulationTrace trace;
  std::vector<double> event_rho_ee;  // refined population at each chosen event
  double final_rho_ee = 0.0;
  double extremal_rho_ee = 0.0;   // min over the run (cool) or max (heat)
  double reference_rho_ee = 0.0;  // detailed-balance population of the bath
};

// Greedy placement on the rate-equation engine.  All evaluations (window
// scans, refinements, the final trace) share one tabulated rate interpolant
// so the recorded event populations match the trace they came from.  For the
// cooling direction the trough search is confined to intervals passing the
// spectral cooling test, keeping positive cooling claims corroborated; when
// the window certifies nowhere the search runs unrestricted.
ScheduleResult greedy_schedule(const ScheduleObjective& obj, me::QubitPopulations initial,
                               const Spectrum& s, InverseTemperature beta_bath);

// Exact-engine variant.  Starts from |g, vacuum> (zero-temperature bath), so
// the reference population is 0; pre_relax lets the qubit dress itself before
// the first window opens, matching the exact-trace pipeline.
ScheduleResult greedy_schedule(const ScheduleObjective& obj, const bath::BathSystem& sys,
                               double pre_relax = 0.0);

// One temperature point of the heat/cool extremes.  max_heating is the
// highest event population minus the detailed-balance value.  max_cooling is
// the deepest event population deficit among intervals whose cooling margin
// is positive; when no chosen interval is certified (the clamped second-order
// trace is not trustworthy at strong coupling), the row falls back to the
// certified single-interval estimate 4 tanh(alpha/2) max_margin, which goes
// negative past the critical temperature.
struct SweepRow {
  double alpha = 0.0;
  double max_heating = 0.0;
  double max_cooling = 0.0;
  bool cooling_certified = false;  // true when a chosen interval had margin > 0
};

struct SweepTable {
  std::vector<SweepRow> rows;
  // First downward zero crossing of max_cooling along the alpha grid,
  // bisection-refined; NaN when the scanned range has no crossing.
  double critical_alpha = std::numeric_limits<double>::quiet_NaN();
  std::string maximal_definition;  // how "maximal" was measured, for artifacts
};

// Runs a heating and a cooling greedy schedule per alpha (system and bath
// share the temperature) and tabulates the extremal deviations from detailed
// balance.  Rows are filled slot-by-slot so the result is identical for any
// thread count.
SweepTable temperature_sweep(const ScheduleObjective& base, const std::vector<double>& alphas,
                             const BathSpectrumSpec& spec, int threads = 1);

}  // namespace zeno::sched
