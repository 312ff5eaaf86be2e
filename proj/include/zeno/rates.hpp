#pragma once
// rates.hpp — time-dependent transition rates of a frequently-probed qubit.
//
// R_e(t) = 2t * integral G_T(w) sinc[(w - w_a) t] dw   (decay of rho_ee)
// R_g(t) = 2t * integral G_T(w) sinc[(w + w_a) t] dw   (growth of rho_ee)
//
// Short times give the universal linear law R ~ 2 Rdot0 t with
// Rdot0 = integral G_T dw = <B^2>; long times recover the golden-rule values
// 2 pi G_T(+-w_a).  R_g may transiently go negative (oscillatory regime).

#include <vector>

#include "zeno/spectrum.hpp"

namespace zeno::rates {

enum class Level { excited, ground };

// sin(x)/x with the removable singularity filled in.
double sinc(double x);

// Oscillation-aware quadrature: panels are split at the sinc zeros and capped
// at width panel_scale * pi/(8t).  panel_scale exists so tests can halve it.
double rate(double t, Level which, const Spectrum& s, InverseTemperature T,
            double panel_scale = 1.0);

// Zeno slope: integral of G_T over the quadrature window.
double rdot0(const Spectrum& s, InverseTemperature T);

// Time-integrated rates J(t) = integral_0^t R ds, evaluated in closed kernel
// form: J_g = integral G0 [ n sinc^2((w-w_a)t/2) + (n+1) sinc^2((w+w_a)t/2) ] t^2 dw
// and J_e with the two kernels swapped.  Agrees with direct time integration.
double integrated_rate(double t, Level which, const Spectrum& s,
                       InverseTemperature T);

struct MarkovRates {
  double r_e = 0.0;  // 2 pi G_T(+w_a)
  double r_g = 0.0;  // 2 pi G_T(-w_a)
};
MarkovRates markov_rates(const Spectrum& s, InverseTemperature T);

struct RateTable {
  std::vector<double> times;
  std::vector<double> r_e, r_g;
  std::vector<double> j_e, j_g;
  double rdot0 = 0.0;
  double markov_e = 0.0;
  double markov_g = 0.0;
};

struct RateGrid {
  double t_min = 1e-4;        // first geometric node
  double geo_ratio = 1.25;    // geometric growth up to t_uniform_start
  double t_uniform_start = 0.05;
  double dt_uniform = 0.025;
  double dense_until = 0.0;   // 0 -> min(horizon, 5/gamma-ish default by caller)
  double tail_ratio = 1.04;   // geometric stretch past dense_until
};

RateTable build_rate_table(const Spectrum& s, InverseTemperature T,
                           double horizon, RateGrid grid = {},
                           bool with_integrated = true);

// Cubic-Hermite interpolant over a RateTable; clamps to the table ends.
class RateInterpolant {
 public:
  RateInterpolant() = default;
  explicit RateInterpolant(RateTable table);

  double r_e(double t) const { return eval(table_.r_e, slopes_e_, t); }
  double r_g(double t) const { return eval(table_.r_g, slopes_g_, t); }
  const RateTable& table() const { return table_; }

 private:
  double eval(const std::vector<double>& y, const std::vector<double>& m,
              double t) const;
  RateTable table_;
  std::vector<double> slopes_e_, slopes_g_;
};

}  // namespace zeno::rates
