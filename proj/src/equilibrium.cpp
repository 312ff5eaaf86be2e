#include "zeno/equilibrium.hpp"

#include <cmath>

#include "zeno/quadrature.hpp"

namespace zeno::eq {

namespace {

constexpr double kQuadTol = 1e-10;
constexpr double kGuard = 0.5;  // perturbative validity threshold

// f(z) = (e^z - z - 1) / z^2, >= 0 everywhere.  The direct form loses digits
// for small |z|, so switch to the Taylor series there; twelve terms reach
// machine precision for |z| < 0.5, well past the near-resonance
// |omega -+ omega_a| < 1e-2 omega_a neighbourhood the kernels probe.
double f_exp2(double z) {
  if (std::abs(z) < 0.5) {
    double term = 0.5;  // z^0 / 2!
    double sum = term;
    for (int k = 1; k <= 12; ++k) {
      term *= z / (k + 2);
      sum += term;
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

// g(z) = (e^z - 1) / z; expm1 keeps this accurate down to z = 0.
double g_exp1(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

struct WeightedIntegrals {
  double purity_num = 0.0;  // integral G_T (P+ K+ - P- K-) dw / w_a^2
  double den = 0.0;         // integral G_T (P+ K+ + P- K-) dw / w_a^2
  double hsb_num = 0.0;     // integral G_T (P+ Kt+ - P- Kt-) dw / w_a
};

// The four products (occupancy weight) * P(+-) * K at one |w|.  The bare
// kernels overflow once alpha(1 + |w|/w_a) passes ~700, so every combination
// is rearranged here until all exponentials carry non-positive arguments;
// e.g. on the w < 0 side P+ n(w) K+ = alpha^2 [1 - (Z+1)e^{-Z}] /
// (D (1-e^{-x}) Z^2) with x = alpha w/w_a, Z = alpha + x, D = 1 + e^{-alpha}.
struct KernelProducts {
  double a;   // weight * P+ * K+
  double b;   // weight * P- * K-
  double at;  // weight * P+ * Kt+
  double bt;  // weight * P- * Kt-
};

KernelProducts kernel_products(double alpha, double x, bool positive_side) {
  const double ema = std::exp(-alpha);
  const double emx = std::exp(-x);
  const double d = 1.0 + ema;           // 1 / P-
  const double occ = -std::expm1(-x);   // 1 - e^{-x}
  const double a2 = alpha * alpha;
  KernelProducts k;

  if (positive_side) {
    // weight = n + 1 = 1 / occ; kernel arguments z+ = alpha - x, z- = alpha + x
    const double zp = alpha - x;
    const double zm = alpha + x;
    k.a = std::abs(zp) < 0.5
              ? a2 * ema * f_exp2(zp) / (d * occ)
              : a2 * (emx - (zp + 1.0) * ema) / (d * occ * zp * zp);
    k.b = a2 * f_exp2(-zm) / (d * occ);
    k.at = zp < 600.0 ? alpha * ema * g_exp1(zp) / (d * occ)
                      : alpha * (emx - ema) / (d * occ * zp);
    k.bt = alpha * (zm == 0.0 ? -1.0 : std::expm1(-zm) / zm) / (d * occ);
  } else {
    // weight = n = e^{-x} / occ; arguments flip: z+ = alpha + x, z- = alpha - x
    const double zp = alpha + x;
    const double zm = alpha - x;
    k.a = zp < 0.5 ? a2 * std::exp(-zp) * f_exp2(zp) / (d * occ)
                   : a2 * (1.0 - (zp + 1.0) * std::exp(-zp)) / (d * occ * zp * zp);
    k.b = std::abs(zm) < 0.5
              ? a2 * emx * f_exp2(-zm) / (d * occ)
              : a2 * (ema + (zm - 1.0) * emx) / (d * occ * zm * zm);
    k.at = alpha * (zp == 0.0 ? 1.0 : -std::expm1(-zp) / zp) / (d * occ);
    k.bt = zm > -600.0
               ? alpha * emx * (zm == 0.0 ? -1.0 : std::expm1(-zm) / zm) / (d * occ)
               : alpha * (ema - emx) / (d * occ * zm);
  }
  return k;
}

// Kernel integrals of the correction; the positive-frequency side carries
// G0(w)(n+1), the negative side G0(|w|) n(|w|), both folded into the products.
WeightedIntegrals weighted_integrals(const Spectrum& s, InverseTemperature T) {
  const double wa = s.omega_a;
  const double alpha = T.alpha;

  auto make_integrand = [&](int which, bool positive_side) {
    return [&, which, positive_side](double nu) {
      const double g = s.g0(nu);
      if (g == 0.0) return 0.0;
      KernelProducts k = kernel_products(alpha, alpha * nu / wa, positive_side);
      const double kern = which == 0   ? k.a - k.b
                          : which == 1 ? k.a + k.b
                                       : k.at - k.bt;
      return g * kern;
    };
  };

  WeightedIntegrals out;
  for (int which = 0; which < 3; ++which) {
    double val = 0.0;
    for (bool positive_side : {true, false}) {
      QuadratureResult r = integrate_adaptive(make_integrand(which, positive_side),
                                              s.omega_min, s.omega_max, kQuadTol);
      if (!r.converged)
        throw QuadratureError("equilibrium: kernel integral did not converge",
                              r.error);
      val += r.value;
    }
    const double scale = which == 2 ? wa : wa * wa;
    if (which == 0) out.purity_num = val / scale;
    if (which == 1) out.den = val / scale;
    if (which == 2) out.hsb_num = val / scale;
  }
  return out;
}

// beta -> inf limit of the excitation integral: the thermally suppressed
// n(nu) channel of K+ survives with the bounded limit G0(nu) w_a^2/(w_a+nu)^2,
// everything else dies off exponentially.  This is the weight of the
// single-excitation dressing of the ground state, Sum_k eta_k^2/(w_a+w_k)^2.
double t0_excitation_integral(const Spectrum& s) {
  const double wa = s.omega_a;
  QuadratureResult r = integrate_adaptive(
      [&](double nu) {
        const double q = wa / (wa + nu);
        return s.g0(nu) * q * q;
      },
      s.omega_min, s.omega_max, kQuadTol);
  if (!r.converged)
    throw QuadratureError("equilibrium: T=0 excitation integral did not converge",
                          r.error);
  return r.value / (wa * wa);
}

}  // namespace

KCoefficients kcoeff(double omega, InverseTemperature T, double omega_a) {
  if (T.is_zero_temperature())
    throw std::invalid_argument(
        "kcoeff: kernels diverge at T = 0; use the dedicated limit branch");
  const double alpha = T.alpha;
  const double zp = alpha * (1.0 - omega / omega_a);
  const double zm = alpha * (1.0 + omega / omega_a);
  KCoefficients k;
  k.k_plus = alpha * alpha * f_exp2(zp);
  k.k_minus = alpha * alpha * f_exp2(-zm);
  k.kt_plus = alpha * g_exp1(zp);
  k.kt_minus = alpha * (zm == 0.0 ? -1.0 : std::expm1(-zm) / zm);
  return k;
}

double corrected_purity(const Spectrum& s, InverseTemperature T) {
  if (T.is_zero_temperature()) {
    // Normalized dressed ground state: rho_ee = A/(1+A) with A the
    // single-excitation weight, hence P = (A - 1)/(A + 1).
    const double a = t0_excitation_integral(s);
    if (a >= kGuard) throw StrongCouplingError(a);
    return (a - 1.0) / (a + 1.0);
  }
  if (T.alpha == 0.0) return 0.0;  // corrections vanish with alpha^2
  WeightedIntegrals wi = weighted_integrals(s, T);
  if (wi.den >= kGuard) throw StrongCouplingError(wi.den);
  return (bare_purity(T) + wi.purity_num) / (1.0 + wi.den);
}

double mean_interaction_energy(const Spectrum& s, InverseTemperature T) {
  const double wa = s.omega_a;
  if (T.is_zero_temperature()) {
    // Two channels survive the beta -> inf limit and reduce to the same
    // integral G0(nu) w_a/(w_a+nu) dnu: the n(nu)-weighted K~+ piece from
    // negative frequencies and the (n+1)-weighted K~- piece from positive ones.
    QuadratureResult r = integrate_adaptive(
        [&](double nu) { return s.g0(nu) * wa / (wa + nu); }, s.omega_min,
        s.omega_max, kQuadTol);
    if (!r.converged)
      throw QuadratureError("equilibrium: T=0 interaction energy integral",
                            r.error);
    return -2.0 * r.value / wa;
  }
  if (T.alpha == 0.0) return 0.0;
  WeightedIntegrals wi = weighted_integrals(s, T);
  if (wi.den >= kGuard) throw StrongCouplingError(wi.den);
  return -wi.hsb_num / (1.0 + wi.den);
}

double lamb_shift_t0(const Spectrum& s) {
  QuadratureResult r = integrate_adaptive(
      [&](double w) { return s.g0(w) / (1.0 + w / s.omega_a); }, s.omega_min,
      s.omega_max, kQuadTol);
  if (!r.converged)
    throw QuadratureError("equilibrium: lamb shift integral did not converge",
                          r.error);
  return -2.0 * r.value / s.omega_a;
}

EquilibriumReport report(const Spectrum& s, InverseTemperature T) {
  EquilibriumReport rep;
  rep.p_eq_bare = bare_purity(T);
  rep.p_eq_corrected = corrected_purity(s, T);
  rep.rho_ee = 0.5 * (1.0 + rep.p_eq_corrected);
  rep.rho_gg = 1.0 - rep.rho_ee;
  rep.mean_hsb = mean_interaction_energy(s, T);
  rep.lamb_shift_t0 = lamb_shift_t0(s);
  return rep;
}

}  // namespace zeno::eq
