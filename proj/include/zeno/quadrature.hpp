#pragma once
// quadrature.hpp — adaptive Gauss-Kronrod integration with explicit panel control.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zeno {

using Integrand = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;   // accumulated estimate, same units as value
  long evaluations = 0;
  bool converged = true;
};

// Thrown when the subdivision budget is exhausted before the tolerance is met.
struct QuadratureError : std::runtime_error {
  double achieved;
  QuadratureError(const std::string& what, double achieved_tol)
      : std::runtime_error(what), achieved(achieved_tol) {}
};

// Single Gauss-Kronrod 7-15 rule on [a, b]; error is the usual (200|K-G|)^1.5 estimate.
QuadratureResult gauss_kronrod_15(const Integrand& f, double a, double b);

// Adaptive bisection on [a, b] until the absolute tolerance is met.
QuadratureResult integrate_adaptive(const Integrand& f, double a, double b,
                                    double abs_tol, int max_depth = 48);

// Adaptive integration over a pre-split panel chain.  Panels are further
// subdivided so that none exceeds max_panel_width (ignored if <= 0), then
// each is refined adaptively with a width-proportional share of abs_tol.
QuadratureResult integrate_panels(const Integrand& f,
                                  const std::vector<double>& breakpoints,
                                  double abs_tol, double max_panel_width = 0.0);

// Convenience: integrate_adaptive that throws QuadratureError on failure.
double integrate_or_throw(const Integrand& f, double a, double b, double abs_tol);

}  // namespace zeno
