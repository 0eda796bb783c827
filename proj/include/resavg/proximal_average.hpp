#ifndef RESAVG_PROXIMAL_AVERAGE_HPP
#define RESAVG_PROXIMAL_AVERAGE_HPP

#include <stdexcept>

#include "resavg/monotone_operator.hpp"

namespace resavg {

struct ProxAvgOptions {
  double value_tol = 1e-8;
  int max_sweeps = 200;
  // Skip the exact path even when both functions are quadratic, so the
  // numeric minimizer can be cross-checked against it.
  bool force_numeric = false;
};

// Raised when the inner minimizer fails to settle within the sweep budget.
class ProxAverageError : public std::runtime_error {
 public:
  ProxAverageError(double best_value, double last_improvement);
  double best_value;
  double last_improvement;
};

// Value of the proximal average at z:
//   p_gamma(f,lambda)(z) = inf { lambda1 f1(x) + lambda2 f2(y)
//                                + lambda1 lambda2 |x-y|^2 / (2 gamma) }
// over the splittings z = lambda1 x + lambda2 y. Both functions must carry
// divisor 1. Quadratic pairs are solved exactly; otherwise the infimum is
// found by cyclic coordinate descent with per-coordinate golden-section line
// searches and automatic bracket expansion. Returns +infinity when no
// feasible splitting is found (z outside lambda1 dom f1 + lambda2 dom f2).
double proximal_average_value(const ConvexFunction& f1, const ConvexFunction& f2,
                              const Weights& w, double gamma, const Point& z,
                              const ProxAvgOptions& opts = {});

}  // namespace resavg

#endif  // RESAVG_PROXIMAL_AVERAGE_HPP
