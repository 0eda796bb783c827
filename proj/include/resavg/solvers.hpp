#ifndef RESAVG_SOLVERS_HPP
#define RESAVG_SOLVERS_HPP

#include <functional>
#include <vector>

#include "resavg/monotone_operator.hpp"

namespace resavg {

// Uniform stopping policy for all fixed-point drivers. Iterations stop on a
// small step norm; the divergence threshold is the finite stand-in for the
// norm blow-up that signals an empty fixed point set.
struct StoppingRule {
  double step_tol = 1e-10;
  double residual_tol = 1e-9;
  int max_iters = 100000;
  double divergence_norm = 1e12;
  // Store every k-th iterate (the initial and final points are always kept).
  int trace_stride = 1;

  void validate() const;
};

enum class IterStatus { Converged, MaxIters, Diverged };

const char* to_string(IterStatus s);

struct IterationTrace {
  std::vector<Point> iterates;     // thinned by trace_stride
  std::vector<double> step_norms;  // every step, never thinned
  IterStatus status = IterStatus::MaxIters;
  Point final;
  int iterations_used = 0;
};

// Generic driver: iterates x <- T(x) under the stopping rule.
IterationTrace iterate_fixed_point(const std::function<Point(const Point&)>& T,
                                   const Point& x0, const StoppingRule& rule);

// True once the divergence threshold is crossed.
bool detect_divergence(const Point& x, const StoppingRule& rule);

// Proximal point iteration on the averaged map
// x_{n+1} = lambda1 J_{A1}(x_n) + lambda2 J_{A2}(x_n).
IterationTrace run_proximal_point(const ResolventAverage& ra, const Point& x0,
                                  const StoppingRule& rule);

struct AlternatingResult {
  IterationTrace trace_x;
  IterationTrace trace_y;
  Point averaged_limit;  // lambda1 x-limit + lambda2 y-limit
};

// Alternating scaled resolvents: y_n = J_{A2/lambda1} x_n, then
// x_{n+1} = J_{A1/lambda2} y_n. The averaged limit lies in Fix of the
// resolvent average.
AlternatingResult run_alternating(const MonotoneOperator& a1,
                                  const MonotoneOperator& a2, const Weights& w,
                                  const Point& x0, const StoppingRule& rule);

struct CompositionResult {
  IterationTrace trace;
  Point recovered_fix;  // averaged recovery of the Fix J_A member
};

// Iterates the scaled-resolvent composition in the requested order; the
// recovered point applies the one remaining scaled resolvent to the limit:
// EF: lambda1 x + lambda2 J_{A2/lambda1}(x), FE symmetric.
CompositionResult run_composition(const MonotoneOperator& a1,
                                  const MonotoneOperator& a2, const Weights& w,
                                  CompositionOrder order, const Point& x0,
                                  const StoppingRule& rule);

}  // namespace resavg

#endif  // RESAVG_SOLVERS_HPP
