#ifndef RESAVG_CONVEX_FUNCTION_HPP
#define RESAVG_CONVEX_FUNCTION_HPP

#include <optional>
#include <variant>

#include "resavg/types.hpp"

namespace resavg {

// f(x) = 1/2 <x,Qx> + <q,x> + c with Q symmetric positive semidefinite.
// The eigendecomposition of Q is computed once at construction and reused by
// prox (diagonal solve) and the conjugate (pseudo-inverse on range(Q)).
struct Quadratic {
  Matrix Q;
  Point q;
  double c = 0.0;

  // Filled during validation.
  Matrix eigvecs{};
  Point eigvals{};
};

// f(x) = sum_i w_i |x_i| with w_i > 0.
struct AbsSum {
  Point weights;
};

// Indicator of the box {lo <= x <= hi} (componentwise).
struct IndicatorBox {
  Point lo, hi;
};

// Indicator of the closed ball of given center and radius.
struct IndicatorBall {
  Point center;
  double radius = 1.0;
};

// Indicator of the halfspace {<normal,x> <= offset}, normal != 0.
struct IndicatorHalfspace {
  Point normal;
  double offset = 0.0;
};

// Indicator of the affine set {anchor + basis * t}; basis columns are
// orthonormal and span the direction space.
struct IndicatorAffine {
  Point anchor;
  Matrix basis;
};

// Indicator of the singleton {p}.
struct IndicatorPoint {
  Point p;
};

// A catalog function together with a positive divisor d, representing f/d.
// The divisor carries the weight scalings f1/lambda2, f2/lambda1 without
// wrapper objects: prox of f/d at parameter gamma is prox of f at gamma/d.
class ConvexFunction {
 public:
  using Variant = std::variant<Quadratic, AbsSum, IndicatorBox, IndicatorBall,
                               IndicatorHalfspace, IndicatorAffine, IndicatorPoint>;

  // Validates structural convexity (PSD Q, lo <= hi, radius > 0, normal != 0,
  // orthonormal basis) and divisor > 0; throws std::invalid_argument.
  explicit ConvexFunction(Variant v, double divisor = 1.0);

  Eigen::Index dim() const { return dim_; }
  double divisor() const { return divisor_; }
  const Variant& variant() const { return variant_; }
  bool is_indicator() const;

  // Returns (f/divisor)/lambda, i.e. the same catalog entry with divisor
  // multiplied by lambda. lambda > 0.
  ConvexFunction scaled_by_divisor(double lambda) const;

  // Short variant tag ("quadratic", "abs_sum", ...), used in reports.
  const char* variant_name() const;

 private:
  Variant variant_;
  double divisor_;
  Eigen::Index dim_;
};

// Function value (f/divisor)(x); +infinity exactly when x violates an
// indicator's membership (absolute tolerance tol::membership).
ExtReal eval(const ConvexFunction& f, const Point& x);

// The unique minimizer of f(y)/divisor + |x-y|^2 / (2 gamma). Closed form per
// variant; projections ignore gamma.
Point prox(const ConvexFunction& f, double gamma, const Point& x);

// Fenchel conjugate of the divided function: (f/d)*(phi) = f*(d phi)/d.
// Quadratics with singular Q return +infinity when d*phi - q is off range(Q);
// AbsSum conjugates are indicators of the weight box; set indicators yield
// support functions.
ExtReal conjugate_eval(const ConvexFunction& f, const Point& phi);

struct MoreauResult {
  double value;
  Point gradient;
};

// Moreau envelope value and gradient at x: with p = prox(f, gamma, x),
// value = (f/d)(p) + |x-p|^2/(2 gamma) and gradient = (x-p)/gamma.
MoreauResult moreau(const ConvexFunction& f, double gamma, const Point& x);

}  // namespace resavg

#endif  // RESAVG_CONVEX_FUNCTION_HPP
