#ifndef RESAVG_GEOMETRY_HPP
#define RESAVG_GEOMETRY_HPP

#include <map>
#include <string>
#include <utility>

#include "resavg/solvers.hpp"

namespace resavg {

// Gap vector and dual solution. Signs are fixed once: u* = y - x over the
// alternating limit pair (x, y), v* = -u*, and the dual solution
// phi_bar = v* = x - y.
struct GapData {
  Point u_star;
  Point v_star;
  Point phi_bar;

  static GapData from_pair(const Point& x_bar, const Point& y_bar);
};

// Computed representatives of the four fixed point sets plus the residuals of
// the identities tying them together. The member sets themselves are closed
// convex and mutually homeomorphic; representatives with residual
// certificates stand in for them.
struct GeometryReport {
  Point e_rep;                      // in E = Fix J_{A1/l2} J_{A2/l1}
  Point f_rep;                      // in F = Fix J_{A2/l1} J_{A1/l2}
  std::pair<Point, Point> s_rep;    // in S (alternating pair)
  Point fix_rep;                    // in Fix J_A
  GapData gap;
  std::map<std::string, double> identity_residuals;
  double tolerance = 0.0;

  bool verified() const;
};

// Raised when the alternating solver cannot produce representatives: either
// the iterates blew past the divergence threshold (all four sets are empty)
// or the iteration budget ran out first.
class EmptyFixedPointSets : public std::runtime_error {
 public:
  enum class Reason { Diverged, Budget };

  EmptyFixedPointSets(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

// Runs the alternating driver from x0, assembles representatives of
// E, F, S, Fix J_A and the gap data, and fills every identity residual (see
// verify_relative_geometry for the list). Throws EmptyFixedPointSets when the
// solver diverges (all four sets are then simultaneously empty).
GeometryReport compute_geometry(const MonotoneOperator& a1,
                                const MonotoneOperator& a2, const Weights& w,
                                const Point& x0, const StoppingRule& rule);

// H1: E -> Fix J_A, x |-> lambda1 x + lambda2 J_{A2/lambda1}(x) = x + lambda2 u*.
Point map_E_to_fix(const Point& x, const MonotoneOperator& a2, const Weights& w);

// H2: F -> Fix J_A, y |-> lambda1 J_{A1/lambda2}(y) + lambda2 y = y - lambda1 u*.
Point map_F_to_fix(const Point& y, const MonotoneOperator& a1, const Weights& w);

// T^{-1}: Fix J_A -> S, z |-> (J_{A1} z, J_{A2} z). The precondition
// z in Fix J_A is residual-checked against the averaged map; the returned
// pair is asserted to lie in S.
std::pair<Point, Point> decompose_fix(const Point& z, const MonotoneOperator& a1,
                                      const MonotoneOperator& a2, const Weights& w,
                                      double tolerance = tol::identity);

// Fenchel dual objective (f1/lambda2)*(-phi) + (f2/lambda1)*(phi) + |phi|^2/2.
// Both functions must carry divisor 1; the weight scalings are applied here.
ExtReal dual_objective(const ConvexFunction& f1, const ConvexFunction& f2,
                       const Weights& w, const Point& phi);

// The unique dual solution read off the alternating pair: x - y over s_rep.
Point dual_solution(const GeometryReport& report);

// Recomputes the named identity residuals from the report's representatives:
//   plumber_i        |fix - (e + lambda2 u*)|
//   plumber_ii       |fix - (f - lambda1 u*)|
//   allsets_iii      |fix - (lambda1 e + lambda2 f)|
//   composition_E    |C_EF(e) - e|
//   composition_F    |C_FE(f) - f|
//   average_fix      |J_A(fix) - fix|
//   roundtrip_E      |J_{A1}(H1(e)) - e|
//   roundtrip_F      |J_{A2}(H2(f)) - f|
//   roundtrip_S      |T^{-1}(T(s)) - s|
//   gap_second_start |u*' - u*| with u*' re-derived from a shifted start
//   penticton_iii_a1 |yosida(A1,1,fix)/lambda2 - u*|
//   penticton_iii_a2 |yosida(A2,1,fix)/lambda1 - v*|
//   bijection_E_to_F |J_{A2/lambda1}(e) - (e + u*)|
//   bijection_F_to_E |J_{A1/lambda2}(f) - (f + v*)|
std::map<std::string, double> verify_relative_geometry(
    const MonotoneOperator& a1, const MonotoneOperator& a2, const Weights& w,
    const GeometryReport& report, double tolerance,
    const StoppingRule& rule = StoppingRule{});

// Checks the subdifferential characterization of the dual solution:
// phi_bar = e - J_{A2/lambda1}(e) and -phi_bar = f - J_{A1/lambda2}(f), plus
// the sampled subgradient inequalities -phi_bar in (partial f1/lambda2)(e)
// and phi_bar in (partial f2/lambda1)(f). Returns true when all hold.
bool verify_subgradient_characterization(const ConvexFunction& f1,
                                         const ConvexFunction& f2, const Weights& w,
                                         const GeometryReport& report,
                                         double tolerance, int samples,
                                         unsigned long long seed = 0x5eed5eedULL);

// Outcome of the unscaled-composition counterexample probe (1-D only).
struct CounterexampleResult {
  bool claim_holds;                    // unscaled recovery misses Fix J_A
  std::pair<double, double> witness;   // (x, y) from the unscaled cycle
  double unscaled_recovery;            // lambda1 x + lambda2 y
  double fix_value;                    // true Fix J_A representative
  double alt_fix_value;                // Fix(l1 Prox_{l2 f1} + l2 Prox_{l1 f2})
  bool alternative_matches;            // alt_fix agrees with the recovery
};

// Demonstrates that composing the UNSCALED proximal mappings does not recover
// Fix of the averaged map (except at lambda = 1/2 in symmetric cases), while
// reweighting the functions as lambda2 f1, lambda1 f2 makes the recovery
// exact again.
CounterexampleResult counterexample_unscaled(const ConvexFunction& f1,
                                             const ConvexFunction& f2,
                                             const Weights& w,
                                             const StoppingRule& rule);

}  // namespace resavg

#endif  // RESAVG_GEOMETRY_HPP
