#ifndef RESAVG_MONOTONE_OPERATOR_HPP
#define RESAVG_MONOTONE_OPERATOR_HPP

#include <variant>

#include "resavg/convex_function.hpp"
#include "resavg/types.hpp"

namespace resavg {

// Maximal monotone operators of the two shapes the library handles: the
// subdifferential of a catalog function, or the monotone affine map
// x |-> Mx + b with M + M^T positive semidefinite.
class MonotoneOperator {
 public:
  static MonotoneOperator subdifferential(ConvexFunction f);
  // Validates monotonicity (symmetric part of M PSD within tol::psd).
  static MonotoneOperator affine(Matrix M, Point b);

  Eigen::Index dim() const { return dim_; }
  bool is_subdifferential() const;
  // Only valid for subdifferential operators.
  const ConvexFunction& function() const;

  // The scaled operator A/lambda, lambda > 0. Subdifferentials fold lambda
  // into the function divisor; affine maps scale M and b.
  MonotoneOperator scaled(double lambda) const;

  struct Affine {
    Matrix M;
    Point b;
  };
  const Affine* affine_part() const { return std::get_if<Affine>(&rep_); }

 private:
  using Rep = std::variant<ConvexFunction, Affine>;
  explicit MonotoneOperator(Rep rep);
  Rep rep_;
  Eigen::Index dim_ = 0;
};

// J_{gamma A}(x) = (Id + gamma A)^{-1}(x). Subdifferentials go through the
// catalog prox; affine operators solve (I + gamma M) y = x - gamma b.
Point resolvent(const MonotoneOperator& A, double gamma, const Point& x);

// Yosida approximation of index gamma: (x - J_{gamma A}(x)) / gamma.
Point yosida(const MonotoneOperator& A, double gamma, const Point& x);

// Convex weights lambda1 + lambda2 = 1, each in (0,1). lambda2 is derived as
// 1 - lambda1 so the sum is exact.
struct Weights {
  double lambda1;
  double lambda2;

  explicit Weights(double l1) : lambda1(l1), lambda2(1.0 - l1) {
    if (!std::isfinite(l1) || l1 < 1e-6 || l1 > 1.0 - 1e-6) {
      throw std::invalid_argument("Weights: lambda1 must lie in [1e-6, 1-1e-6]");
    }
  }
};

// The averaged-resolvent problem instance: J = lambda1 J_{gamma A1} +
// lambda2 J_{gamma A2}, itself the resolvent of the resolvent average.
struct ResolventAverage {
  MonotoneOperator a1;
  MonotoneOperator a2;
  Weights w;
  double gamma = 1.0;

  ResolventAverage(MonotoneOperator a1_, MonotoneOperator a2_, Weights w_,
                   double gamma_ = 1.0);
};

// lambda1 J_{gamma A1}(x) + lambda2 J_{gamma A2}(x).
Point average_map(const ResolventAverage& ra, const Point& x);

// lambda1 yosida(A1, gamma, z) + lambda2 yosida(A2, gamma, z); vanishes
// exactly on Fix of the average map (equals (z - average_map(z))/gamma).
Point yosida_average_residual(const ResolventAverage& ra, const Point& z);

enum class CompositionOrder { EF, FE };

// EF: J_{A1/lambda2}(J_{A2/lambda1}(x));  FE: the reverse order.
Point composition_map(const MonotoneOperator& a1, const MonotoneOperator& a2,
                      const Weights& w, CompositionOrder order, const Point& x);

}  // namespace resavg

#endif  // RESAVG_MONOTONE_OPERATOR_HPP
