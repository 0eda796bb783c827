#include "resavg/monotone_operator.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace resavg {

MonotoneOperator::MonotoneOperator(Rep rep) : rep_(std::move(rep)) {
  dim_ = std::visit(
      [](const auto& r) -> Eigen::Index {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConvexFunction>) {
          return r.dim();
        } else {
          return r.M.rows();
        }
      },
      rep_);
}

MonotoneOperator MonotoneOperator::subdifferential(ConvexFunction f) {
  return MonotoneOperator(Rep(std::move(f)));
}

MonotoneOperator MonotoneOperator::affine(Matrix M, Point b) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument("MonotoneOperator: M must be square");
  }
  require_dim(b, M.rows(), "MonotoneOperator b");
  require_finite(b, "MonotoneOperator b");
  if (!M.allFinite()) {
    throw std::invalid_argument("MonotoneOperator: M must be finite");
  }
  Matrix sym = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  double scale = 1.0 + M.cwiseAbs().maxCoeff();
  if (es.eigenvalues().minCoeff() < -tol::psd * scale) {
    throw std::invalid_argument(
        "MonotoneOperator: symmetric part of M must be positive semidefinite");
  }
  return MonotoneOperator(Rep(Affine{std::move(M), std::move(b)}));
}

bool MonotoneOperator::is_subdifferential() const {
  return std::holds_alternative<ConvexFunction>(rep_);
}

const ConvexFunction& MonotoneOperator::function() const {
  if (!is_subdifferential()) {
    throw std::logic_error("MonotoneOperator: not a subdifferential");
  }
  return std::get<ConvexFunction>(rep_);
}

MonotoneOperator MonotoneOperator::scaled(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("MonotoneOperator::scaled: lambda must be positive");
  }
  if (is_subdifferential()) {
    return subdifferential(function().scaled_by_divisor(lambda));
  }
  const Affine& a = std::get<Affine>(rep_);
  return MonotoneOperator(Rep(Affine{a.M / lambda, a.b / lambda}));
}

Point resolvent(const MonotoneOperator& A, double gamma, const Point& x) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("resolvent: gamma must be positive");
  }
  require_dim(x, A.dim(), "resolvent");
  if (A.is_subdifferential()) {
    return prox(A.function(), gamma, x);
  }
  require_finite(x, "resolvent");
  const auto* a = A.affine_part();
  // (I + gamma M) is invertible since sym(M) >= 0.
  Matrix lhs = Matrix::Identity(A.dim(), A.dim()) + gamma * a->M;
  Eigen::PartialPivLU<Matrix> lu(lhs);
  Point y = lu.solve(x - gamma * a->b);
  if (!y.allFinite() ||
      (lhs * y - (x - gamma * a->b)).norm() > 1e-8 * (1.0 + x.norm())) {
    throw std::runtime_error(
        "resolvent: linear solve failed; M is not monotone within tolerance");
  }
  return y;
}

Point yosida(const MonotoneOperator& A, double gamma, const Point& x) {
  return (x - resolvent(A, gamma, x)) / gamma;
}

ResolventAverage::ResolventAverage(MonotoneOperator a1_, MonotoneOperator a2_,
                                   Weights w_, double gamma_)
    : a1(std::move(a1_)), a2(std::move(a2_)), w(w_), gamma(gamma_) {
  if (a1.dim() != a2.dim()) {
    throw std::invalid_argument("ResolventAverage: operators must share dimension");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("ResolventAverage: gamma must be positive");
  }
}

Point average_map(const ResolventAverage& ra, const Point& x) {
  return ra.w.lambda1 * resolvent(ra.a1, ra.gamma, x) +
         ra.w.lambda2 * resolvent(ra.a2, ra.gamma, x);
}

Point yosida_average_residual(const ResolventAverage& ra, const Point& z) {
  return ra.w.lambda1 * yosida(ra.a1, ra.gamma, z) +
         ra.w.lambda2 * yosida(ra.a2, ra.gamma, z);
}

Point composition_map(const MonotoneOperator& a1, const MonotoneOperator& a2,
                      const Weights& w, CompositionOrder order, const Point& x) {
  if (a1.dim() != a2.dim()) {
    throw std::invalid_argument("composition_map: operators must share dimension");
  }
  MonotoneOperator s1 = a1.scaled(w.lambda2);
  MonotoneOperator s2 = a2.scaled(w.lambda1);
  if (order == CompositionOrder::EF) {
    return resolvent(s1, 1.0, resolvent(s2, 1.0, x));
  }
  return resolvent(s2, 1.0, resolvent(s1, 1.0, x));
}

}  // namespace resavg
