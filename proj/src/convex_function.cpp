#include "resavg/convex_function.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace resavg {

namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

// Eigenvalues below this (relative) cutoff are treated as zero when forming
// the pseudo-inverse of Q.
double rank_cutoff(const Point& eigvals) {
  double lmax = eigvals.size() ? eigvals.maxCoeff() : 0.0;
  return 1e-12 * (1.0 + std::abs(lmax));
}

}  // namespace

ConvexFunction::ConvexFunction(Variant v, double divisor)
    : variant_(std::move(v)), divisor_(divisor) {
  if (!(divisor_ > 0.0) || !std::isfinite(divisor_)) {
    throw std::invalid_argument("ConvexFunction: divisor must be positive");
  }

  std::visit(
      [this](auto& var) {
        using T = std::decay_t<decltype(var)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          if (var.Q.rows() != var.Q.cols()) {
            throw std::invalid_argument("Quadratic: Q must be square");
          }
          require_dim(var.q, var.Q.rows(), "Quadratic q");
          if (!var.Q.allFinite() || !std::isfinite(var.c)) {
            throw std::invalid_argument("Quadratic: entries must be finite");
          }
          require_finite(var.q, "Quadratic q");
          double scale = 1.0 + var.Q.cwiseAbs().maxCoeff();
          if ((var.Q - var.Q.transpose()).cwiseAbs().maxCoeff() > tol::psd * scale) {
            throw std::invalid_argument("Quadratic: Q must be symmetric");
          }
          Matrix sym = 0.5 * (var.Q + var.Q.transpose());
          Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
          if (es.eigenvalues().minCoeff() < -tol::psd * scale) {
            throw std::invalid_argument("Quadratic: Q must be positive semidefinite");
          }
          var.eigvecs = es.eigenvectors();
          var.eigvals = es.eigenvalues().cwiseMax(0.0);
          dim_ = var.Q.rows();
        } else if constexpr (std::is_same_v<T, AbsSum>) {
          require_finite(var.weights, "AbsSum weights");
          if (var.weights.size() == 0 || var.weights.minCoeff() <= 0.0) {
            throw std::invalid_argument("AbsSum: weights must be positive");
          }
          dim_ = var.weights.size();
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          require_finite(var.lo, "IndicatorBox lo");
          require_dim(var.hi, var.lo.size(), "IndicatorBox hi");
          require_finite(var.hi, "IndicatorBox hi");
          if (((var.hi - var.lo).array() < 0.0).any()) {
            throw std::invalid_argument("IndicatorBox: requires lo <= hi");
          }
          dim_ = var.lo.size();
        } else if constexpr (std::is_same_v<T, IndicatorBall>) {
          require_finite(var.center, "IndicatorBall center");
          if (!(var.radius > 0.0) || !std::isfinite(var.radius)) {
            throw std::invalid_argument("IndicatorBall: radius must be positive");
          }
          dim_ = var.center.size();
        } else if constexpr (std::is_same_v<T, IndicatorHalfspace>) {
          require_finite(var.normal, "IndicatorHalfspace normal");
          if (!std::isfinite(var.offset)) {
            throw std::invalid_argument("IndicatorHalfspace: offset must be finite");
          }
          if (var.normal.norm() == 0.0) {
            throw std::invalid_argument("IndicatorHalfspace: normal must be nonzero");
          }
          dim_ = var.normal.size();
        } else if constexpr (std::is_same_v<T, IndicatorAffine>) {
          require_finite(var.anchor, "IndicatorAffine anchor");
          if (!var.basis.allFinite()) {
            throw std::invalid_argument("IndicatorAffine: basis must be finite");
          }
          if (var.basis.rows() != var.anchor.size() || var.basis.cols() < 1 ||
              var.basis.cols() > var.basis.rows()) {
            throw std::invalid_argument("IndicatorAffine: basis shape invalid");
          }
          Matrix gram = var.basis.transpose() * var.basis;
          gram -= Matrix::Identity(var.basis.cols(), var.basis.cols());
          if (gram.cwiseAbs().maxCoeff() > tol::orthonormal) {
            throw std::invalid_argument(
                "IndicatorAffine: basis columns must be orthonormal");
          }
          dim_ = var.anchor.size();
        } else if constexpr (std::is_same_v<T, IndicatorPoint>) {
          require_finite(var.p, "IndicatorPoint p");
          dim_ = var.p.size();
        }
      },
      variant_);

  if (dim_ < 1) {
    throw std::invalid_argument("ConvexFunction: dimension must be >= 1");
  }
}

bool ConvexFunction::is_indicator() const {
  return !std::holds_alternative<Quadratic>(variant_) &&
         !std::holds_alternative<AbsSum>(variant_);
}

ConvexFunction ConvexFunction::scaled_by_divisor(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("scaled_by_divisor: lambda must be positive");
  }
  return ConvexFunction(variant_, divisor_ * lambda);
}

const char* ConvexFunction::variant_name() const {
  return std::visit(
      [](const auto& var) {
        using T = std::decay_t<decltype(var)>;
        if constexpr (std::is_same_v<T, Quadratic>) return "quadratic";
        if constexpr (std::is_same_v<T, AbsSum>) return "abs_sum";
        if constexpr (std::is_same_v<T, IndicatorBox>) return "box";
        if constexpr (std::is_same_v<T, IndicatorBall>) return "ball";
        if constexpr (std::is_same_v<T, IndicatorHalfspace>) return "halfspace";
        if constexpr (std::is_same_v<T, IndicatorAffine>) return "affine_set";
        if constexpr (std::is_same_v<T, IndicatorPoint>) return "point";
      },
      variant_);
}

ExtReal eval(const ConvexFunction& f, const Point& x) {
  require_dim(x, f.dim(), "eval");
  require_finite(x, "eval");
  const double d = f.divisor();

  return std::visit(
      [&](const auto& var) -> ExtReal {
        using T = std::decay_t<decltype(var)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return ExtReal((0.5 * x.dot(var.Q * x) + var.q.dot(x) + var.c) / d);
        } else if constexpr (std::is_same_v<T, AbsSum>) {
          return ExtReal(var.weights.dot(x.cwiseAbs()) / d);
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          bool in = ((x - var.lo).array() >= -tol::membership).all() &&
                    ((var.hi - x).array() >= -tol::membership).all();
          return in ? ExtReal(0.0) : ExtReal::infinity();
        } else if constexpr (std::is_same_v<T, IndicatorBall>) {
          bool in = (x - var.center).norm() <= var.radius + tol::membership;
          return in ? ExtReal(0.0) : ExtReal::infinity();
        } else if constexpr (std::is_same_v<T, IndicatorHalfspace>) {
          bool in = var.normal.dot(x) <= var.offset + tol::membership;
          return in ? ExtReal(0.0) : ExtReal::infinity();
        } else if constexpr (std::is_same_v<T, IndicatorAffine>) {
          Point r = x - var.anchor;
          bool in = (r - var.basis * (var.basis.transpose() * r)).norm() <=
                    tol::membership;
          return in ? ExtReal(0.0) : ExtReal::infinity();
        } else if constexpr (std::is_same_v<T, IndicatorPoint>) {
          bool in = (x - var.p).norm() <= tol::membership;
          return in ? ExtReal(0.0) : ExtReal::infinity();
        }
      },
      f.variant());
}

Point prox(const ConvexFunction& f, double gamma, const Point& x) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("prox: gamma must be positive");
  }
  require_dim(x, f.dim(), "prox");
  require_finite(x, "prox");
  // Effective parameter of prox_{f/d}(x) in terms of the undivided f.
  const double g = gamma / f.divisor();

  return std::visit(
      [&](const auto& var) -> Point {
        using T = std::decay_t<decltype(var)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          // (I + g Q)^{-1} (x - g q) through the cached eigendecomposition.
          Point w = var.eigvecs.transpose() * (x - g * var.q);
          w.array() /= (1.0 + g * var.eigvals.array());
          return var.eigvecs * w;
        } else if constexpr (std::is_same_v<T, AbsSum>) {
          Point y(x.size());
          for (Eigen::Index i = 0; i < x.size(); ++i) {
            y[i] = soft_threshold(x[i], g * var.weights[i]);
          }
          return y;
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          return x.cwiseMax(var.lo).cwiseMin(var.hi);
        } else if constexpr (std::is_same_v<T, IndicatorBall>) {
          Point u = x - var.center;
          double n = u.norm();
          if (n <= var.radius) return x;
          return var.center + (var.radius / n) * u;
        } else if constexpr (std::is_same_v<T, IndicatorHalfspace>) {
          double excess = var.normal.dot(x) - var.offset;
          if (excess <= 0.0) return x;
          return x - (excess / var.normal.squaredNorm()) * var.normal;
        } else if constexpr (std::is_same_v<T, IndicatorAffine>) {
          Point r = x - var.anchor;
          return var.anchor + var.basis * (var.basis.transpose() * r);
        } else if constexpr (std::is_same_v<T, IndicatorPoint>) {
          return var.p;
        }
      },
      f.variant());
}

ExtReal conjugate_eval(const ConvexFunction& f, const Point& phi) {
  require_dim(phi, f.dim(), "conjugate_eval");
  require_finite(phi, "conjugate_eval");
  const double d = f.divisor();
  const Point psi = d * phi;  // (f/d)*(phi) = f*(d phi)/d

  return std::visit(
      [&](const auto& var) -> ExtReal {
        using T = std::decay_t<decltype(var)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          // f*(psi) = 1/2 <w, Q^+ w> - c on psi - q in range(Q), +inf off it.
          Point w = var.eigvecs.transpose() * (psi - var.q);
          double cutoff = rank_cutoff(var.eigvals);
          double val = 0.0;
          double off_range_sq = 0.0;
          for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (var.eigvals[i] > cutoff) {
              val += w[i] * w[i] / var.eigvals[i];
            } else {
              off_range_sq += w[i] * w[i];
            }
          }
          if (std::sqrt(off_range_sq) > tol::cone * (1.0 + (psi - var.q).norm())) {
            return ExtReal::infinity();
          }
          return ExtReal((0.5 * val - var.c) / d);
        } else if constexpr (std::is_same_v<T, AbsSum>) {
          // Indicator of the box {|psi_i| <= w_i}.
          bool in = (psi.cwiseAbs() - var.weights).maxCoeff() <= tol::membership;
          return in ? ExtReal(0.0) : ExtReal::infinity();
        } else if constexpr (std::is_same_v<T, IndicatorBox>) {
          double s = 0.0;
          for (Eigen::Index i = 0; i < psi.size(); ++i) {
            s += std::max(psi[i] * var.lo[i], psi[i] * var.hi[i]);
          }
          return ExtReal(s / d);
        } else if constexpr (std::is_same_v<T, IndicatorBall>) {
          return ExtReal((psi.dot(var.center) + var.radius * psi.norm()) / d);
        } else if constexpr (std::is_same_v<T, IndicatorHalfspace>) {
          // Support is finite only on the ray {t * normal, t >= 0}.
          double t = psi.dot(var.normal) / var.normal.squaredNorm();
          if (t < -tol::cone ||
              (psi - t * var.normal).norm() > tol::cone * (1.0 + psi.norm())) {
            return ExtReal::infinity();
          }
          return ExtReal(std::max(t, 0.0) * var.offset / d);
        } else if constexpr (std::is_same_v<T, IndicatorAffine>) {
          // Finite only on the orthogonal complement of the direction space.
          if ((var.basis.transpose() * psi).norm() > tol::cone * (1.0 + psi.norm())) {
            return ExtReal::infinity();
          }
          return ExtReal(psi.dot(var.anchor) / d);
        } else if constexpr (std::is_same_v<T, IndicatorPoint>) {
          return ExtReal(psi.dot(var.p) / d);
        }
      },
      f.variant());
}

MoreauResult moreau(const ConvexFunction& f, double gamma, const Point& x) {
  Point p = prox(f, gamma, x);
  ExtReal fp = eval(f, p);
  MoreauResult r;
  r.value = fp.value() + (x - p).squaredNorm() / (2.0 * gamma);
  r.gradient = (x - p) / gamma;
  return r;
}

}  // namespace resavg
