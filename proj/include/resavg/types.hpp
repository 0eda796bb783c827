#ifndef RESAVG_TYPES_HPP
#define RESAVG_TYPES_HPP

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace resavg {

// Points of the ambient space R^n and dense matrices acting on it.
using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Configuration constants shared across the library. All tolerances used by
// membership tests and structural validation live here rather than being
// scattered as literals.
namespace tol {
// Absolute tolerance for indicator membership tests. Projections computed in
// double precision land within ~1e-12 of set boundaries.
inline constexpr double membership = 1e-9;
// Slack allowed when validating positive semidefiniteness.
inline constexpr double psd = 1e-10;
// Orthonormality of affine-set basis columns.
inline constexpr double orthonormal = 1e-12;
// Feasibility of a dual vector w.r.t. a cone/range constraint inside
// conjugate evaluations.
inline constexpr double cone = 1e-9;
// Default identity tolerance for geometry reports, scaled by (1 + |fix|).
inline constexpr double identity = 1e-8;
}  // namespace tol

// Extended real value: a finite real or +infinity. Values of proper convex
// functions never reach -infinity, and NaN is rejected outright.
class ExtReal {
 public:
  ExtReal() = default;
  ExtReal(double v) : v_(v) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw std::invalid_argument("ExtReal: value must be finite or +infinity");
    }
  }

  static ExtReal infinity() {
    ExtReal r;
    r.v_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool finite() const { return std::isfinite(v_); }
  double value() const { return v_; }

  ExtReal operator+(const ExtReal& o) const {
    if (!finite() || !o.finite()) return infinity();
    return ExtReal(v_ + o.v_);
  }

  friend bool operator<(const ExtReal& a, const ExtReal& b) { return a.v_ < b.v_; }
  friend bool operator==(const ExtReal& a, const ExtReal& b) { return a.v_ == b.v_; }

 private:
  double v_ = 0.0;
};

// Throws unless every entry of x is finite.
inline void require_finite(const Point& x, const char* what) {
  if (!x.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": entries must be finite");
  }
}

inline void require_dim(const Point& x, Eigen::Index n, const char* what) {
  if (x.size() != n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (got " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(n) + ")");
  }
}

}  // namespace resavg

#endif  // RESAVG_TYPES_HPP
