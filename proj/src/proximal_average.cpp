#include "resavg/proximal_average.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace resavg {

ProxAverageError::ProxAverageError(double best, double improvement)
    : std::runtime_error("proximal_average_value: inner minimizer did not "
                         "converge (best value " +
                         std::to_string(best) + ", last improvement " +
                         std::to_string(improvement) + ")"),
      best_value(best),
      last_improvement(improvement) {}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimizes a convex scalar function along one coordinate. The bracket is
// grown from the current point until both ends dominate it (convexity makes
// that a valid enclosure), then shrunk by golden-section steps.
double golden_min(const std::function<double(double)>& h, double t0, double h0) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);

  double step = 1.0;
  double lo = t0 - step;
  while (h(lo) < h0 && step < 1e9) {
    step *= 2.0;
    lo = t0 - step;
  }
  step = 1.0;
  double hi = t0 + step;
  while (h(hi) < h0 && step < 1e9) {
    step *= 2.0;
    hi = t0 + step;
  }

  double c = hi - phi * (hi - lo);
  double d = lo + phi * (hi - lo);
  double hc = h(c), hd = h(d);
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
       ++it) {
    if (hc <= hd) {
      hi = d;
      d = c;
      hd = hc;
      c = hi - phi * (hi - lo);
      hc = h(c);
    } else {
      lo = c;
      c = d;
      hc = hd;
      d = lo + phi * (hi - lo);
      hd = h(d);
    }
  }
  double best = 0.5 * (lo + hi);
  // Keep the incumbent when the search gained nothing (flat or inf plateaus).
  return (h(best) <= h0) ? best : t0;
}

double objective(const ConvexFunction& f1, const ConvexFunction& f2,
                 const Weights& w, double gamma, const Point& z, const Point& x) {
  Point y = (z - w.lambda1 * x) / w.lambda2;
  ExtReal v1 = eval(f1, x);
  if (!v1.finite()) return kInf;
  ExtReal v2 = eval(f2, y);
  if (!v2.finite()) return kInf;
  return w.lambda1 * v1.value() + w.lambda2 * v2.value() +
         w.lambda1 * w.lambda2 / (2.0 * gamma) * (x - y).squaredNorm();
}

// Candidate splitting points z = lambda1 x + lambda2 y; for indicator
// operands the alternating loop below searches for a feasible pair.
std::vector<Point> feasible_starts(const ConvexFunction& f1, const ConvexFunction& f2,
                                   const Weights& w, double gamma, const Point& z) {
  std::vector<Point> starts;
  starts.push_back(z);
  starts.push_back(prox(f1, gamma, z));
  starts.push_back((z - w.lambda2 * prox(f2, gamma, z)) / w.lambda1);

  if (f1.is_indicator() && f2.is_indicator()) {
    Point x = prox(f1, 1.0, z);
    for (int i = 0; i < 100; ++i) {
      Point y = prox(f2, 1.0, (z - w.lambda1 * x) / w.lambda2);
      x = prox(f1, 1.0, (z - w.lambda2 * y) / w.lambda1);
    }
    starts.push_back(x);
  }
  return starts;
}

double exact_quadratic_value(const Quadratic& q1, const Quadratic& q2,
                             const ConvexFunction& f1, const ConvexFunction& f2,
                             const Weights& w, double gamma, const Point& z) {
  // Stationarity of the objective in x (with y eliminated) gives
  // [Q1 + (l1/l2) Q2 + I/(gamma l2)] x = -q1 + q2 + Q2 z / l2 + z/(gamma l2).
  const double l1 = w.lambda1, l2 = w.lambda2;
  Matrix lhs = q1.Q + (l1 / l2) * q2.Q +
               Matrix::Identity(z.size(), z.size()) / (gamma * l2);
  Point rhs = -q1.q + q2.q + q2.Q * z / l2 + z / (gamma * l2);
  Point x = lhs.ldlt().solve(rhs);
  return objective(f1, f2, w, gamma, z, x);
}

}  // namespace

double proximal_average_value(const ConvexFunction& f1, const ConvexFunction& f2,
                              const Weights& w, double gamma, const Point& z,
                              const ProxAvgOptions& opts) {
  if (f1.divisor() != 1.0 || f2.divisor() != 1.0) {
    throw std::invalid_argument("proximal_average_value: divisors must be 1");
  }
  if (f1.dim() != f2.dim()) {
    throw std::invalid_argument("proximal_average_value: dimension mismatch");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::invalid_argument("proximal_average_value: gamma must be positive");
  }
  require_dim(z, f1.dim(), "proximal_average_value");

  const auto* q1 = std::get_if<Quadratic>(&f1.variant());
  const auto* q2 = std::get_if<Quadratic>(&f2.variant());
  if (q1 && q2 && !opts.force_numeric) {
    return exact_quadratic_value(*q1, *q2, f1, f2, w, gamma, z);
  }

  Point x;
  double best = kInf;
  for (const Point& s : feasible_starts(f1, f2, w, gamma, z)) {
    double v = objective(f1, f2, w, gamma, z, s);
    if (v < best) {
      best = v;
      x = s;
    }
  }
  if (!std::isfinite(best)) return kInf;

  double improvement = kInf;
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    double before = best;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      auto slice = [&](double t) {
        Point xt = x;
        xt[i] = t;
        return objective(f1, f2, w, gamma, z, xt);
      };
      x[i] = golden_min(slice, x[i], best);
      best = objective(f1, f2, w, gamma, z, x);
    }
    improvement = before - best;
    if (improvement <= opts.value_tol) return best;
  }
  throw ProxAverageError(best, improvement);
}

}  // namespace resavg
