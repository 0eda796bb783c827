#include "resavg/solvers.hpp"

namespace resavg {

void StoppingRule::validate() const {
  if (!(step_tol > 0.0) || !(residual_tol > 0.0) || !(divergence_norm > 0.0)) {
    throw std::invalid_argument("StoppingRule: tolerances must be positive");
  }
  if (max_iters < 1 || trace_stride < 1) {
    throw std::invalid_argument("StoppingRule: max_iters and trace_stride must be >= 1");
  }
}

const char* to_string(IterStatus s) {
  switch (s) {
    case IterStatus::Converged: return "converged";
    case IterStatus::MaxIters: return "max_iters";
    case IterStatus::Diverged: return "diverged";
  }
  return "unknown";
}

bool detect_divergence(const Point& x, const StoppingRule& rule) {
  return x.norm() >= rule.divergence_norm;
}

IterationTrace iterate_fixed_point(const std::function<Point(const Point&)>& T,
                                   const Point& x0, const StoppingRule& rule) {
  rule.validate();
  require_finite(x0, "iterate_fixed_point x0");

  IterationTrace tr;
  tr.iterates.push_back(x0);
  Point x = x0;

  if (detect_divergence(x, rule)) {
    tr.status = IterStatus::Diverged;
    tr.final = x;
    return tr;
  }

  for (int n = 1; n <= rule.max_iters; ++n) {
    Point next = T(x);
    double step = (next - x).norm();
    tr.step_norms.push_back(step);
    x = std::move(next);
    tr.iterations_used = n;
    if (n % rule.trace_stride == 0) tr.iterates.push_back(x);

    if (detect_divergence(x, rule)) {
      tr.status = IterStatus::Diverged;
      break;
    }
    if (step <= rule.step_tol) {
      tr.status = IterStatus::Converged;
      break;
    }
    if (n == rule.max_iters) tr.status = IterStatus::MaxIters;
  }

  tr.final = x;
  if (tr.iterates.back() != x) tr.iterates.push_back(x);
  return tr;
}

IterationTrace run_proximal_point(const ResolventAverage& ra, const Point& x0,
                                  const StoppingRule& rule) {
  require_dim(x0, ra.a1.dim(), "run_proximal_point x0");
  return iterate_fixed_point([&](const Point& x) { return average_map(ra, x); }, x0,
                             rule);
}

AlternatingResult run_alternating(const MonotoneOperator& a1,
                                  const MonotoneOperator& a2, const Weights& w,
                                  const Point& x0, const StoppingRule& rule) {
  rule.validate();
  if (a1.dim() != a2.dim()) {
    throw std::invalid_argument("run_alternating: operators must share dimension");
  }
  require_dim(x0, a1.dim(), "run_alternating x0");

  MonotoneOperator s1 = a1.scaled(w.lambda2);
  MonotoneOperator s2 = a2.scaled(w.lambda1);

  AlternatingResult res{IterationTrace{}, IterationTrace{}, Point{}};
  IterationTrace& tx = res.trace_x;
  IterationTrace& ty = res.trace_y;

  Point x = x0;
  Point y = resolvent(s2, 1.0, x);  // y-update precedes the x-update
  tx.iterates.push_back(x);
  ty.iterates.push_back(y);

  IterStatus status = IterStatus::MaxIters;
  if (detect_divergence(x, rule) || detect_divergence(y, rule)) {
    status = IterStatus::Diverged;
  }
  int used = 0;
  for (int n = 1; status != IterStatus::Diverged && n <= rule.max_iters; ++n) {
    Point x_next = resolvent(s1, 1.0, y);
    Point y_next = resolvent(s2, 1.0, x_next);
    double sx = (x_next - x).norm();
    double sy = (y_next - y).norm();
    tx.step_norms.push_back(sx);
    ty.step_norms.push_back(sy);
    x = std::move(x_next);
    y = std::move(y_next);
    used = n;
    if (n % rule.trace_stride == 0) {
      tx.iterates.push_back(x);
      ty.iterates.push_back(y);
    }

    if (detect_divergence(x, rule) || detect_divergence(y, rule)) {
      status = IterStatus::Diverged;
      break;
    }
    if (std::max(sx, sy) <= rule.step_tol) {
      status = IterStatus::Converged;
      break;
    }
  }

  tx.status = ty.status = status;
  tx.iterations_used = ty.iterations_used = used;
  tx.final = x;
  ty.final = y;
  if (tx.iterates.back() != x) tx.iterates.push_back(x);
  if (ty.iterates.back() != y) ty.iterates.push_back(y);
  res.averaged_limit = w.lambda1 * x + w.lambda2 * y;
  return res;
}

CompositionResult run_composition(const MonotoneOperator& a1,
                                  const MonotoneOperator& a2, const Weights& w,
                                  CompositionOrder order, const Point& x0,
                                  const StoppingRule& rule) {
  if (a1.dim() != a2.dim()) {
    throw std::invalid_argument("run_composition: operators must share dimension");
  }
  require_dim(x0, a1.dim(), "run_composition x0");

  // Scale once; the loop then only pays for resolvent evaluations.
  MonotoneOperator s1 = a1.scaled(w.lambda2);
  MonotoneOperator s2 = a2.scaled(w.lambda1);
  CompositionResult res{iterate_fixed_point(
                            [&](const Point& x) {
                              return order == CompositionOrder::EF
                                         ? resolvent(s1, 1.0, resolvent(s2, 1.0, x))
                                         : resolvent(s2, 1.0, resolvent(s1, 1.0, x));
                            },
                            x0, rule),
                        Point{}};

  const Point& limit = res.trace.final;
  if (order == CompositionOrder::EF) {
    res.recovered_fix =
        w.lambda1 * limit + w.lambda2 * resolvent(s2, 1.0, limit);
  } else {
    res.recovered_fix =
        w.lambda1 * resolvent(s1, 1.0, limit) + w.lambda2 * limit;
  }
  return res;
}

}  // namespace resavg
