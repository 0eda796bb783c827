#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "oracles.hpp"
#include "resavg/solvers.hpp"

#include <random>

using namespace resavg;

namespace {

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

Matrix mat1(double a) {
  Matrix m(1, 1);
  m(0, 0) = a;
  return m;
}

MonotoneOperator op(ConvexFunction f) {
  return MonotoneOperator::subdifferential(std::move(f));
}

MonotoneOperator square_op() {
  return op(ConvexFunction(Quadratic{mat1(2.0), vec({0.0}), 0.0}));
}

MonotoneOperator shifted_square_op() {
  return op(ConvexFunction(Quadratic{mat1(2.0), vec({-2.0}), 1.0}));
}

MonotoneOperator abs_op() { return op(ConvexFunction(AbsSum{vec({1.0})})); }

MonotoneOperator disk_op() {
  return op(ConvexFunction(IndicatorBall{vec({0.0, 2.0}), 1.0}));
}

MonotoneOperator line_op() {
  Matrix B(2, 1);
  B << 1.0, 0.0;
  return op(ConvexFunction(IndicatorAffine{vec({0.0, 0.0}), B}));
}

}  // namespace

TEST_CASE("proximal point drives the averaged map to its fixed point") {
  StoppingRule rule;

  // Quadratic pair: Fix = {lambda2}.
  Weights w(0.25);
  ResolventAverage ra(square_op(), shifted_square_op(), w);
  IterationTrace tr = run_proximal_point(ra, vec({10.0}), rule);
  CHECK(tr.status == IterStatus::Converged);
  CHECK(std::abs(tr.final[0] - 0.75) <= 1e-8);
  Point res = yosida_average_residual(ra, tr.final);
  CHECK(res.norm() <= rule.residual_tol * (1.0 + tr.final.norm()));

  // Disk and line: Fix = {(0, lambda1)}.
  ResolventAverage proj(disk_op(), line_op(), Weights(0.5));
  IterationTrace tp = run_proximal_point(proj, vec({3.0, -2.0}), rule);
  CHECK(tp.status == IterStatus::Converged);
  CHECK((tp.final - vec({0.0, 0.5})).norm() <= 1e-7);

  // Both operators project onto the same singleton: one step.
  MonotoneOperator pt = op(ConvexFunction(IndicatorPoint{vec({2.0, -1.0})}));
  ResolventAverage single(pt, pt, Weights(0.3));
  IterationTrace ts = run_proximal_point(single, vec({9.0, 9.0}), rule);
  CHECK(ts.status == IterStatus::Converged);
  CHECK(ts.iterations_used <= 2);
  CHECK((ts.final - vec({2.0, -1.0})).norm() == doctest::Approx(0.0));
}

TEST_CASE("alternating resolvents land on the S pair") {
  StoppingRule rule;

  Weights w(0.25);
  AlternatingResult alt =
      run_alternating(square_op(), shifted_square_op(), w, vec({5.0}), rule);
  CHECK(alt.trace_x.status == IterStatus::Converged);
  CHECK(std::abs(alt.trace_x.final[0] - 0.25) <= 1e-8);
  CHECK(std::abs(alt.trace_y.final[0] - 11.0 / 12.0) <= 1e-8);
  CHECK(std::abs(alt.averaged_limit[0] - 0.75) <= 1e-8);

  // The averaged limit sits in Fix of the averaged map (residual check).
  ResolventAverage ra(square_op(), shifted_square_op(), w);
  CHECK(yosida_average_residual(ra, alt.averaged_limit).norm() <=
        rule.residual_tol * (1.0 + alt.averaged_limit.norm()));

  AlternatingResult ap =
      run_alternating(disk_op(), line_op(), Weights(0.5), vec({5.0, 7.0}), rule);
  CHECK((ap.trace_x.final - vec({0.0, 1.0})).norm() <= 1e-7);
  CHECK((ap.trace_y.final - vec({0.0, 0.0})).norm() <= 1e-7);
  CHECK((ap.averaged_limit - vec({0.0, 0.5})).norm() <= 1e-7);
  ResolventAverage rp(disk_op(), line_op(), Weights(0.5));
  CHECK(yosida_average_residual(rp, ap.averaged_limit).norm() <=
        rule.residual_tol * (1.0 + ap.averaged_limit.norm()));

  // Consistent case: both limits land on a common point of the intersection.
  MonotoneOperator b1 =
      op(ConvexFunction(IndicatorBox{vec({-1.0, -1.0}), vec({1.0, 1.0})}));
  MonotoneOperator b2 =
      op(ConvexFunction(IndicatorBox{vec({0.0, 0.0}), vec({2.0, 2.0})}));
  AlternatingResult ac = run_alternating(b1, b2, Weights(0.6), vec({4.0, -3.0}), rule);
  CHECK((ac.trace_x.final - ac.trace_y.final).norm() <= 1e-9);
  CHECK((ac.averaged_limit - ac.trace_x.final).norm() <= 1e-9);
  Point q = ac.trace_x.final;
  CHECK(eval(b1.function(), q).finite());
  CHECK(eval(b2.function(), q).finite());
}

TEST_CASE("composition iterations recover the averaged fixed point") {
  StoppingRule rule;

  // |x| with (x-1)^2 at lambda1 = 0.5.
  Weights w(0.5);
  CompositionResult ef = run_composition(abs_op(), shifted_square_op(), w,
                                         CompositionOrder::EF, vec({7.0}), rule);
  CHECK(ef.trace.status == IterStatus::Converged);
  CHECK(std::abs(ef.trace.final[0] - 0.0) <= 1e-9);
  CHECK(std::abs(ef.recovered_fix[0] - 0.4) <= 1e-8);

  CompositionResult fe = run_composition(abs_op(), shifted_square_op(), w,
                                         CompositionOrder::FE, vec({7.0}), rule);
  CHECK(std::abs(fe.trace.final[0] - 0.8) <= 1e-8);
  CHECK(std::abs(fe.recovered_fix[0] - 0.4) <= 1e-8);

  CompositionResult pj = run_composition(disk_op(), line_op(), Weights(0.5),
                                         CompositionOrder::EF, vec({5.0, 7.0}), rule);
  CHECK((pj.trace.final - vec({0.0, 1.0})).norm() <= 1e-7);
  CHECK((pj.recovered_fix - vec({0.0, 0.5})).norm() <= 1e-7);
}

TEST_CASE("divergence detection") {
  StoppingRule rule;
  rule.divergence_norm = 1e3;

  // A x == {1} has no zero; J translates by -gamma each step.
  MonotoneOperator shift = MonotoneOperator::affine(Matrix::Zero(1, 1), vec({1.0}));
  ResolventAverage ra(shift, shift, Weights(0.5));
  IterationTrace tr = run_proximal_point(ra, vec({0.0}), rule);
  CHECK(tr.status == IterStatus::Diverged);
  CHECK(tr.final.norm() >= rule.divergence_norm);

  // Disjoint halfspaces still have a gap pair; no divergence.
  MonotoneOperator h1 =
      op(ConvexFunction(IndicatorHalfspace{vec({1.0}), 0.0}));   // x <= 0
  MonotoneOperator h2 =
      op(ConvexFunction(IndicatorHalfspace{vec({-1.0}), -1.0}));  // x >= 1
  AlternatingResult alt = run_alternating(h1, h2, Weights(0.5), vec({10.0}), rule);
  CHECK(alt.trace_x.status == IterStatus::Converged);
  CHECK(std::abs(alt.trace_x.final[0] - 0.0) <= 1e-9);
  CHECK(std::abs(alt.trace_y.final[0] - 1.0) <= 1e-9);

  CHECK(detect_divergence(vec({2e3}), rule));
  CHECK_FALSE(detect_divergence(vec({999.0}), rule));

  // A starting point already past the threshold is flagged immediately.
  IterationTrace t0 = run_proximal_point(ra, vec({5e3}), rule);
  CHECK(t0.status == IterStatus::Diverged);
  CHECK(t0.iterations_used == 0);
}

TEST_CASE("step norms decrease and iterates approach the known fixed point") {
  StoppingRule rule;
  struct Fixture {
    ResolventAverage ra;
    Point fix;
    Point x0;
  };
  std::vector<Fixture> fx;
  fx.push_back({ResolventAverage(square_op(), shifted_square_op(), Weights(0.25)),
                vec({0.75}), vec({10.0})});
  fx.push_back({ResolventAverage(abs_op(), shifted_square_op(), Weights(0.5)),
                vec({0.4}), vec({-6.0})});
  fx.push_back({ResolventAverage(disk_op(), line_op(), Weights(0.5)),
                vec({0.0, 0.5}), vec({5.0, 7.0})});

  for (const auto& f : fx) {
    IterationTrace tr = run_proximal_point(f.ra, f.x0, rule);
    REQUIRE(tr.status == IterStatus::Converged);
    for (size_t i = 1; i < tr.step_norms.size(); ++i) {
      CHECK(tr.step_norms[i] <= tr.step_norms[i - 1] + 1e-12);
    }
    // Fejer monotonicity with respect to the known fixed point.
    for (size_t i = 1; i < tr.iterates.size(); ++i) {
      CHECK((tr.iterates[i] - f.fix).norm() <=
            (tr.iterates[i - 1] - f.fix).norm() + 1e-12);
    }
    CHECK(tr.step_norms.back() <= rule.step_tol);
    CHECK((tr.final - f.fix).norm() <= 1e-7);
  }
}

TEST_CASE("the four drivers agree on the recovered fixed point") {
  StoppingRule rule;
  struct Pair {
    MonotoneOperator a1, a2;
    double l1;
  };
  std::vector<Pair> pairs = {
      {square_op(), shifted_square_op(), 0.25},
      {abs_op(), shifted_square_op(), 0.5},
      {disk_op(), line_op(), 0.5},
      {disk_op(), line_op(), 0.75},
  };
  for (const auto& p : pairs) {
    Weights w(p.l1);
    Point x0 = Point::Constant(p.a1.dim(), 3.0);
    ResolventAverage ra(p.a1, p.a2, w);

    Point v1 = run_proximal_point(ra, x0, rule).final;
    Point v2 = run_alternating(p.a1, p.a2, w, x0, rule).averaged_limit;
    Point v3 =
        run_composition(p.a1, p.a2, w, CompositionOrder::EF, x0, rule).recovered_fix;
    Point v4 =
        run_composition(p.a1, p.a2, w, CompositionOrder::FE, x0, rule).recovered_fix;

    for (const Point* a : {&v1, &v2, &v3, &v4}) {
      for (const Point* b : {&v1, &v2, &v3, &v4}) {
        CHECK((*a - *b).norm() <= 1e-6);
      }
    }
  }
}

TEST_CASE("trace bookkeeping") {
  StoppingRule rule;
  Weights w(0.25);
  ResolventAverage ra(square_op(), shifted_square_op(), w);

  IterationTrace tr = run_proximal_point(ra, vec({10.0}), rule);
  CHECK(tr.iterates.front()[0] == 10.0);
  CHECK(tr.iterates.back()[0] == tr.final[0]);
  CHECK(static_cast<int>(tr.step_norms.size()) == tr.iterations_used);

  // Thinning keeps x0 and the final point.
  StoppingRule thin = rule;
  thin.trace_stride = 7;
  IterationTrace tt = run_proximal_point(ra, vec({10.0}), thin);
  CHECK(tt.iterates.front()[0] == 10.0);
  CHECK(tt.iterates.back()[0] == tt.final[0]);
  CHECK(tt.iterates.size() < tr.iterates.size());
  CHECK(static_cast<int>(tt.step_norms.size()) == tt.iterations_used);

  // max_iters is a hard cap.
  StoppingRule tight;
  tight.max_iters = 3;
  tight.step_tol = 1e-300;
  IterationTrace tm = run_proximal_point(ra, vec({10.0}), tight);
  CHECK(tm.status == IterStatus::MaxIters);
  CHECK(tm.iterations_used == 3);

  StoppingRule bad;
  bad.max_iters = 0;
  CHECK_THROWS_AS(run_proximal_point(ra, vec({10.0}), bad), std::invalid_argument);
  CHECK_THROWS_AS(run_proximal_point(ra, vec({1.0, 2.0}), rule),
                  std::invalid_argument);
}
