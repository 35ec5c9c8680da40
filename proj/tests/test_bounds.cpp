#include <doctest.h>

#include "finlab/bounds.hpp"
#include "finlab/rng.hpp"
#include "finlab/sampling.hpp"
#include "oracles.hpp"

using namespace finlab;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

MetricModel randers03() {
  Vec b(2);
  b << 0.3, 0.0;
  return MetricModel::randers(ChartDomain::all_space(2), ConstantMatrix{Mat::Identity(2, 2)}, b);
}

FanOptions fast_fan() {
  FanOptions fan;
  fan.fan_directions = 8;
  fan.radial_samples = 4;
  fan.indicatrix_dirs = 8;
  fan.threads = 2;
  return fan;
}

}  // namespace

TEST_CASE("field norm: zero field, euclidean radial, randers dense-grid oracle") {
  MetricModel euc = MetricModel::euclidean(2);
  VectorFieldModel zero = VectorFieldModel::zero(2);
  CHECK(field_norm(euc, zero, v2(1, 2)).value == 0.0);

  VectorFieldModel radial = VectorFieldModel::radial(2, 1.0);
  CHECK(field_norm(euc, radial, v2(3, 0)).value == doctest::Approx(3.0).epsilon(1e-12));

  MetricModel rd = randers03();
  VectorFieldModel e1 = VectorFieldModel::linear(Mat::Zero(2, 2), v2(1, 0));
  for (Vec x : {v2(0.0, 0.0), v2(1.5, -2.0)}) {
    double got = field_norm(rd, e1, x).value;
    double want = oracles::dense_field_norm(rd, x, v2(1, 0), 10000);
    CHECK(got == doctest::Approx(want).epsilon(1e-4));
    CHECK(got >= want - 1e-9);  // refinement must not fall below the dense scan
  }
}

TEST_CASE("field norm is 1-homogeneous in the field") {
  MetricModel rd = randers03();
  Vec x = v2(0.4, -1.0);
  VectorFieldModel v = VectorFieldModel::linear(Mat::Zero(2, 2), v2(0.7, -0.4));
  VectorFieldModel cv = VectorFieldModel::linear(Mat::Zero(2, 2), Vec(2.5 * v2(0.7, -0.4)));
  double a = field_norm(rd, v, x).value;
  double b = field_norm(rd, cv, x).value;
  CHECK(b == doctest::Approx(2.5 * a).epsilon(1e-9));
}

TEST_CASE("ball samples stay inside the unit balls") {
  MetricModel funk = MetricModel::funk(2);
  FanOptions fan = fast_fan();
  BallSample ball = ball_sample(funk, Vec::Zero(2), fan);
  CHECK_FALSE(ball.forward.empty());
  CHECK_FALSE(ball.backward.empty());
  SolverOptions solver;
  // spot-check the defining distance inequalities with the solver
  DistanceResult fwd = distance(funk, Vec::Zero(2), ball.forward.front(), solver);
  CHECK(fwd.converged);
  CHECK(fwd.distance < 1.0 + 1e-4);
  DistanceResult bwd = distance(funk, ball.backward.back(), Vec::Zero(2), solver);
  CHECK(bwd.converged);
  CHECK(bwd.distance < 1.0 + 1e-4);
}

TEST_CASE("local ricci sup: flat, sphere, funk") {
  FanOptions fan = fast_fan();
  MetricModel euc = MetricModel::euclidean(2);
  LocalRicciSup flat = local_ricci_sup(euc, v2(0.3, -0.7), fan);
  CHECK(flat.raw < 1e-10);

  MetricModel sph = MetricModel::sphere(2);
  LocalRicciSup hs = local_ricci_sup(sph, v2(0.2, 0.1), fan);
  CHECK(hs.raw == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(hs.value == doctest::Approx(1.05).epsilon(1e-4));

  MetricModel funk = MetricModel::funk(2);
  LocalRicciSup hf = local_ricci_sup(funk, Vec::Zero(2), fan);
  CHECK(hf.raw == doctest::Approx(0.25).epsilon(2e-3));
  CHECK(hf.value == doctest::Approx(0.2625).epsilon(2e-3));
}

TEST_CASE("refining the fan never lowers the sup estimate") {
  MetricModel funk = MetricModel::funk(2);
  Vec p = v2(0.15, -0.1);
  FanOptions coarse = fast_fan();
  FanOptions fine = coarse;
  fine.fan_directions = 2 * coarse.fan_directions;
  fine.radial_samples = 2 * coarse.radial_samples;
  fine.indicatrix_dirs = 2 * coarse.indicatrix_dirs;
  double h0 = local_ricci_sup(funk, p, coarse).raw;
  double h1 = local_ricci_sup(funk, p, fine).raw;
  CHECK(h1 >= h0 - 1e-12);  // nested grids: the max can only grow
}

TEST_CASE("unit ball leaving a window chart is an error") {
  MetricModel sph = MetricModel::sphere(2);  // covers_manifold = false
  Vec near_edge = v2(19.5, 0.0);
  CHECK_THROWS_AS(local_ricci_sup(sph, near_edge, fast_fan()), BallExitsChartError);

  // the Funk ball is the whole manifold: its backward ball clips cleanly
  MetricModel funk = MetricModel::funk(2);
  CHECK_NOTHROW(local_ricci_sup(funk, Vec::Zero(2), fast_fan()));
}

TEST_CASE("lemma check: euclidean, sphere arcs, and the r <= 1 gate") {
  FanOptions fan = fast_fan();
  SolverOptions solver;

  MetricModel euc = MetricModel::euclidean(2);
  LemmaReport flat = lemma_check(euc, Vec::Zero(2), v2(3, 0), fan, solver);
  CHECK(flat.applicable);
  CHECK(std::abs(flat.integral) < 1e-9);
  CHECK(flat.rhs == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(flat.holds);

  LemmaReport short_pair = lemma_check(euc, Vec::Zero(2), v2(0.5, 0), fan, solver);
  CHECK_FALSE(short_pair.applicable);

  MetricModel sph = MetricModel::sphere(2);
  LemmaReport quarter = lemma_check(sph, Vec::Zero(2), v2(1, 0), fan, solver);
  CHECK(quarter.applicable);  // pi/2 > 1
  CHECK(quarter.integral == doctest::Approx(M_PI / 2.0).epsilon(1e-3));
  CHECK(quarter.rhs == doctest::Approx(4.0).epsilon(1e-3));
  CHECK(quarter.holds);

  // a length-3 arc along the equator circle
  Vec p = v2(1.0, 0.0);
  Vec q = v2(std::cos(3.0), std::sin(3.0));
  LemmaReport arc = lemma_check(sph, p, q, fan, solver);
  CHECK(arc.applicable);
  CHECK(arc.r == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(arc.integral == doctest::Approx(3.0).epsilon(1e-3));
  CHECK(arc.holds);
}

TEST_CASE("diameter bound: gaussian pair reproduces the hand computation") {
  MetricModel euc = MetricModel::euclidean(2);
  SolitonProblem gaussian{euc, VectorFieldModel::radial(2, 1.0), 1.0};
  BoundReport rep = diameter_bound(gaussian, v2(3, 0), v2(0, 4), fast_fan());
  CHECK(rep.v_norm_p == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(rep.v_norm_q == doctest::Approx(4.0).epsilon(1e-9));
  CHECK(rep.h_p < 1e-9);
  CHECK(rep.bound == doctest::Approx(9.0).epsilon(1e-9));
  CHECK(rep.measured_distance == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(rep.holds);

  // reconstruction: the stored fields reproduce the bound exactly
  double rebuilt = std::max(
      1.0, (2.0 * (rep.n - 1) + rep.h_p + rep.h_q + rep.v_norm_p + rep.v_norm_q) / rep.lambda);
  CHECK(rebuilt == rep.bound);

  // p = q holds trivially
  BoundReport same = diameter_bound(gaussian, v2(1, 1), v2(1, 1), fast_fan());
  CHECK(same.measured_distance == 0.0);
  CHECK(same.holds);
}

TEST_CASE("diameter bound: sphere Einstein case") {
  MetricModel sph = MetricModel::sphere(2);
  SolitonProblem einstein{sph, VectorFieldModel::zero(2), 1.0};
  SolitonSamplePlan plan = SolitonSamplePlan::grid(sph, 3, 8);
  Vec p = v2(1.0, 0.0), q = v2(-0.8, 0.6);
  BoundReport rep = diameter_bound(einstein, p, q, fast_fan(), SolverOptions{}, &plan);
  CHECK(rep.bound == doctest::Approx(4.1).epsilon(1e-3));
  CHECK(rep.measured_distance == doctest::Approx(oracles::sphere_distance(p, q)).epsilon(1e-4));
  CHECK(rep.measured_distance < M_PI + 1e-6);
  CHECK(rep.holds);
}

TEST_CASE("hypothesis gate rejects non-soliton setups before any bound math") {
  MetricModel sph = MetricModel::sphere(2);
  SolitonSamplePlan plan = SolitonSamplePlan::grid(sph, 3, 8);

  SolitonProblem overshoot{sph, VectorFieldModel::zero(2), 10.0};
  CHECK_THROWS_AS(diameter_bound(overshoot, Vec::Zero(2), v2(1, 0), fast_fan(), SolverOptions{}, &plan),
                  HypothesisViolatedError);

  MetricModel euc = MetricModel::euclidean(2);
  SolitonProblem negative{euc, VectorFieldModel::radial(2, 1.0), -1.0};
  CHECK_THROWS_AS(diameter_bound(negative, Vec::Zero(2), v2(1, 0), fast_fan()),
                  HypothesisViolatedError);

  SolitonProblem flat_fail{euc, VectorFieldModel::zero(2), 1.0};
  CHECK_THROWS_AS(diameter_bound(flat_fail, Vec::Zero(2), v2(1, 0), fast_fan()),
                  HypothesisViolatedError);
}

TEST_CASE("bound sweep: gaussian random pairs have positive slack") {
  MetricModel euc = MetricModel::euclidean(2);
  SolitonProblem gaussian{euc, VectorFieldModel::radial(2, 1.0), 1.0};
  Rng rng(7);
  std::vector<std::pair<Vec, Vec>> pairs;
  for (int i = 0; i < 10; ++i)
    pairs.emplace_back(rng.ball_point(2, 5.0), rng.ball_point(2, 5.0));

  SweepSummary summary = bound_sweep(gaussian, pairs, fast_fan(), SolverOptions{}, 2);
  CHECK(summary.violations == 0);
  CHECK(summary.errors == 0);
  CHECK(summary.min_slack > 0.0);

  SweepSummary empty = bound_sweep(gaussian, {}, fast_fan());
  CHECK(empty.entries.empty());
  CHECK(empty.violations == 0);
}

TEST_CASE("bound sweep rejects the corrupted sphere instance at the gate") {
  MetricModel sph = MetricModel::sphere(2);
  SolitonProblem bad{sph, VectorFieldModel::zero(2), 10.0};
  std::vector<std::pair<Vec, Vec>> pairs = {{Vec::Zero(2), v2(1, 0)}};
  CHECK_THROWS_AS(bound_sweep(bad, pairs, fast_fan()), HypothesisViolatedError);
}
