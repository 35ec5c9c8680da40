#include <doctest.h>

#include "finlab/geodesics.hpp"
#include "finlab/sampling.hpp"
#include "oracles.hpp"

using namespace finlab;

namespace {

MetricModel randers_const() {
  Vec b(2);
  b << 0.5, 0.0;
  return MetricModel::randers(ChartDomain::all_space(2), ConstantMatrix{Mat::Identity(2, 2)}, b);
}

MetricModel randers_varying() {
  Vec b(2);
  b << 0.3, 0.1;
  Mat blin(2, 2);
  blin << 0.1, 0.05, -0.05, 0.1;
  Vec lo = Vec::Constant(2, -1.0), hi = Vec::Constant(2, 1.0);
  return MetricModel::randers(ChartDomain::open_box(lo, hi, 1e-9),
                              ConstantMatrix{Mat::Identity(2, 2)}, b, blin);
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("euclidean geodesics are straight unit-speed segments") {
  MetricModel euc = MetricModel::euclidean(2);
  GeodesicPath path = integrate_geodesic(euc, Vec::Zero(2), v2(1, 0), 2.0);
  CHECK_FALSE(path.truncated);
  CHECK(path.total_length == doctest::Approx(2.0));
  CHECK((path.x.back() - v2(2, 0)).norm() < 1e-12);
  for (size_t i = 0; i < path.x.size(); i += 200) CHECK(std::abs(path.x[i][1]) < 1e-14);
}

TEST_CASE("funk geodesics from the origin are euclidean rays") {
  MetricModel funk = MetricModel::funk(2);
  GeodesicPath path = integrate_geodesic(funk, Vec::Zero(2), v2(1, 0), 1.6);
  CHECK_FALSE(path.truncated);
  for (size_t i = 0; i < path.x.size(); i += 50) {
    CHECK(std::abs(path.x[i][1]) < 1e-6);  // no transverse deviation
    // radial profile r(s) = 1 - e^{-s}
    CHECK(path.x[i][0] == doctest::Approx(1.0 - std::exp(-path.s[i])).epsilon(1e-8));
  }
}

TEST_CASE("unit-speed conservation across families") {
  std::vector<MetricModel> models = {MetricModel::sphere(2), randers_varying(), MetricModel::funk(2)};
  std::vector<Vec> starts = {v2(0.4, -0.3), v2(0.2, 0.1), v2(0.1, 0.2)};
  std::vector<double> lengths = {3.0, 0.9, 2.0};
  for (size_t c = 0; c < models.size(); ++c) {
    GeodesicPath path = integrate_geodesic(models[c], starts[c], v2(0.7, 0.7), lengths[c]);
    double worst = 0.0;
    for (size_t i = 0; i < path.x.size(); ++i) {
      double f = eval_F(models[c], {path.x[i], path.v[i]});
      worst = std::max(worst, std::abs(f - 1.0));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("unit speed holds to 1e-6 out to length 10") {
  MetricModel rd = randers_const();
  GeodesicPath path = integrate_geodesic(rd, Vec::Zero(2), v2(0.3, 1.0), 10.0);
  double worst = 0.0;
  for (size_t i = 0; i < path.x.size(); i += 37)
    worst = std::max(worst, std::abs(eval_F(rd, {path.x[i], path.v[i]}) - 1.0));

  MetricModel sph = MetricModel::sphere(2);
  GeodesicPath loop = integrate_geodesic(sph, v2(1, 0), v2(0, 1), 10.0);
  for (size_t i = 0; i < loop.x.size(); i += 37)
    worst = std::max(worst, std::abs(eval_F(sph, {loop.x[i], loop.v[i]}) - 1.0));
  CHECK(worst < 1e-6);
}

TEST_CASE("sphere equator closes after 2*pi") {
  // The antipode is outside the truncated chart, so the periodicity oracle
  // runs on the equator circle |x| = 1, which stays well inside.
  MetricModel sph = MetricModel::sphere(2);
  GeodesicPath path = integrate_geodesic(sph, v2(1, 0), v2(0, 1), 2.0 * M_PI);
  CHECK_FALSE(path.truncated);
  CHECK((path.x.back() - v2(1, 0)).norm() < 1e-4);
  CHECK(oracles::sphere_distance(path.x.back(), v2(1, 0)) < 1e-4);

  // through the chart origin: quarter turn lands at chart radius tan(pi/4) = 1
  GeodesicPath quarter = integrate_geodesic(sph, Vec::Zero(2), v2(1, 0), M_PI / 2.0);
  CHECK((quarter.x.back() - v2(1, 0)).norm() < 1e-6);
}

TEST_CASE("truncation at the chart boundary is flagged") {
  MetricModel sph = MetricModel::sphere(2);
  GeodesicPath path = integrate_geodesic(sph, Vec::Zero(2), v2(1, 0), 4.0);
  CHECK(path.truncated);
  CHECK(path.total_length < 3.1);
  CHECK(path.total_length > 3.0);  // boundary at theta = 2*atan(20)

  Vec lo = Vec::Constant(2, -1.0), hi = Vec::Constant(2, 1.0);
  MetricModel box = MetricModel::euclidean(2);
  box.domain = ChartDomain::open_box(lo, hi, 1e-9);
  GeodesicPath pb = integrate_geodesic(box, Vec::Zero(2), v2(1, 0), 5.0);
  CHECK(pb.truncated);
  CHECK(pb.total_length == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("integrator converges at fourth order") {
  MetricModel sph = MetricModel::sphere(2);
  Vec exact = v2(std::tan(0.5), 0.0);  // chart point at sphere angle 1 from origin
  StepControl c1{.step = 0.1}, c2{.step = 0.05};
  double e1 = (integrate_geodesic(sph, Vec::Zero(2), v2(1, 0), 1.0, c1).x.back() - exact).norm();
  double e2 = (integrate_geodesic(sph, Vec::Zero(2), v2(1, 0), 1.0, c2).x.back() - exact).norm();
  double ratio = e1 / e2;
  CHECK(ratio > 16.0 / 1.5);
  CHECK(ratio < 16.0 * 1.5);
}

TEST_CASE("step-collapse raises when the tolerance is unreachable") {
  MetricModel sph = MetricModel::sphere(2);
  StepControl ctrl;
  ctrl.step = 0.2;
  ctrl.error_estimate = true;
  ctrl.tolerance = 1e-18;
  ctrl.max_refinements = 1;
  CHECK_THROWS_AS(integrate_geodesic(sph, Vec::Zero(2), v2(1, 0), 2.0, ctrl), IntegrationError);
}

TEST_CASE("euclidean distance and the degenerate pair") {
  MetricModel euc = MetricModel::euclidean(2);
  DistanceResult d = distance(euc, Vec::Zero(2), v2(3, 4));
  CHECK(d.converged);
  CHECK(d.distance == doctest::Approx(5.0).epsilon(1e-6));

  DistanceResult same = distance(euc, v2(1, 1), v2(1, 1));
  CHECK(same.converged);
  CHECK(same.distance == 0.0);
  CHECK(same.path.empty());
}

TEST_CASE("funk distances match the log formula and are asymmetric") {
  MetricModel funk = MetricModel::funk(2);
  for (double r : {0.3, 0.5, 0.8}) {
    DistanceResult d = distance(funk, Vec::Zero(2), v2(r, 0));
    CHECK(d.converged);
    CHECK(d.distance == doctest::Approx(oracles::funk_distance_from_origin(r)).epsilon(1e-4));
  }
  DistanceResult back = distance(funk, v2(0.5, 0), Vec::Zero(2));
  CHECK(back.converged);
  CHECK(back.distance == doctest::Approx(oracles::funk_distance_to_origin(0.5)).epsilon(1e-4));
  double gap = std::abs(oracles::funk_distance_from_origin(0.5) - back.distance);
  CHECK(gap > 0.1);

  // reverse metric realizes the backward distance as a forward one
  DistanceResult rev = distance(reverse_metric(funk), Vec::Zero(2), v2(0.5, 0));
  CHECK(rev.converged);
  CHECK(rev.distance == doctest::Approx(back.distance).epsilon(1e-4));
}

TEST_CASE("sphere distances match great circles") {
  MetricModel sph = MetricModel::sphere(2);
  DistanceResult d = distance(sph, Vec::Zero(2), v2(1, 0));
  CHECK(d.converged);
  CHECK(d.distance == doctest::Approx(M_PI / 2.0).epsilon(1e-4));

  Vec p = oracles::sphere_chart_point(v2(1, 0), 0.8);
  Vec q = oracles::sphere_chart_point(v2(0, 1), 0.9);
  DistanceResult d2 = distance(sph, p, q);
  CHECK(d2.converged);
  CHECK(d2.distance == doctest::Approx(oracles::sphere_distance(p, q)).epsilon(1e-4));
}

TEST_CASE("distance solver handles n = 3") {
  MetricModel euc = MetricModel::euclidean(3);
  Vec q(3);
  q << 1.0, 2.0, 2.0;
  DistanceResult d = distance(euc, Vec::Zero(3), q);
  CHECK(d.converged);
  CHECK(d.distance == doctest::Approx(3.0).epsilon(1e-5));

  MetricModel sph = MetricModel::sphere(3);
  Vec e1 = Vec::Zero(3);
  e1[0] = 1.0;  // chart radius tan(pi/4): sphere angle pi/2 from the origin
  DistanceResult ds = distance(sph, Vec::Zero(3), e1);
  CHECK(ds.converged);
  CHECK(ds.distance == doctest::Approx(M_PI / 2.0).epsilon(1e-4));
}

TEST_CASE("flat randers distance has the closed form |q-p| + b.(q-p)") {
  MetricModel rd = randers_const();
  Vec p = v2(-1.0, 0.5), q = v2(2.0, -1.0);
  Vec d = q - p;
  double expected = d.norm() + 0.5 * d[0];
  DistanceResult got = distance(rd, p, q);
  CHECK(got.converged);
  CHECK(got.distance == doctest::Approx(expected).epsilon(1e-6));
  // and the reverse direction differs (asymmetry of the linear term)
  DistanceResult rev = distance(rd, q, p);
  CHECK(rev.distance == doctest::Approx(d.norm() - 0.5 * d[0]).epsilon(1e-6));
}

TEST_CASE("distance respects the straight-segment upper bound and triangles") {
  MetricModel funk = MetricModel::funk(2);
  Vec p = v2(-0.2, -0.3), q = v2(0.4, 0.1), r = v2(0.1, 0.45);
  double dpq = distance(funk, p, q).distance;
  double dqr = distance(funk, q, r).distance;
  double dpr = distance(funk, p, r).distance;
  CHECK(dpq <= segment_length(funk, p, q) + 1e-9);
  CHECK(dpr <= dpq + dqr + 1e-4);

  MetricModel rd = randers_varying();
  Vec a = v2(-0.4, 0.2), b = v2(0.5, -0.1), c = v2(0.0, 0.5);
  double ab = distance(rd, a, b).distance;
  double bc = distance(rd, b, c).distance;
  double ac = distance(rd, a, c).distance;
  CHECK(ab <= segment_length(rd, a, b) + 1e-9);
  CHECK(ac <= ab + bc + 1e-4);
}

TEST_CASE("parallel transport: constant in flat space, conserves g") {
  MetricModel euc = MetricModel::euclidean(2);
  GeodesicPath line = integrate_geodesic(euc, Vec::Zero(2), v2(1, 0), 2.0);
  std::vector<Vec> u = parallel_transport(euc, line, v2(0.3, 0.8));
  CHECK((u.back() - v2(0.3, 0.8)).norm() < 1e-12);

  std::vector<MetricModel> models = {MetricModel::sphere(2), randers_varying(), MetricModel::funk(2)};
  std::vector<Vec> starts = {v2(0.5, -0.2), v2(-0.2, 0.15), v2(-0.1, 0.2)};
  std::vector<double> lengths = {2.5, 0.9, 1.5};
  for (size_t c = 0; c < models.size(); ++c) {
    const MetricModel& m = models[c];
    GeodesicPath path = integrate_geodesic(m, starts[c], v2(0.6, 1.0), lengths[c]);
    std::vector<Vec> w = parallel_transport(m, path, v2(-0.7, 0.4));
    double g0 = w.front().dot(fundamental_tensor(m, {path.x.front(), path.v.front()}).g * w.front());
    double drift = 0.0;
    for (size_t i = 0; i < w.size(); i += 100) {
      double gi = w[i].dot(fundamental_tensor(m, {path.x[i], path.v[i]}).g * w[i]);
      drift = std::max(drift, std::abs(gi - g0));
    }
    CHECK(drift < 1e-6);

    // transporting the initial velocity reproduces the velocity field
    std::vector<Vec> t = parallel_transport(m, path, path.v.front());
    double dev = 0.0;
    for (size_t i = 0; i < t.size(); i += 100) dev = std::max(dev, (t[i] - path.v[i]).norm());
    CHECK(dev < 1e-6);
  }
}

TEST_CASE("orthonormal frames stay orthonormal") {
  MetricModel euc = MetricModel::euclidean(2);
  GeodesicPath line = integrate_geodesic(euc, Vec::Zero(2), v2(1, 0), 1.0);
  FrameField ff = orthonormal_frame(euc, line);
  CHECK((ff.frames.front().col(1) - v2(1, 0)).norm() < 1e-12);  // E_n = gamma'
  CHECK((ff.frames.back() - ff.frames.front()).cwiseAbs().maxCoeff() < 1e-12);

  for (MetricModel m : {MetricModel::sphere(2), randers_varying()}) {
    Vec x0 = m.domain.shape == ChartShape::OpenBox ? v2(0.1, -0.2) : v2(0.4, 0.3);
    double len = m.domain.shape == ChartShape::OpenBox ? 0.8 : 2.0;
    GeodesicPath path = integrate_geodesic(m, x0, v2(0.3, -1.0), len);
    FrameField ff2 = orthonormal_frame(m, path);
    double worst = 0.0;
    for (size_t i = 0; i < ff2.frames.size(); i += 50) {
      Mat g = fundamental_tensor(m, {path.x[i], path.v[i]}).g;
      Mat gram = ff2.frames[i].transpose() * g * ff2.frames[i];
      worst = std::max(worst, (gram - Mat::Identity(2, 2)).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("second variation: euclidean analytic value and bilinearity") {
  MetricModel euc = MetricModel::euclidean(2);
  GeodesicPath line = integrate_geodesic(euc, Vec::Zero(2), v2(1, 0), 2.0);
  VariationSpec spec;
  spec.phi = PiecewisePhi::sine(2.0);
  spec.frame_index = 1;
  double l2 = second_variation(euc, line, spec);
  CHECK(l2 == doctest::Approx(M_PI * M_PI / 4.0).epsilon(1e-4));

  VariationSpec scaled;
  scaled.phi = PiecewisePhi::scaled(spec.phi, 3.0);
  scaled.frame_index = 1;
  double l2s = second_variation(euc, line, scaled);
  CHECK(l2s == doctest::Approx(9.0 * l2).epsilon(1e-8));

  VariationSpec bad;
  bad.phi = spec.phi;
  bad.frame_index = 2;  // only n-1 transverse fields exist
  CHECK_THROWS(second_variation(euc, line, bad));

  // phi must vanish at both endpoints for the boundary term to drop
  VariationSpec nonzero;
  nonzero.phi.pieces.push_back(
      {0.0, 2.0, [](double) { return 1.0; }, [](double) { return 0.0; }});
  nonzero.frame_index = 1;
  CHECK_THROWS(second_variation(euc, line, nonzero));
}

TEST_CASE("second variation: sphere stability and instability") {
  MetricModel sph = MetricModel::sphere(2);
  // minimal geodesic (r < pi) on the equator circle
  GeodesicPath minimal = integrate_geodesic(sph, v2(1, 0), v2(0, 1), 2.5);
  FrameField frame = orthonormal_frame(sph, minimal);
  for (int k = 1; k <= 3; ++k) {
    VariationSpec spec;
    spec.phi = PiecewisePhi::sine(2.5, k);
    spec.frame_index = 1;
    CHECK(second_variation(sph, minimal, spec, &frame) >= -1e-6);
  }
  VariationSpec ramp;
  ramp.phi = PiecewisePhi::ramp_plateau(2.5);
  ramp.frame_index = 1;
  CHECK(second_variation(sph, minimal, ramp, &frame) >= -1e-6);

  // past the conjugate point: r = 3*pi/2 with phi = sin(pi s / r)
  double r = 3.0 * M_PI / 2.0;
  GeodesicPath longer = integrate_geodesic(sph, v2(1, 0), v2(0, 1), r);
  VariationSpec spec;
  spec.phi = PiecewisePhi::sine(r);
  spec.frame_index = 1;
  double l2 = second_variation(sph, longer, spec);
  CHECK(l2 < 0.0);
  CHECK(l2 == doctest::Approx((M_PI * M_PI / (r * r) - 1.0) * r / 2.0).epsilon(1e-3));
}

TEST_CASE("ricci integral along paths") {
  MetricModel euc = MetricModel::euclidean(2);
  GeodesicPath line = integrate_geodesic(euc, Vec::Zero(2), v2(0, 1), 3.0);
  CHECK(std::abs(ricci_integral(euc, line).value) < 1e-10);

  MetricModel sph = MetricModel::sphere(2);
  GeodesicPath arc = integrate_geodesic(sph, Vec::Zero(2), v2(1, 0), M_PI / 2.0);
  RicciIntegral ri = ricci_integral(sph, arc);
  CHECK(ri.value == doctest::Approx(M_PI / 2.0).epsilon(1e-3));
  CHECK(ri.error_estimate < 1e-3);

  MetricModel funk = MetricModel::funk(2);
  GeodesicPath ray = integrate_geodesic(funk, Vec::Zero(2), v2(1, 0), 1.0);
  CHECK(ricci_integral(funk, ray).value == doctest::Approx(-0.25).epsilon(1e-3));
}
