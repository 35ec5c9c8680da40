#include "finlab/bounds.hpp"

#include <algorithm>

#include "finlab/parallel.hpp"
#include "finlab/sampling.hpp"

namespace finlab {

namespace {

constexpr const char* kMinimalityCaveat =
    "minimal geodesic asserted by the shooting solver, not certified";

// Fan of unit-speed geodesics of length < 1 from p; sampled points land in the
// open forward ball. A ray truncated at the chart boundary is an error unless
// the chart covers the whole manifold, in which case the ball is clipped to M.
std::vector<Vec> fan_points(const MetricModel& m, const Vec& p, int fan_dirs,
                            int radial, const FanOptions& opts) {
  std::vector<std::vector<Vec>> per_ray(static_cast<size_t>(fan_dirs));
  std::vector<Vec> dirs = direction_grid(m.dim(), fan_dirs);
  const double reach = 1.0 - 1e-9;  // open ball
  parallel_for(fan_dirs, opts.threads, [&](int i) {
    Vec u = normalize_direction(m, p, dirs[static_cast<size_t>(i)]);
    GeodesicPath path =
        integrate_geodesic(m, p, u, reach, opts.step, opts.curvature);
    if (path.truncated && !m.domain.covers_manifold)
      throw BallExitsChartError("unit ball leaves the chart; sup not certifiable");
    std::vector<Vec>& mine = per_ray[static_cast<size_t>(i)];
    for (int j = 1; j <= radial; ++j) {
      double s = reach * j / radial;
      if (s > path.total_length) break;
      mine.push_back(path.point_at(s));
    }
  });
  std::vector<Vec> out;
  for (auto& ray : per_ray)
    for (auto& x : ray) out.push_back(std::move(x));
  return out;
}

}  // namespace

BallSample ball_sample(const MetricModel& m, const Vec& p, const FanOptions& opts) {
  if (!m.domain.contains(p)) throw DomainError("ball_sample: center outside chart");
  int fan_dirs = opts.fan_directions > 0 ? opts.fan_directions : (m.dim() == 2 ? 16 : 64);
  BallSample out;
  out.center = p;
  out.fan_directions = fan_dirs;
  out.radial_samples = opts.radial_samples;
  out.forward = fan_points(m, p, fan_dirs, opts.radial_samples, opts);
  out.backward = fan_points(reverse_metric(m), p, fan_dirs, opts.radial_samples, opts);
  return out;
}

LocalRicciSup local_ricci_sup(const MetricModel& m, const Vec& p, const FanOptions& opts) {
  BallSample ball = ball_sample(m, p, opts);
  std::vector<Vec> points;
  points.push_back(p);
  points.insert(points.end(), ball.forward.begin(), ball.forward.end());
  points.insert(points.end(), ball.backward.begin(), ball.backward.end());

  std::vector<Vec> dirs = direction_grid(m.dim(), opts.indicatrix_dirs);
  std::vector<double> maxima(points.size(), 0.0);
  parallel_for(static_cast<int>(points.size()), opts.threads, [&](int i) {
    const Vec& x = points[static_cast<size_t>(i)];
    double worst = 0.0;
    for (const Vec& u : dirs) {
      Vec y = normalize_direction(m, x, u);
      worst = std::max(worst, std::abs(ricci_scalar(m, {x, y}, opts.curvature)));
    }
    maxima[static_cast<size_t>(i)] = worst;
  });

  LocalRicciSup out;
  out.raw = *std::max_element(maxima.begin(), maxima.end());
  out.safety_factor = opts.safety_factor;
  out.value = out.raw * opts.safety_factor;
  out.points_sampled = static_cast<int>(points.size());
  out.indicatrix_dirs = opts.indicatrix_dirs;
  return out;
}

LemmaReport lemma_check(const MetricModel& m, const Vec& p, const Vec& q,
                        const FanOptions& fan, const SolverOptions& solver) {
  LemmaReport rep;
  rep.p = p;
  rep.q = q;
  DistanceResult d = distance(m, p, q, solver);
  rep.r = d.distance;
  rep.distance_converged = d.converged;
  if (!d.converged)
    throw IntegrationError("lemma_check: distance solver did not converge");
  if (d.distance <= 1.0) {
    rep.applicable = false;
    rep.note = "not applicable: r <= 1";
    return rep;
  }
  rep.applicable = true;
  RicciIntegral integral = ricci_integral(m, d.path, fan.curvature);
  rep.integral = integral.value;
  rep.integral_error = integral.error_estimate;
  rep.h_p = local_ricci_sup(m, p, fan).raw;
  rep.h_q = local_ricci_sup(m, q, fan).raw;
  rep.rhs = 2.0 * (m.dim() - 1) + rep.h_p + rep.h_q;
  rep.holds = rep.integral <= rep.rhs + 1e-3;
  rep.note = std::string(kMinimalityCaveat) + "; raw H values (no safety factor)";
  return rep;
}

FieldNormResult field_norm(const MetricModel& m, const VectorFieldModel& field,
                           const Vec& x, const FieldNormOptions& opts) {
  if (!m.domain.contains(x)) throw DomainError("field_norm: point outside chart");
  Vec v = field.eval(x);
  FieldNormResult out;
  out.grid = opts.grid;
  if (v.cwiseAbs().maxCoeff() == 0.0) return out;

  // g is 0-homogeneous in y: scan Euclidean directions directly.
  auto norm_at = [&](const Vec& u) {
    Mat g = toEigen(metric_tensor_eval(m, x, toVecT(u)));
    return std::sqrt(std::max(0.0, v.dot(g * v)));
  };

  std::vector<Vec> dirs = direction_grid(m.dim(), opts.grid);
  double best = 0.0;
  Vec best_u = dirs.front();
  for (const Vec& u : dirs) {
    double val = norm_at(u);
    if (val > best) {
      best = val;
      best_u = u;
    }
  }

  // local refinement: shrinking random-axis probes around the best direction
  double radius = (m.dim() == 2) ? M_PI / opts.grid : 2.0 * std::sqrt(4.0 * M_PI / opts.grid);
  int level = 0;
  Rng rng(0xf1e1dull);
  for (int it = 0; it < opts.refine_iters; ++it) {
    bool improved = false;
    for (int probe = 0; probe < 2 * m.dim(); ++probe) {
      Vec u = (best_u + radius * rng.unit_vector(m.dim())).normalized();
      double val = norm_at(u);
      if (val > best) {
        best = val;
        best_u = u;
        improved = true;
      }
    }
    if (!improved) {
      radius *= 0.5;
      ++level;
      if (radius < 1e-9) break;
    }
  }
  out.value = best;
  out.refinement_level = level;
  return out;
}

namespace {

BoundReport bound_for_pair(const SolitonProblem& problem, const Vec& p, const Vec& q,
                           const FanOptions& fan, const SolverOptions& solver) {
  const MetricModel& m = problem.metric;
  BoundReport rep;
  rep.p = p;
  rep.q = q;
  rep.lambda = problem.lambda;
  rep.n = m.dim();

  LocalRicciSup hp = local_ricci_sup(m, p, fan);
  LocalRicciSup hq = local_ricci_sup(m, q, fan);
  rep.h_p = hp.value;
  rep.h_q = hq.value;
  rep.fan_directions = fan.fan_directions > 0 ? fan.fan_directions : (m.dim() == 2 ? 16 : 64);
  rep.radial_samples = fan.radial_samples;
  rep.indicatrix_dirs = fan.indicatrix_dirs;

  rep.v_norm_p = field_norm(m, problem.field, p).value;
  rep.v_norm_q = field_norm(m, problem.field, q).value;

  rep.bound = std::max(
      1.0, (2.0 * (rep.n - 1) + rep.h_p + rep.h_q + rep.v_norm_p + rep.v_norm_q) / rep.lambda);

  DistanceResult d = distance(m, p, q, solver);
  rep.measured_distance = d.distance;
  rep.distance_converged = d.converged;
  rep.holds = d.converged && rep.measured_distance <= rep.bound + 1e-6;
  rep.note = kMinimalityCaveat;
  return rep;
}

}  // namespace

BoundReport diameter_bound(const SolitonProblem& problem, const Vec& p, const Vec& q,
                          const FanOptions& fan, const SolverOptions& solver,
                          const SolitonSamplePlan* plan) {
  if (!(problem.lambda > 0.0))
    throw HypothesisViolatedError("diameter_bound: requires lambda > 0");
  SolitonSamplePlan default_plan;
  if (plan == nullptr) {
    default_plan = SolitonSamplePlan::grid(problem.metric);
    plan = &default_plan;
  }
  SolitonVerdict verdict = classify(problem, *plan, fan.curvature, fan.threads);
  if (!verdict.equality && !verdict.inequality)
    throw HypothesisViolatedError(
        "diameter_bound: soliton inequality 2F^2 ric + L F^2 >= 2 lambda F^2 fails "
        "(max deficit " + std::to_string(verdict.max_deficit) + ")");
  return bound_for_pair(problem, p, q, fan, solver);
}

SweepSummary bound_sweep(const SolitonProblem& problem,
                         const std::vector<std::pair<Vec, Vec>>& pairs,
                         const FanOptions& fan, const SolverOptions& solver,
                         unsigned threads) {
  SweepSummary summary;
  summary.entries.resize(pairs.size());
  if (pairs.empty()) {
    summary.min_slack = 0.0;
    return summary;
  }

  // hypothesis gate once for the whole problem
  if (!(problem.lambda > 0.0))
    throw HypothesisViolatedError("bound_sweep: requires lambda > 0");
  SolitonSamplePlan plan = SolitonSamplePlan::grid(problem.metric);
  SolitonVerdict verdict = classify(problem, plan, fan.curvature, threads);
  if (!verdict.equality && !verdict.inequality)
    throw HypothesisViolatedError("bound_sweep: soliton inequality fails on samples");

  parallel_for(static_cast<int>(pairs.size()), threads, [&](int i) {
    SweepEntry& entry = summary.entries[static_cast<size_t>(i)];
    try {
      entry.report = bound_for_pair(problem, pairs[static_cast<size_t>(i)].first,
                                    pairs[static_cast<size_t>(i)].second, fan, solver);
      entry.ok = true;
    } catch (const std::exception& e) {
      entry.ok = false;
      entry.error = e.what();
    }
  });

  for (const SweepEntry& e : summary.entries) {
    if (!e.ok) {
      ++summary.errors;
      continue;
    }
    if (!e.report.holds) ++summary.violations;
    summary.min_slack = std::min(summary.min_slack, e.report.bound - e.report.measured_distance);
  }
  return summary;
}

}  // namespace finlab
