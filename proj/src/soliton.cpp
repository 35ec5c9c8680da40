#include "finlab/soliton.hpp"

#include <algorithm>
#include <mutex>

#include "finlab/parallel.hpp"
#include "finlab/sampling.hpp"

namespace finlab {

CompleteLift complete_lift(const VectorFieldModel& field, const PointDirection& pd) {
  return {field.eval(pd.x), field.jacobian() * pd.y};
}

double lie_derivative_F2(const MetricModel& m, const VectorFieldModel& field,
                         const PointDirection& pd, const DiffPolicy& pol) {
  require_valid(m, pd);
  const int n = m.dim();
  CompleteLift lift = complete_lift(field, pd);
  VecT<double> y = toVecT(pd.y);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += lift.horizontal[i] * f2_dx(m, pd.x, y, i, pol);
    acc += lift.vertical[i] * f2_dy(m, pd.x, y, i);
  }
  return acc;
}

Mat lie_derivative_metric(const MetricModel& m, const VectorFieldModel& field,
                          const PointDirection& pd, const CurvatureOptions& opts) {
  require_valid(m, pd);
  const int n = m.dim();

  Mat g = toEigen(metric_tensor_eval(m, pd.x, toVecT(pd.y)));
  Ten3 cart = cartan_tensor(m, pd).c;
  SprayData spray = spray_coefficients(m, pd, opts);
  HorizontalCoefficients chern = chern_coefficients(m, pd, opts);

  Vec v = field.eval(pd.x);
  const Mat& A = field.jacobian();
  Vec V_low = g * v;  // V_k = g_kl v^l at the reference direction

  std::vector<Mat> dg;
  dg.reserve(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) dg.push_back(toEigen(metric_tensor_dx(m, pd.x, toVecT(pd.y), k, opts.diff)));

  // grad_j V_k. V_k(x,y) depends on y through g, so the horizontal derivative
  // delta/delta x^j = d/dx^j - N^s_j d/dy^s picks up the Cartan term.
  Mat nabla(n, n);  // nabla(j,k) = grad_j V_k
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double t = 0.0;
      for (int l = 0; l < n; ++l) t += dg[static_cast<size_t>(j)](k, l) * v[l];
      for (int l = 0; l < n; ++l) t += g(k, l) * A(l, j);
      for (int s = 0; s < n; ++s) {
        double dyV = 0.0;  // dV_k/dy^s = 2 C_skl v^l
        for (int l = 0; l < n; ++l) dyV += 2.0 * cart(s, k, l) * v[l];
        t -= spray.N(s, j) * dyV;
      }
      for (int l = 0; l < n; ++l) t -= chern.gamma(l, k, j) * V_low[l];
      nabla(j, k) = t;
    }
  }

  // grad_0 V^l = y^p (A^l_p + Gamma^l_sp v^s)
  Vec nabla0(n);
  for (int l = 0; l < n; ++l) {
    double t = 0.0;
    for (int p = 0; p < n; ++p) {
      t += A(l, p) * pd.y[p];
      for (int s = 0; s < n; ++s) t += chern.gamma(l, s, p) * v[s] * pd.y[p];
    }
    nabla0[l] = t;
  }

  Mat lie(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double t = nabla(j, k) + nabla(k, j);
      for (int l = 0; l < n; ++l) t += 2.0 * nabla0[l] * cart(l, j, k);
      lie(j, k) = t;
    }
  }
  return lie;
}

double soliton_residual(const SolitonProblem& problem, const PointDirection& pd,
                        const CurvatureOptions& opts) {
  double f2 = f2_eval(problem.metric, pd.x, toVecT(pd.y));
  double ric = ricci_scalar(problem.metric, pd, opts);
  double lie = lie_derivative_F2(problem.metric, problem.field, pd, opts.diff);
  return 2.0 * f2 * ric + lie - 2.0 * problem.lambda * f2;
}

std::string to_string(SolitonClass c) {
  switch (c) {
    case SolitonClass::Shrinking: return "shrinking";
    case SolitonClass::Steady: return "steady";
    case SolitonClass::Expanding: return "expanding";
    case SolitonClass::InequalityOnly: return "inequality-only";
    case SolitonClass::NotSatisfied: return "not-satisfied";
  }
  return "?";
}

SolitonSamplePlan SolitonSamplePlan::grid(const MetricModel& m, int per_axis, int directions) {
  SolitonSamplePlan plan;
  plan.directions = directions;
  SamplePlan base = SamplePlan::grid(m, per_axis, directions);
  plan.points = std::move(base.points);
  return plan;
}

SolitonVerdict classify(const SolitonProblem& problem, const SolitonSamplePlan& plan,
                        const CurvatureOptions& opts, unsigned threads) {
  if (plan.points.empty()) throw InvalidModelError("classify: empty sample plan");
  std::vector<Vec> dirs = direction_grid(problem.metric.dim(), plan.directions);

  struct Sample {
    double residual;
    int point, dir;
  };
  std::vector<Sample> samples(plan.points.size() * dirs.size());
  parallel_for(static_cast<int>(samples.size()), threads, [&](int idx) {
    int pi = idx / static_cast<int>(dirs.size());
    int di = idx % static_cast<int>(dirs.size());
    const Vec& x = plan.points[static_cast<size_t>(pi)];
    Vec y = normalize_direction(problem.metric, x, dirs[static_cast<size_t>(di)]);
    samples[static_cast<size_t>(idx)] = {
        soliton_residual(problem, {x, y}, opts), pi, di};
  });

  SolitonVerdict verdict;
  verdict.lambda = problem.lambda;
  verdict.sample_count = static_cast<int>(samples.size());
  verdict.tolerance = plan.tol_factor * std::max(1.0, std::abs(problem.lambda));

  double min_res = std::numeric_limits<double>::infinity();
  const Sample* worst = nullptr;
  for (const Sample& s : samples) {
    if (worst == nullptr || std::abs(s.residual) > std::abs(worst->residual)) worst = &s;
    min_res = std::min(min_res, s.residual);
    verdict.max_abs_residual = std::max(verdict.max_abs_residual, std::abs(s.residual));
  }
  verdict.max_deficit = std::max(0.0, -min_res);
  if (worst != nullptr) {
    verdict.witness_point = plan.points[static_cast<size_t>(worst->point)];
    verdict.witness_dir = dirs[static_cast<size_t>(worst->dir)];
  }

  verdict.equality = verdict.max_abs_residual <= verdict.tolerance;
  verdict.inequality = min_res >= -verdict.tolerance;
  if (verdict.equality) {
    verdict.classification = problem.lambda > 0.0 ? SolitonClass::Shrinking
                             : problem.lambda < 0.0 ? SolitonClass::Expanding
                                                    : SolitonClass::Steady;
  } else if (verdict.inequality) {
    verdict.classification = SolitonClass::InequalityOnly;
  } else {
    verdict.classification = SolitonClass::NotSatisfied;
  }
  return verdict;
}

}  // namespace finlab
