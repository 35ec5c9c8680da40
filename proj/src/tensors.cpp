#include "finlab/tensors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <limits>

#include "finlab/sampling.hpp"

namespace finlab {

void require_valid(const MetricModel& m, const PointDirection& pd) {
  if (pd.x.size() != m.dim() || pd.y.size() != m.dim())
    throw DomainError("point/direction dimension mismatch");
  if (!m.domain.contains(pd.x)) throw DomainError("point outside chart domain");
  if (pd.y.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateDirectionError("zero tangent direction");
  if (!(f_signed(m, pd.x, pd.y) >= kDegenerateF))
    throw DegenerateDirectionError("direction is degenerate for this metric");
}

double eval_F(const MetricModel& m, const PointDirection& pd) {
  require_valid(m, pd);
  return f_signed(m, pd.x, pd.y);
}

Vec normalize_direction(const MetricModel& m, const Vec& x, const Vec& y) {
  PointDirection pd{x, y};
  double f = eval_F(m, pd);
  return y / f;
}

FundamentalTensor fundamental_tensor(const MetricModel& m, const PointDirection& pd) {
  require_valid(m, pd);
  Mat g = toEigen(metric_tensor_eval(m, pd.x, toVecT(pd.y)));
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success)
    throw NonConvexMetricError("fundamental tensor is not positive definite");
  return {std::move(g), pd};
}

CartanTensor cartan_tensor(const MetricModel& m, const PointDirection& pd) {
  require_valid(m, pd);
  const int n = m.dim();
  Ten3 c(n);
  using D3 = Dual<Dual<Dual<double>>>;
  VecT<D3> yd(static_cast<size_t>(n));
  // C_ijk = (1/4) d^3 F^2 / dy^i dy^j dy^k, totally symmetric: fill i<=j<=k.
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        for (int p = 0; p < n; ++p) {
          Dual<double> lvl1(pd.y[p], p == k ? 1.0 : 0.0);
          Dual<double> lvl2(p == j ? 1.0 : 0.0, 0.0);
          Dual<Dual<double>> lo(lvl1, lvl2);
          Dual<Dual<double>> hi(Dual<double>(p == i ? 1.0 : 0.0, 0.0), Dual<double>(0.0, 0.0));
          yd[static_cast<size_t>(p)] = D3(lo, hi);
        }
        double v = 0.25 * f2_eval(m, pd.x, yd).d.d.d;
        c(i, j, k) = c(i, k, j) = c(j, i, k) = c(j, k, i) = c(k, i, j) = c(k, j, i) = v;
      }
    }
  }
  return {std::move(c), pd};
}

Mat inverse_fundamental(const MetricModel& m, const PointDirection& pd) {
  FundamentalTensor g = fundamental_tensor(m, pd);
  Eigen::FullPivLU<Mat> lu(g.g);
  if (!lu.isInvertible()) throw SingularMatrixError("fundamental tensor is singular");
  return lu.inverse();
}

SamplePlan SamplePlan::grid(const MetricModel& m, int per_axis, int directions) {
  SamplePlan plan;
  plan.directions = directions;
  const ChartDomain& d = m.domain;
  Vec lo, hi;
  switch (d.shape) {
    case ChartShape::OpenBox:
      lo = d.lo.array() + 0.05 * (d.hi - d.lo).array();
      hi = d.hi.array() - 0.05 * (d.hi - d.lo).array();
      break;
    case ChartShape::OpenBall:
      lo = Vec::Constant(d.n, -0.6 * d.radius);
      hi = Vec::Constant(d.n, 0.6 * d.radius);
      break;
    case ChartShape::AllSpace:
    default:
      lo = Vec::Constant(d.n, -2.0);
      hi = Vec::Constant(d.n, 2.0);
      break;
  }
  for (const Vec& x : point_grid(lo, hi, per_axis))
    if (d.contains(x)) plan.points.push_back(x);
  return plan;
}

StructureReport verify_structure(const MetricModel& m, const SamplePlan& plan) {
  StructureReport rep;
  rep.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
  std::vector<Vec> dirs = direction_grid(m.dim(), plan.directions);

  for (const Vec& x : plan.points) {
    for (const Vec& u : dirs) {
      ++rep.samples;
      double f = f_signed(m, x, u);
      double f2 = f2_eval(m, x, toVecT(u));
      if (!(f > 0.0)) rep.positivity_ok = false;  // axiom (i)/(iii) consequence

      // axiom (ii): positive homogeneity
      for (double l : plan.lambdas) {
        double fl = f_signed(m, x, Vec(l * u));
        double viol = std::abs(fl - l * f) / (1.0 + std::abs(l * f));
        rep.max_homogeneity_violation = std::max(rep.max_homogeneity_violation, viol);
      }

      // axiom (iii): strong convexity via the smallest Hessian eigenvalue
      Mat g = toEigen(metric_tensor_eval(m, x, toVecT(u)));
      Eigen::SelfAdjointEigenSolver<Mat> es(g);
      double lam = es.eigenvalues().minCoeff();
      if (lam < rep.min_hessian_eigenvalue) {
        rep.min_hessian_eigenvalue = lam;
        rep.convexity_witness = x;
        rep.convexity_witness_dir = u;
      }

      double mismatch = std::abs(u.dot(g * u) - f2) / std::max(f2, 1e-300);
      rep.max_energy_mismatch = std::max(rep.max_energy_mismatch, mismatch);
    }
  }
  rep.homogeneity_ok = rep.max_homogeneity_violation <= 1e-10;
  rep.convexity_ok = rep.min_hessian_eigenvalue > 0.0;
  return rep;
}

}  // namespace finlab
