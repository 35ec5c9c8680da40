#include "finlab/metric.hpp"

#include <Eigen/Cholesky>

#include <functional>

namespace finlab {

Mat a_matrix_at(const AMatrixModel& m, const Vec& x) {
  if (const auto* c = std::get_if<ConstantMatrix>(&m)) return c->a;
  // sphere: 4 delta_ij / (1+|x|^2)^2
  double u = 1.0 + x.squaredNorm();
  return Mat::Identity(x.size(), x.size()) * (4.0 / (u * u));
}

Mat a_matrix_dx(const AMatrixModel& m, const Vec& x, int k) {
  if (std::holds_alternative<ConstantMatrix>(m)) return Mat::Zero(x.size(), x.size());
  double u = 1.0 + x.squaredNorm();
  return Mat::Identity(x.size(), x.size()) * (-16.0 * x[k] / (u * u * u));
}

std::string MetricModel::family_name() const {
  std::string base;
  if (std::holds_alternative<EuclideanParams>(family)) base = "euclidean";
  else if (std::holds_alternative<RiemannianParams>(family)) base = "riemannian";
  else if (std::holds_alternative<RandersParams>(family)) base = "randers";
  else base = "funk";
  return reversed ? base + " (reversed)" : base;
}

MetricModel MetricModel::euclidean(int n) {
  MetricModel m;
  m.domain = ChartDomain::all_space(n);
  m.family = EuclideanParams{};
  return m;
}

MetricModel MetricModel::riemannian(ChartDomain domain, AMatrixModel a) {
  if (const auto* c = std::get_if<ConstantMatrix>(&a)) {
    if (c->a.rows() != domain.n || c->a.cols() != domain.n)
      throw InvalidModelError("riemannian: a_ij dimension mismatch");
    if ((c->a - c->a.transpose()).cwiseAbs().maxCoeff() > 1e-12)
      throw InvalidModelError("riemannian: a_ij must be symmetric");
    Eigen::LLT<Mat> llt(c->a);
    if (llt.info() != Eigen::Success)
      throw InvalidModelError("riemannian: a_ij must be positive definite");
  }
  MetricModel m;
  m.domain = std::move(domain);
  m.family = RiemannianParams{std::move(a)};
  return m;
}

MetricModel MetricModel::sphere(int n, double r_max) {
  ChartDomain d = ChartDomain::open_ball(n, r_max, 1e-9);
  d.covers_manifold = false;  // chart omits a cap around the antipode
  return riemannian(std::move(d), SphereStereographic{});
}

MetricModel MetricModel::funk(int n) {
  MetricModel m;
  m.domain = ChartDomain::open_ball(n, 1.0, 1e-9);
  m.domain.covers_manifold = true;  // the ball is the whole manifold
  m.family = FunkParams{};
  return m;
}

namespace {

// Sample grid for Randers validity: the shape's bounding region, or a default
// window for all-space charts (which cannot be certified exhaustively).
std::pair<Vec, Vec> validation_bounds(const ChartDomain& d) {
  switch (d.shape) {
    case ChartShape::OpenBox:
      return {d.lo, d.hi};
    case ChartShape::OpenBall:
      return {Vec::Constant(d.n, -d.radius), Vec::Constant(d.n, d.radius)};
    case ChartShape::AllSpace:
    default:
      return {Vec::Constant(d.n, -10.0), Vec::Constant(d.n, 10.0)};
  }
}

void enumerate_grid(const Vec& lo, const Vec& hi, int per_axis,
                    const std::function<void(const Vec&)>& fn) {
  const int n = static_cast<int>(lo.size());
  std::vector<int> idx(static_cast<size_t>(n), 0);
  Vec x(n);
  while (true) {
    for (int i = 0; i < n; ++i) {
      double t = (per_axis == 1) ? 0.5 : static_cast<double>(idx[static_cast<size_t>(i)]) / (per_axis - 1);
      x[i] = lo[i] + t * (hi[i] - lo[i]);
    }
    fn(x);
    int c = 0;
    while (c < n && ++idx[static_cast<size_t>(c)] == per_axis) idx[static_cast<size_t>(c++)] = 0;
    if (c == n) break;
  }
}

}  // namespace

double randers_max_b_norm(const MetricModel& m, int grid_per_axis) {
  const auto* r = std::get_if<RandersParams>(&m.family);
  if (r == nullptr) throw InvalidModelError("randers_max_b_norm: not a Randers model");
  auto [lo, hi] = validation_bounds(m.domain);
  double worst = 0.0;
  enumerate_grid(lo, hi, grid_per_axis, [&](const Vec& x) {
    if (!m.domain.contains(x)) return;
    Mat a = a_matrix_at(r->a, x);
    Vec b = r->b0;
    if (r->blin.size() > 0) b += r->blin * x;
    // ||b||_a^2 = a^{ij} b_i b_j
    double norm2 = b.dot(a.ldlt().solve(b));
    worst = std::max(worst, std::sqrt(std::max(0.0, norm2)));
  });
  return worst;
}

MetricModel MetricModel::randers(ChartDomain domain, AMatrixModel a, Vec b0,
                                 Mat blin, MetricOptions opts) {
  if (b0.size() != domain.n) throw InvalidModelError("randers: b0 dimension mismatch");
  if (blin.size() > 0 && (blin.rows() != domain.n || blin.cols() != domain.n))
    throw InvalidModelError("randers: blin dimension mismatch");
  MetricModel m;
  m.domain = std::move(domain);
  m.family = RandersParams{std::move(a), std::move(b0), std::move(blin)};
  if (opts.validate) {
    double worst = randers_max_b_norm(m, opts.validation_grid);
    if (worst >= opts.randers_threshold)
      throw InvalidModelError("randers: ||b||_a = " + std::to_string(worst) +
                              " reaches the convexity threshold");
  }
  return m;
}

MetricModel reverse_metric(const MetricModel& m) {
  MetricModel r = m;
  r.reversed = !m.reversed;
  return r;
}

double f_signed(const MetricModel& m, const Vec& x, const Vec& y_in) {
  Vec y = m.reversed ? Vec(-y_in) : y_in;
  if (const auto* r = std::get_if<RandersParams>(&m.family)) {
    Mat a = a_matrix_at(r->a, x);
    Vec b = r->b0;
    if (r->blin.size() > 0) b += r->blin * x;
    return std::sqrt(std::max(0.0, y.dot(a * y))) + b.dot(y);
  }
  MetricModel base = m;
  base.reversed = false;
  return std::sqrt(std::max(0.0, f2_eval(base, x, toVecT(y))));
}

bool has_analytic_dgdx(const MetricModel& m) {
  if (std::holds_alternative<EuclideanParams>(m.family)) return true;
  if (std::holds_alternative<RiemannianParams>(m.family)) return true;
  if (std::holds_alternative<FunkParams>(m.family)) return true;
  const auto& r = std::get<RandersParams>(m.family);
  bool a_const = std::holds_alternative<ConstantMatrix>(r.a);
  bool b_const = r.blin.size() == 0 || r.blin.cwiseAbs().maxCoeff() == 0.0;
  return a_const && b_const;
}

bool has_analytic_df2dx(const MetricModel&) {
  return true;  // every built-in family carries a closed-form x-gradient of F^2
}

}  // namespace finlab
