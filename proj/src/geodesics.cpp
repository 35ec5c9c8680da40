#include "finlab/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "finlab/parallel.hpp"
#include "finlab/quadrature.hpp"
#include "finlab/sampling.hpp"

namespace finlab {

namespace {

struct State {
  Vec x, v;
};

State rk4_step(const MetricModel& m, const State& st, double h, const CurvatureOptions& copts) {
  auto accel = [&](const Vec& x, const Vec& v) { return Vec(-2.0 * spray_vector(m, x, v, copts)); };
  Vec k1x = st.v, k1v = accel(st.x, st.v);
  Vec k2x = st.v + 0.5 * h * k1v, k2v = accel(st.x + 0.5 * h * k1x, st.v + 0.5 * h * k1v);
  Vec k3x = st.v + 0.5 * h * k2v, k3v = accel(st.x + 0.5 * h * k2x, st.v + 0.5 * h * k2v);
  Vec k4x = st.v + h * k3v, k4v = accel(st.x + h * k3x, st.v + h * k3v);
  return {st.x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
          st.v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
}

GeodesicPath integrate_once(const MetricModel& m, const Vec& x0, const Vec& y0_unit,
                            double length, double h, const CurvatureOptions& copts) {
  GeodesicPath path;
  path.metric = m;
  State st{x0, y0_unit};
  double s = 0.0;
  path.s.push_back(0.0);
  path.x.push_back(st.x);
  path.v.push_back(st.v);

  while (true) {
    double remaining = length - s;
    if (remaining < h * 1e-6) break;  // no micro-steps: they poison interpolation
    double hstep = std::min(h, remaining);
    State next = rk4_step(m, st, hstep, copts);
    if (!m.domain.contains(next.x)) {
      // bisect toward the boundary; keep the last admissible state
      double lo = 0.0, hi = hstep;
      State best = st;
      double gained = 0.0;
      for (int it = 0; it < 40 && (hi - lo) > 1e-14 * std::max(1.0, hstep); ++it) {
        double mid = 0.5 * (lo + hi);
        State cand = rk4_step(m, st, mid, copts);
        if (m.domain.contains(cand.x)) {
          lo = mid;
          best = cand;
          gained = mid;
        } else {
          hi = mid;
        }
      }
      if (gained > h * 1e-6) {
        s += gained;
        path.s.push_back(s);
        path.x.push_back(best.x);
        path.v.push_back(best.v);
      }
      path.truncated = true;
      break;
    }
    st = next;
    s += hstep;
    path.s.push_back(s);
    path.x.push_back(st.x);
    path.v.push_back(st.v);
  }
  path.total_length = s;
  return path;
}

}  // namespace

void GeodesicPath::at(double t, Vec& xq, Vec& vq) const {
  if (empty()) throw IntegrationError("empty path");
  t = std::clamp(t, s.front(), s.back());
  auto it = std::upper_bound(s.begin(), s.end(), t);
  size_t i = (it == s.begin()) ? 0 : static_cast<size_t>(it - s.begin()) - 1;
  if (i + 1 >= s.size()) {
    xq = x.back();
    vq = v.back();
    return;
  }
  double h = s[i + 1] - s[i];
  double u = (t - s[i]) / h;
  // cubic Hermite on x, its derivative for v
  double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  double h10 = u * (1 - u) * (1 - u);
  double h01 = u * u * (3 - 2 * u);
  double h11 = u * u * (u - 1);
  xq = h00 * x[i] + h10 * h * v[i] + h01 * x[i + 1] + h11 * h * v[i + 1];
  double d00 = 6 * u * (u - 1) / h;
  double d10 = (1 - u) * (1 - 3 * u);
  double d01 = -6 * u * (u - 1) / h;
  double d11 = u * (3 * u - 2);
  vq = d00 * x[i] + d10 * v[i] + d01 * x[i + 1] + d11 * v[i + 1];
}

Vec GeodesicPath::point_at(double t) const {
  Vec xq, vq;
  at(t, xq, vq);
  return xq;
}

void GeodesicPath::write_csv(const std::string& file) const {
  std::ofstream out(file);
  if (!out) throw FinslerError("cannot open " + file);
  const int n = metric.dim();
  out << "s";
  for (int i = 1; i <= n; ++i) out << ",x_" << i;
  for (int i = 1; i <= n; ++i) out << ",v_" << i;
  out << "\n";
  out.precision(17);
  for (size_t k = 0; k < s.size(); ++k) {
    out << s[k];
    for (int i = 0; i < n; ++i) out << "," << x[k][i];
    for (int i = 0; i < n; ++i) out << "," << v[k][i];
    out << "\n";
  }
}

GeodesicPath integrate_geodesic(const MetricModel& m, const Vec& x0, const Vec& y0,
                                double length, const StepControl& ctrl,
                                const CurvatureOptions& copts) {
  PointDirection pd{x0, y0};
  require_valid(m, pd);
  if (length < 0.0) throw IntegrationError("negative geodesic length");
  Vec y_unit = normalize_direction(m, x0, y0);

  double h = ctrl.step;
  GeodesicPath path = integrate_once(m, x0, y_unit, length, h, copts);
  if (ctrl.error_estimate) {
    for (int attempt = 0;; ++attempt) {
      GeodesicPath half = integrate_once(m, x0, y_unit, length, h / 2.0, copts);
      double err = (path.x.back() - half.x.back()).norm();
      path.endpoint_error = err;
      if (err <= ctrl.tolerance || path.truncated || half.truncated) break;
      if (attempt >= ctrl.max_refinements)
        throw IntegrationError("step-collapse: integrator cannot meet tolerance");
      h /= 2.0;
      path = std::move(half);
      path.endpoint_error = err;
    }
  }
  return path;
}

double segment_length(const MetricModel& m, const Vec& p, const Vec& q, int nodes) {
  Vec d = q - p;
  if (d.norm() == 0.0) return 0.0;
  return simpson(
      [&](double t) {
        Vec c = p + t * d;
        if (!m.domain.contains(c)) throw DomainError("segment leaves chart domain");
        return std::sqrt(f2_eval(m, c, toVecT(d)));
      },
      0.0, 1.0, nodes);
}

namespace {

// Closest approach of a path to q: discrete minimum refined by a parabolic fit
// of the squared miss over the bracketing samples.
std::pair<double, double> closest_approach(const GeodesicPath& path, const Vec& q) {
  size_t best = 0;
  double best_m2 = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < path.x.size(); ++i) {
    double m2 = (path.x[i] - q).squaredNorm();
    if (m2 < best_m2) {
      best_m2 = m2;
      best = i;
    }
  }
  double s_best = path.s[best];
  if (best > 0 && best + 1 < path.s.size()) {
    double s0 = path.s[best - 1], s1 = path.s[best], s2 = path.s[best + 1];
    double f0 = (path.x[best - 1] - q).squaredNorm();
    double f1 = best_m2;
    double f2 = (path.x[best + 1] - q).squaredNorm();
    double denom = (s1 - s0) * (f1 - f2) - (s1 - s2) * (f1 - f0);
    if (std::abs(denom) > 1e-300) {
      double sv = s1 - 0.5 * ((s1 - s0) * (s1 - s0) * (f1 - f2) - (s1 - s2) * (s1 - s2) * (f1 - f0)) / denom;
      if (sv > s0 && sv < s2) {
        Vec xq = path.point_at(sv);
        double m2 = (xq - q).squaredNorm();
        if (m2 < best_m2) return {sv, std::sqrt(m2)};
      }
    }
  }
  return {s_best, std::sqrt(best_m2)};
}

// Orthonormal complement of a unit vector (columns span u-perp), via the
// Householder reflection exchanging u and +-e_1.
Mat complement_basis(const Vec& u) {
  const int n = static_cast<int>(u.size());
  Mat q = Mat::Identity(n, n);
  Vec w = u;
  w[0] += (u[0] >= 0 ? 1.0 : -1.0) * u.norm();
  double wn2 = w.squaredNorm();
  if (wn2 > 1e-30) q -= (2.0 / wn2) * (w * w.transpose());
  return q.rightCols(n - 1);
}

struct Candidate {
  Vec u0;       // Euclidean unit direction
  double s0;    // arc-length guess
  double miss;  // Euclidean endpoint miss
};

}  // namespace

DistanceResult distance(const MetricModel& m, const Vec& p, const Vec& q,
                        const SolverOptions& opts) {
  const int n = m.dim();
  if (!m.domain.contains(p) || !m.domain.contains(q))
    throw DomainError("distance: endpoint outside chart domain");

  DistanceResult res;
  if ((p - q).norm() < 1e-15) {
    res.converged = true;
    res.path.metric = m;
    return res;
  }

  double L0 = opts.max_length > 0.0 ? opts.max_length : segment_length(m, p, q) * 1.02 + 1e-6;

  int fan = opts.fan_size > 0 ? opts.fan_size : (n == 2 ? 64 : 256);
  std::vector<Vec> dirs = direction_grid(n, fan);

  double coarse_h = std::min(opts.step.step * opts.coarse_factor, std::max(L0 / 64.0, opts.step.step));

  std::vector<Candidate> cands(dirs.size());
  parallel_for(static_cast<int>(dirs.size()), opts.threads, [&](int i) {
    Vec u = normalize_direction(m, p, dirs[static_cast<size_t>(i)]);
    GeodesicPath path = integrate_once(m, p, u, L0, coarse_h, CurvatureOptions{});
    auto [sb, miss] = closest_approach(path, q);
    cands[static_cast<size_t>(i)] = {dirs[static_cast<size_t>(i)], sb, miss};
  });

  std::vector<int> order(cands.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return cands[static_cast<size_t>(a)].miss < cands[static_cast<size_t>(b)].miss; });

  // pick diverse top candidates
  double min_dot = std::cos(3.0 * (n == 2 ? 2.0 * M_PI / fan : std::sqrt(4.0 * M_PI / fan)));
  std::vector<Candidate> picked;
  for (int idx : order) {
    const Candidate& c = cands[static_cast<size_t>(idx)];
    bool close = false;
    for (const Candidate& pc : picked)
      if (pc.u0.dot(c.u0) > min_dot) close = true;
    if (!close) picked.push_back(c);
    if (static_cast<int>(picked.size()) >= opts.refine_top) break;
  }

  // damped Newton on (angles, s) -> x(s) - q, Jacobian by finite differences
  struct Refined {
    double s = std::numeric_limits<double>::infinity();
    double miss = std::numeric_limits<double>::infinity();
    Vec u;
    bool converged = false;
  };
  std::vector<Refined> refined(picked.size());

  const double h_fine = opts.step.step;
  auto integrate_to = [&](const Vec& u_euclid, double len) {
    Vec u = normalize_direction(m, p, u_euclid);
    return integrate_once(m, p, u, len, h_fine, CurvatureOptions{});
  };

  parallel_for(static_cast<int>(picked.size()), opts.threads, [&](int ci) {
    const Candidate& cand = picked[static_cast<size_t>(ci)];
    Vec u = cand.u0;
    double s_cur = std::max(cand.s0, 4.0 * h_fine);
    double buffer = std::max(20.0 * h_fine, 0.02 * L0);

    GeodesicPath path = integrate_to(u, std::min(s_cur + buffer, L0 * 1.05));
    auto [sb, miss] = closest_approach(path, q);
    s_cur = sb;
    double miss_cur = miss;

    for (int it = 0; it < opts.max_iterations && miss_cur > opts.endpoint_tol; ++it) {
      Vec xq, vq;
      path.at(s_cur, xq, vq);
      Vec r = xq - q;

      Mat basis = complement_basis(u / u.norm());
      Mat J(n, n);
      J.col(n - 1) = vq;
      double da = 1e-6;
      for (int mcol = 0; mcol < n - 1; ++mcol) {
        Vec u_pert = u + da * basis.col(mcol);
        GeodesicPath pp = integrate_to(u_pert, std::min(s_cur + buffer, L0 * 1.05));
        Vec xp = pp.point_at(std::min(s_cur, pp.total_length));
        J.col(mcol) = (xp - xq) / da;
      }

      Eigen::FullPivLU<Mat> lu(J);
      if (!lu.isInvertible()) break;
      Vec delta = lu.solve(-r);

      double t = 1.0;
      bool improved = false;
      for (int halve = 0; halve < 10; ++halve, t *= 0.5) {
        Vec u_new = u;
        for (int mcol = 0; mcol < n - 1; ++mcol) u_new += t * delta[mcol] * basis.col(mcol);
        double s_new = s_cur + t * delta[n - 1];
        if (s_new <= 2.0 * h_fine || s_new > L0 * 1.2) continue;
        GeodesicPath pnew = integrate_to(u_new, std::min(s_new + buffer, L0 * 1.25));
        if (pnew.total_length < s_new - 1e-12) continue;  // truncated too early
        Vec x_new = pnew.point_at(s_new);
        double miss_new = (x_new - q).norm();
        if (miss_new < miss_cur) {
          u = u_new;
          s_cur = s_new;
          miss_cur = miss_new;
          path = std::move(pnew);
          improved = true;
          break;
        }
      }
      if (!improved) break;
    }

    Refined out;
    out.s = s_cur;
    out.miss = miss_cur;
    out.u = u;
    out.converged = miss_cur <= opts.endpoint_tol;
    refined[static_cast<size_t>(ci)] = out;
  });

  // shortest converged candidate, else the best miss
  const Refined* best = nullptr;
  for (const Refined& r : refined) {
    if (best == nullptr) {
      best = &r;
      continue;
    }
    bool better = (r.converged && !best->converged) ||
                  (r.converged == best->converged &&
                   (r.converged ? r.s < best->s : r.miss < best->miss));
    if (better) best = &r;
  }
  if (best == nullptr) throw IntegrationError("distance: no shooting candidates");

  Vec u_final = normalize_direction(m, p, best->u);
  res.path = integrate_once(m, p, u_final, best->s, h_fine, CurvatureOptions{});
  res.distance = best->s;
  res.converged = best->converged;
  res.endpoint_miss = best->miss;
  return res;
}

// ---------------------------------------------------------------------------
// Parallel transport and frames
// ---------------------------------------------------------------------------

namespace {

// Transport matrix M(s)^i_j = -Gamma^i_jk(gamma, gamma') gamma'^k.
Mat transport_matrix(const MetricModel& m, const GeodesicPath& path, double t,
                     const CurvatureOptions& copts) {
  Vec xq, vq;
  path.at(t, xq, vq);
  HorizontalCoefficients hc = chern_coefficients(m, {xq, vq}, copts);
  const int n = m.dim();
  Mat M = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += hc.gamma(i, j, k) * vq[k];
      M(i, j) = -acc;
    }
  return M;
}

// Jointly transports the columns of U along the path (linear ODE, RK4).
std::vector<Mat> transport_columns(const MetricModel& m, const GeodesicPath& path,
                                   const Mat& U0, const CurvatureOptions& copts) {
  std::vector<Mat> out;
  out.reserve(path.x.size());
  Mat U = U0;
  out.push_back(U);
  Mat M0 = transport_matrix(m, path, path.s.front(), copts);
  for (size_t i = 0; i + 1 < path.s.size(); ++i) {
    double h = path.s[i + 1] - path.s[i];
    Mat Mm = transport_matrix(m, path, path.s[i] + 0.5 * h, copts);
    Mat M1 = transport_matrix(m, path, path.s[i + 1], copts);
    Mat k1 = M0 * U;
    Mat k2 = Mm * (U + 0.5 * h * k1);
    Mat k3 = Mm * (U + 0.5 * h * k2);
    Mat k4 = M1 * (U + h * k3);
    U += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back(U);
    M0 = M1;
  }
  return out;
}

}  // namespace

std::vector<Vec> parallel_transport(const MetricModel& m, const GeodesicPath& path,
                                    const Vec& U0, const CurvatureOptions& copts) {
  if (path.empty()) throw IntegrationError("parallel_transport: empty path");
  Mat col(U0.size(), 1);
  col.col(0) = U0;
  std::vector<Mat> cols = transport_columns(m, path, col, copts);
  std::vector<Vec> out;
  out.reserve(cols.size());
  for (const Mat& c : cols) out.push_back(c.col(0));
  return out;
}

Mat FrameField::at(double t) const {
  if (frames.empty()) throw IntegrationError("empty frame field");
  t = std::clamp(t, s.front(), s.back());
  auto it = std::upper_bound(s.begin(), s.end(), t);
  size_t i = (it == s.begin()) ? 0 : static_cast<size_t>(it - s.begin()) - 1;
  if (i + 1 >= s.size()) return frames.back();
  double u = (t - s[i]) / (s[i + 1] - s[i]);
  return (1.0 - u) * frames[i] + u * frames[i + 1];
}

FrameField orthonormal_frame(const MetricModel& m, const GeodesicPath& path,
                             const CurvatureOptions& copts) {
  if (path.empty()) throw IntegrationError("orthonormal_frame: empty path");
  const int n = m.dim();
  Mat g0 = fundamental_tensor(m, {path.x.front(), path.v.front()}).g;

  // Gram-Schmidt in the g_{(x0,y0)} inner product; E_n = gamma'(0).
  Mat E(n, n);
  Vec t0 = path.v.front();
  t0 /= std::sqrt(t0.dot(g0 * t0));
  E.col(n - 1) = t0;
  int built = 0;
  for (int cand = 0; cand < n && built < n - 1; ++cand) {
    Vec w = Vec::Zero(n);
    w[cand] = 1.0;
    w -= t0.dot(g0 * w) * t0;
    for (int j = 0; j < built; ++j) {
      Vec ej = E.col(j);
      w -= ej.dot(g0 * w) * ej;
    }
    double nrm = std::sqrt(std::max(0.0, w.dot(g0 * w)));
    if (nrm < 1e-8) continue;
    E.col(built++) = w / nrm;
  }
  if (built != n - 1) throw IntegrationError("orthonormal_frame: Gram-Schmidt failed");

  FrameField ff;
  ff.s = path.s;
  ff.frames = transport_columns(m, path, E, copts);
  return ff;
}

// ---------------------------------------------------------------------------
// Variations and integrals along paths
// ---------------------------------------------------------------------------

double PiecewisePhi::operator()(double t) const {
  for (const Piece& p : pieces)
    if (t >= p.lo - 1e-12 && t <= p.hi + 1e-12) return p.value(std::clamp(t, p.lo, p.hi));
  return 0.0;
}

double PiecewisePhi::deriv(double t) const {
  for (const Piece& p : pieces)
    if (t >= p.lo - 1e-12 && t <= p.hi + 1e-12) return p.deriv(std::clamp(t, p.lo, p.hi));
  return 0.0;
}

PiecewisePhi PiecewisePhi::ramp_plateau(double r) {
  PiecewisePhi phi;
  if (r <= 2.0) {
    // degenerate plateau: tent function
    double mid = r / 2.0;
    phi.pieces.push_back({0.0, mid, [](double t) { return t; }, [](double) { return 1.0; }});
    phi.pieces.push_back({mid, r, [r](double t) { return r - t; }, [](double) { return -1.0; }});
    return phi;
  }
  phi.pieces.push_back({0.0, 1.0, [](double t) { return t; }, [](double) { return 1.0; }});
  phi.pieces.push_back({1.0, r - 1.0, [](double) { return 1.0; }, [](double) { return 0.0; }});
  phi.pieces.push_back({r - 1.0, r, [r](double t) { return r - t; }, [](double) { return -1.0; }});
  return phi;
}

PiecewisePhi PiecewisePhi::sine(double r, int k) {
  PiecewisePhi phi;
  double w = k * M_PI / r;
  phi.pieces.push_back({0.0, r, [w](double t) { return std::sin(w * t); },
                        [w](double t) { return w * std::cos(w * t); }});
  return phi;
}

PiecewisePhi PiecewisePhi::scaled(const PiecewisePhi& phi, double c) {
  PiecewisePhi out;
  for (const Piece& p : phi.pieces) {
    auto val = p.value;
    auto der = p.deriv;
    out.pieces.push_back({p.lo, p.hi, [val, c](double t) { return c * val(t); },
                          [der, c](double t) { return c * der(t); }});
  }
  return out;
}

double second_variation(const MetricModel& m, const GeodesicPath& path,
                        const VariationSpec& spec, const FrameField* frame,
                        const SecondVariationOptions& opts) {
  const int n = m.dim();
  if (spec.frame_index < 1 || spec.frame_index > n - 1)
    throw FinslerError("second_variation: frame index must name a transverse field (1..n-1)");
  if (path.samples() < 3) throw IntegrationError("second_variation: path too short");

  FrameField local;
  if (frame == nullptr) {
    local = orthonormal_frame(m, path, opts.curvature);
    frame = &local;
  }
  const int col = spec.frame_index - 1;
  const double r = path.total_length;

  // endpoint values must vanish for the boundary term to drop
  if (std::abs(spec.phi(0.0)) > 1e-9 || std::abs(spec.phi(r)) > 1e-9)
    throw FinslerError("second_variation: phi must vanish at the endpoints");

  auto integrand = [&](double t) {
    double ph = spec.phi(t);
    double dph = spec.phi.deriv(t);
    Vec xq, vq;
    path.at(t, xq, vq);
    PointDirection pd{xq, vq};
    CurvatureData cd = reduced_curvature(m, pd, opts.curvature);
    Mat g = toEigen(metric_tensor_eval(m, xq, toVecT(vq)));
    double f2 = f2_eval(m, xq, toVecT(vq));
    Vec Ei = frame->at(t).col(col);
    double flag = Ei.dot(g * (cd.R * Ei));  // R_jk E^j E^k with R_jk = g_jl R^l_k
    return dph * dph - ph * ph * f2 * flag;
  };

  // integrate piecewise so that phi's breakpoints stay quadrature nodes
  double total = 0.0;
  for (const PiecewisePhi::Piece& piece : spec.phi.pieces) {
    double a = std::max(0.0, piece.lo), b = std::min(r, piece.hi);
    if (b <= a) continue;
    int mseg = std::max(8, static_cast<int>(std::ceil((b - a) / opts.node_spacing)));
    total += simpson(integrand, a, b, mseg);
  }
  return total;
}

RicciIntegral ricci_integral(const MetricModel& m, const GeodesicPath& path,
                             const CurvatureOptions& copts) {
  if (path.samples() < 2) return {};
  std::vector<double> vals(path.x.size());
  parallel_for(static_cast<int>(path.x.size()), 1, [&](int i) {
    vals[static_cast<size_t>(i)] =
        reduced_curvature(m, {path.x[static_cast<size_t>(i)], path.v[static_cast<size_t>(i)]}, copts).ric;
  });
  RicciIntegral out;
  out.value = integrate_samples(path.s, vals);

  // half-resolution estimate
  std::vector<double> s2, f2;
  for (size_t i = 0; i < vals.size(); i += 2) {
    s2.push_back(path.s[i]);
    f2.push_back(vals[i]);
  }
  if (s2.back() != path.s.back()) {
    s2.push_back(path.s.back());
    f2.push_back(vals.back());
  }
  double coarse = integrate_samples(s2, f2);
  out.error_estimate = std::abs(out.value - coarse) / 15.0;
  return out;
}

}  // namespace finlab
