#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "finlab/curvature.hpp"

namespace finlab {

struct StepControl {
  double step = 1e-3;          // arc-length step of the fixed-step RK4
  bool error_estimate = false; // re-integrate at h/2 and compare endpoints
  double tolerance = 1e-6;     // endpoint tolerance for the estimate
  int max_refinements = 3;     // halvings attempted before step-collapse
};

// Arc-length-parameterized discrete trajectory with Hermite interpolation.
// Immutable after construction.
class GeodesicPath {
 public:
  std::vector<double> s;
  std::vector<Vec> x;
  std::vector<Vec> v;
  double total_length = 0.0;
  bool truncated = false;       // stopped at the chart boundary
  double endpoint_error = -1.0; // step-halving estimate when requested
  MetricModel metric;

  int samples() const { return static_cast<int>(s.size()); }
  bool empty() const { return s.empty(); }

  // Cubic-Hermite position and velocity at arc length t (clamped to range).
  void at(double t, Vec& xq, Vec& vq) const;
  Vec point_at(double t) const;

  void write_csv(const std::string& path) const;
};

GeodesicPath integrate_geodesic(const MetricModel& m, const Vec& x0, const Vec& y0,
                                double length, const StepControl& ctrl = {},
                                const CurvatureOptions& copts = {});

// Finslerian length of the straight chart segment p -> q by quadrature; an
// upper bound for the distance.
double segment_length(const MetricModel& m, const Vec& p, const Vec& q, int nodes = 64);

struct SolverOptions {
  int fan_size = 0;            // 0 -> 64 for n=2, 256 for n=3
  int refine_top = 4;
  double endpoint_tol = 1e-6;  // chart units
  StepControl step;            // fine integration control
  double coarse_factor = 8.0;  // fan scan step multiplier
  double max_length = 0.0;     // 0 -> segment-length heuristic
  int max_iterations = 40;
  unsigned threads = 1;
};

struct DistanceResult {
  double distance = 0.0;
  GeodesicPath path;
  bool converged = false;
  double endpoint_miss = 0.0;
};

// Asymmetric distance d(p, q) by multi-start shooting. The returned geodesic
// is the shortest one found; global minimality is asserted, not certified.
DistanceResult distance(const MetricModel& m, const Vec& p, const Vec& q,
                        const SolverOptions& opts = {});

// Parallel transport of U0 along a unit-speed geodesic with the horizontal
// (Chern) coefficients; one entry per path sample.
std::vector<Vec> parallel_transport(const MetricModel& m, const GeodesicPath& path,
                                    const Vec& U0, const CurvatureOptions& copts = {});

// g-orthonormal moving frame: Gram-Schmidt at the start, then parallel
// transport. Columns are E_1..E_n with E_n the transported velocity.
class FrameField {
 public:
  std::vector<double> s;
  std::vector<Mat> frames;

  Mat at(double t) const;  // linear interpolation between samples
};

FrameField orthonormal_frame(const MetricModel& m, const GeodesicPath& path,
                             const CurvatureOptions& copts = {});

// phi on [0, r]: breakpoints + closed-form pieces with derivatives.
struct PiecewisePhi {
  struct Piece {
    double lo, hi;
    std::function<double(double)> value;
    std::function<double(double)> deriv;
  };
  std::vector<Piece> pieces;

  double operator()(double t) const;
  double deriv(double t) const;

  // the ramp--plateau--ramp profile: s on [0,1], 1 on [1,r-1], r-s on [r-1,r]
  static PiecewisePhi ramp_plateau(double r);
  // sin(k pi s / r)
  static PiecewisePhi sine(double r, int k = 1);
  static PiecewisePhi scaled(const PiecewisePhi& phi, double c);
};

struct VariationSpec {
  PiecewisePhi phi;
  int frame_index = 1;  // 1-based, transverse fields only (1..n-1)
};

struct SecondVariationOptions {
  double node_spacing = 5e-3;  // quadrature node spacing along the path
  CurvatureOptions curvature;
};

// L''(0) for the variation U = phi E_i of a unit-speed geodesic with fixed
// endpoints.
double second_variation(const MetricModel& m, const GeodesicPath& path,
                        const VariationSpec& spec, const FrameField* frame = nullptr,
                        const SecondVariationOptions& opts = {});

struct RicciIntegral {
  double value = 0.0;
  double error_estimate = 0.0;
};

// Integral of ric(gamma, gamma') over the path samples (composite Simpson),
// with a half-resolution error estimate.
RicciIntegral ricci_integral(const MetricModel& m, const GeodesicPath& path,
                             const CurvatureOptions& copts = {});

}  // namespace finlab
