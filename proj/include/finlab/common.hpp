#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace finlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr const char* kVersion = "0.1.0";

// Smallest admissible F(x,y); evaluations below this are treated as degenerate.
inline constexpr double kDegenerateF = 1e-12;

// Rank-3 array of doubles, n x n x n.
class Ten3 {
 public:
  Ten3() = default;
  explicit Ten3(int n) : n_(n), d_(static_cast<size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return d_[idx(i, j, k)]; }
  double operator()(int i, int j, int k) const { return d_[idx(i, j, k)]; }

  void setZero() { std::fill(d_.begin(), d_.end(), 0.0); }
  double maxAbs() const {
    double m = 0.0;
    for (double v : d_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(i) * n_ + j) * n_ + k;
  }
  int n_ = 0;
  std::vector<double> d_;
};

struct FinslerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : FinslerError {
  using FinslerError::FinslerError;
};

struct DegenerateDirectionError : FinslerError {
  using FinslerError::FinslerError;
};

// Strong convexity failed: the y-Hessian of F^2/2 is not positive definite.
struct NonConvexMetricError : FinslerError {
  using FinslerError::FinslerError;
};

struct SingularMatrixError : FinslerError {
  using FinslerError::FinslerError;
};

struct InvalidModelError : FinslerError {
  using FinslerError::FinslerError;
};

struct IntegrationError : FinslerError {
  using FinslerError::FinslerError;
};

struct BallExitsChartError : FinslerError {
  using FinslerError::FinslerError;
};

struct HypothesisViolatedError : FinslerError {
  using FinslerError::FinslerError;
};

}  // namespace finlab
