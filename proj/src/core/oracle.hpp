#pragma once

#include "types.hpp"

#include <variant>
#include <vector>

namespace bridge {

// One-dimensional model of the tail-robustness setup: Y|beta ~ N(beta,1),
// bridge prior on beta with the lambda mixture integrated analytically,
// alpha uniform on [k1,k2], gamma fixed at 1.
struct OneDimModel {
  double e1 = 1.0, f1 = 1.0;
  double e2 = 1.0, f2 = 1.0;
  double k1 = 0.5, k2 = 4.0;
  int alpha_nodes = 200;

  void validate() const {
    if (e1 <= 0 || f1 <= 0 || e2 <= 0 || f2 <= 0)
      throw ValidationError("onedim: shape/rate values must be > 0");
    if (!(0 < k1 && k1 < k2)) throw ValidationError("onedim: need 0 < k1 < k2");
  }
};

// Prior marginal density of beta (lambda, kappa, alpha integrated out).
double prior_marginal_1d(double beta, const OneDimModel& m);

// Marginal density m(y); relative accuracy ~1e-8.
double marginal_m(double y, const OneDimModel& m);

// d/dy log m(y) by Richardson-refined central differences.
double dlog_marginal_m(double y, const OneDimModel& m);

// E(beta|y) = y + (log m)'(y).
double posterior_mean_1d(double y, const OneDimModel& m);

// E(beta|y) computed directly as a ratio of quadratures; independent route
// used to cross-check the derivative-based value.
double posterior_mean_1d_quad(double y, const OneDimModel& m);

struct RidgePosterior {
  Vector mean;
  Matrix cov;
};

// alpha=2 conjugate specialization: beta|y ~ N((X'X+L)^-1 X'y, (1/gamma)(X'X+L)^-1).
RidgePosterior ridge_posterior(const Dataset& d, const Vector& lambda, double gamma);

// Free coordinate of a grid posterior: one beta entry or alpha.
struct FreeBeta {
  Eigen::Index index;
};
struct FreeAlpha {};
using FreeCoord = std::variant<FreeBeta, FreeAlpha>;

struct GridAxis {
  FreeCoord coord;
  double lo, hi;
  int nodes;
};

struct GridPosterior {
  std::vector<GridAxis> axes;
  std::vector<std::vector<double>> node_values;  // per axis
  std::vector<double> probs;  // row-major over axes, sums to 1

  double mean(std::size_t axis) const;
};

// Exact unnormalized posterior evaluated on a bounded grid over at most two
// free coordinates; normalized by log-sum-exp. Errors if boundary mass
// indicates the grid is too narrow (beta axes only; alpha support is bounded).
GridPosterior grid_posterior(const Dataset& d, const ChainState& fixed, const Hyperparams& h,
                             const std::vector<GridAxis>& axes);

}  // namespace bridge
