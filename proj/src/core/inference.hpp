#pragma once

#include "rng.hpp"
#include "types.hpp"

#include <vector>

namespace bridge {

// Type-7 empirical quantile (linear interpolation of order statistics).
double sample_quantile(std::vector<double> values, double level);

struct EssResult {
  double ess;   // clamped to [1, M]
  double mcse;  // batch-means Monte Carlo standard error of the mean
};

// Batch-means ESS with batch size floor(sqrt(M)). A constant sequence reports
// the floor value 1.
EssResult batch_means_ess(const Eigen::Ref<const Vector>& chain);

struct PosteriorSummary {
  Vector beta_mean;
  std::vector<double> levels;
  Matrix beta_quantiles;   // p x levels
  double gamma_mean = 0.0;
  Vector alpha_quantiles;  // per level
  double alpha_mean = 0.0;
  std::vector<std::uint8_t> selected;
  Vector ess;              // per parameter column of the draw matrix
  Vector mcse;
  double select_level = 0.95;
};

PosteriorSummary summarize(const ChainOutput& out,
                           const std::vector<double>& levels = {0.025, 0.25, 0.5, 0.75, 0.975},
                           double select_level = 0.95);

// Coordinate selected iff its equal-tailed credible interval excludes 0.
std::vector<std::uint8_t> select_variables(const ChainOutput& out, double level = 0.95);

Vector predict_mean(const Matrix& X_new, const ChainOutput& out);

// Row t: draw from N(X_new beta^(t), 1/gamma^(t) I).
Matrix predictive_draws(const Matrix& X_new, const ChainOutput& out, RngStream& rng);

}  // namespace bridge
