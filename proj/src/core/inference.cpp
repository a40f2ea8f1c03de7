#include "inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bridge {

double sample_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw ValidationError("sample_quantile: empty sample");
  if (!(level >= 0.0 && level <= 1.0)) throw ValidationError("sample_quantile: level outside [0,1]");
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * level;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

EssResult batch_means_ess(const Eigen::Ref<const Vector>& chain) {
  const Eigen::Index m = chain.size();
  if (m < 100) throw ValidationError("batch_means_ess: need at least 100 draws");
  const double mean = chain.mean();
  const double var = (chain.array() - mean).square().sum() / (m - 1);
  if (var <= 0.0) return {1.0, 0.0};  // constant chain: floor

  const auto b = static_cast<Eigen::Index>(std::floor(std::sqrt(static_cast<double>(m))));
  const Eigen::Index a = m / b;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < a; ++k) {
    const double bm = chain.segment(k * b, b).mean();
    acc += (bm - mean) * (bm - mean);
  }
  const double sigma2 = static_cast<double>(b) * acc / (a - 1);
  if (sigma2 <= 0.0) return {static_cast<double>(m), std::sqrt(var / m)};
  const double ess = std::clamp(m * var / sigma2, 1.0, static_cast<double>(m));
  return {ess, std::sqrt(sigma2 / m)};
}

PosteriorSummary summarize(const ChainOutput& out, const std::vector<double>& levels,
                           double select_level) {
  if (out.num_draws() < 2) throw ValidationError("summarize: need at least 2 draws");
  const Eigen::Index p = out.p;
  PosteriorSummary s;
  s.levels = levels;
  s.select_level = select_level;
  s.beta_mean = out.beta_draws().colwise().mean().transpose();
  s.gamma_mean = out.gamma_draws().mean();
  s.alpha_mean = out.alpha_draws().mean();

  s.beta_quantiles.resize(p, static_cast<Eigen::Index>(levels.size()));
  for (Eigen::Index i = 0; i < p; ++i) {
    std::vector<double> col(out.draws.col(i).data(), out.draws.col(i).data() + out.num_draws());
    for (std::size_t q = 0; q < levels.size(); ++q)
      s.beta_quantiles(i, static_cast<Eigen::Index>(q)) = sample_quantile(col, levels[q]);
  }
  s.alpha_quantiles.resize(static_cast<Eigen::Index>(levels.size()));
  {
    std::vector<double> col(out.alpha_draws().data(), out.alpha_draws().data() + out.num_draws());
    for (std::size_t q = 0; q < levels.size(); ++q)
      s.alpha_quantiles[static_cast<Eigen::Index>(q)] = sample_quantile(col, levels[q]);
  }
  s.selected = select_variables(out, select_level);

  const Eigen::Index dim = out.dim();
  s.ess.resize(dim);
  s.mcse.resize(dim);
  if (out.num_draws() >= 100) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      Vector col = out.draws.col(j);
      const auto r = batch_means_ess(col);
      s.ess[j] = r.ess;
      s.mcse[j] = r.mcse;
    }
  } else {
    s.ess.setConstant(1.0);
    s.mcse.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return s;
}

std::vector<std::uint8_t> select_variables(const ChainOutput& out, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("select_variables: level outside (0,1)");
  const double tail = 0.5 * (1.0 - level);
  std::vector<std::uint8_t> sel(out.p, 0);
  for (Eigen::Index i = 0; i < out.p; ++i) {
    std::vector<double> col(out.draws.col(i).data(), out.draws.col(i).data() + out.num_draws());
    const double lo = sample_quantile(col, tail);
    const double hi = sample_quantile(col, 1.0 - tail);
    sel[i] = (lo > 0.0 || hi < 0.0) ? 1 : 0;
  }
  return sel;
}

Vector predict_mean(const Matrix& X_new, const ChainOutput& out) {
  if (X_new.cols() != out.p) throw ValidationError("predict_mean: column count mismatch");
  const Vector beta_mean = out.beta_draws().colwise().mean().transpose();
  return X_new * beta_mean;
}

Matrix predictive_draws(const Matrix& X_new, const ChainOutput& out, RngStream& rng) {
  if (X_new.cols() != out.p) throw ValidationError("predictive_draws: column count mismatch");
  const Eigen::Index t = out.num_draws();
  Matrix draws(t, X_new.rows());
  for (Eigen::Index k = 0; k < t; ++k) {
    const Vector mu = X_new * out.beta_draws().row(k).transpose();
    const double sd = 1.0 / std::sqrt(out.gamma_draws()(k));
    for (Eigen::Index r = 0; r < X_new.rows(); ++r) draws(k, r) = mu[r] + sd * rng.normal();
  }
  return draws;
}

}  // namespace bridge
