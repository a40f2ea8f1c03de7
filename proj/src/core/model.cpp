#include "model.hpp"

#include <cmath>
#include <limits>

namespace bridge {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLog2 = 0.69314718055994530942;
}  // namespace

double abs_pow(double b, double alpha) {
  if (b == 0.0) return 0.0;
  return std::exp(alpha * std::log(std::fabs(b)));
}

double log_gamma_density(double x, double shape, double rate) {
  if (x <= 0.0) throw ValidationError("log_gamma_density: x must be > 0");
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double log_likelihood(const Dataset& d, const Vector& beta, double gamma) {
  if (beta.size() != d.p()) throw ValidationError("log_likelihood: beta dimension mismatch");
  if (gamma <= 0.0) throw ValidationError("log_likelihood: gamma must be > 0");
  const double rss = (d.y - d.X * beta).squaredNorm();
  const double n = static_cast<double>(d.n());
  return 0.5 * n * (std::log(gamma) - kLog2Pi) - 0.5 * gamma * rss;
}

double log_prior_beta(const Vector& beta, double gamma, const Vector& lambda, double alpha) {
  if (gamma <= 0.0 || alpha <= 0.0) throw ValidationError("log_prior_beta: gamma, alpha must be > 0");
  if (beta.size() != lambda.size()) throw ValidationError("log_prior_beta: dimension mismatch");
  const double inv_a = 1.0 / alpha;
  const double per_coord = std::log(alpha) - (inv_a + 1.0) * kLog2 - std::lgamma(inv_a);
  double out = 0.0;
  for (Eigen::Index i = 0; i < beta.size(); ++i) {
    if (lambda[i] <= 0.0) throw ValidationError("log_prior_beta: lambda entries must be > 0");
    out += per_coord + inv_a * std::log(gamma * lambda[i]) - 0.5 * gamma * lambda[i] * abs_pow(beta[i], alpha);
  }
  return out;
}

double prior_beta_variance(double gamma, double lambda_i, double alpha) {
  if (gamma <= 0.0 || lambda_i <= 0.0 || alpha <= 0.0)
    throw ValidationError("prior_beta_variance: arguments must be > 0");
  const double inv_a = 1.0 / alpha;
  return std::exp(std::lgamma(3.0 * inv_a) - std::lgamma(inv_a) -
                  2.0 * inv_a * std::log(gamma * lambda_i) + inv_a * std::log(4.0));
}

double log_cond_beta_i(Eigen::Index i, const ChainState& s, const Dataset& d) {
  if (i < 0 || i >= s.beta.size()) throw ValidationError("log_cond_beta_i: index out of range");
  const double rss = (d.y - d.X * s.beta).squaredNorm();
  return -0.5 * s.gamma * s.lambda[i] * abs_pow(s.beta[i], s.alpha) - 0.5 * s.gamma * rss;
}

double log_cond_alpha(const ChainState& s, const Dataset& d) {
  (void)d;
  const double alpha = s.alpha;
  if (alpha <= 0.0) throw ValidationError("log_cond_alpha: alpha must be > 0");
  const double inv_a = 1.0 / alpha;
  const double p = static_cast<double>(s.beta.size());
  double sum_log_lambda = 0.0;
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < s.beta.size(); ++i) {
    sum_log_lambda += std::log(s.lambda[i]);
    penalty += s.lambda[i] * abs_pow(s.beta[i], alpha);
  }
  return p * (std::log(alpha) + inv_a * std::log(s.gamma) - inv_a * kLog2 - std::lgamma(inv_a)) +
         inv_a * sum_log_lambda - 0.5 * s.gamma * penalty;
}

GammaParams gamma_cond_params(const ChainState& s, const Dataset& d, const Hyperparams& h) {
  const double rss = (d.y - d.X * s.beta).squaredNorm();
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < s.beta.size(); ++i)
    penalty += s.lambda[i] * abs_pow(s.beta[i], s.alpha);
  const double n = static_cast<double>(d.n());
  const double p = static_cast<double>(s.beta.size());
  return {h.e3 + 0.5 * n + p / s.alpha, h.f3 + 0.5 * (rss + penalty)};
}

GammaParams lambda_cond_params(Eigen::Index i, const ChainState& s, const Hyperparams& h) {
  if (i < 0 || i >= s.beta.size()) throw ValidationError("lambda_cond_params: index out of range");
  const double inv_a = 1.0 / s.alpha;
  const double data_term = 0.5 * s.gamma * abs_pow(s.beta[i], s.alpha);
  if (s.kappa[i])
    return {h.e2 + inv_a, h.f2 + data_term};
  return {h.e1 + inv_a, h.f1 + data_term};
}

double kappa_prob(double lambda_i, const Hyperparams& h) {
  if (lambda_i <= 0.0) throw ValidationError("kappa_prob: lambda must be > 0");
  const double lw1 = log_gamma_density(lambda_i, h.e1, h.f1);
  const double lw2 = log_gamma_density(lambda_i, h.e2, h.f2);
  const double m = std::max(lw1, lw2);
  const double z = std::exp(lw1 - m) + std::exp(lw2 - m);
  return std::exp(lw2 - m) / z;
}

double log_posterior(const ChainState& s, const Dataset& d, const Hyperparams& h) {
  double out = log_likelihood(d, s.beta, s.gamma);
  out += log_prior_beta(s.beta, s.gamma, s.lambda, s.alpha);
  for (Eigen::Index i = 0; i < s.beta.size(); ++i) {
    const double lw1 = log_gamma_density(s.lambda[i], h.e1, h.f1);
    const double lw2 = log_gamma_density(s.lambda[i], h.e2, h.f2);
    out += s.kappa[i] ? lw2 : lw1;
    out += std::log(0.5);  // Bernoulli(1/2) on kappa_i
  }
  out += log_gamma_density(s.gamma, h.e3, h.f3);
  if (s.alpha < h.k1 || s.alpha > h.k2) return -std::numeric_limits<double>::infinity();
  out -= std::log(h.k2 - h.k1);
  return out;
}

}  // namespace bridge
