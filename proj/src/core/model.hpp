#pragma once

#include "types.hpp"

namespace bridge {

// |b|^alpha via exp(alpha*log|b|), with |0|^alpha defined as 0 exactly.
double abs_pow(double b, double alpha);

// log Gamma(x; shape, rate) density at x.
double log_gamma_density(double x, double shape, double rate);

// (n/2) log(gamma/2pi) - (gamma/2) ||y - X beta||^2
double log_likelihood(const Dataset& d, const Vector& beta, double gamma);

// Exponential-power prior on beta given (gamma, lambda, alpha); normalized.
double log_prior_beta(const Vector& beta, double gamma, const Vector& lambda, double alpha);

// Gamma(3/a)/Gamma(1/a) * (gamma*lambda)^(-2/a) * 4^(1/a)
double prior_beta_variance(double gamma, double lambda_i, double alpha);

// Unnormalized log full conditional of beta_i, other coordinates at state values.
double log_cond_beta_i(Eigen::Index i, const ChainState& s, const Dataset& d);

// Unnormalized log full conditional of alpha (support handled by the sampler).
double log_cond_alpha(const ChainState& s, const Dataset& d);

struct GammaParams {
  double shape;
  double rate;
};

GammaParams gamma_cond_params(const ChainState& s, const Dataset& d, const Hyperparams& h);

GammaParams lambda_cond_params(Eigen::Index i, const ChainState& s, const Hyperparams& h);

// P(kappa_i = 1 | lambda_i): slab-component responsibility, log-sum-exp combined.
double kappa_prob(double lambda_i, const Hyperparams& h);

// Full unnormalized log posterior log q(beta,gamma,lambda,alpha,kappa | y).
double log_posterior(const ChainState& s, const Dataset& d, const Hyperparams& h);

}  // namespace bridge
