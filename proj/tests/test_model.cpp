#include <doctest.h>

#include "core/model.hpp"
#include "core/quadrature.hpp"
#include "core/rng.hpp"

#include <cmath>

using namespace bridge;

namespace {

Dataset make_dataset(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  RngStream rng(seed, 99);
  Dataset d;
  d.X.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) d.X(i, j) = rng.normal();
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.y[i] = rng.normal();
  return d;
}

ChainState make_state(Eigen::Index p, double alpha, double gamma, double lambda) {
  ChainState s;
  s.beta = Vector::Zero(p);
  s.gamma = gamma;
  s.lambda = Vector::Constant(p, lambda);
  s.alpha = alpha;
  s.kappa.assign(p, 0);
  return s;
}

}  // namespace

TEST_CASE("log_likelihood closed cases") {
  Dataset d;
  d.y = Vector::Zero(1);
  d.X = Matrix::Ones(1, 1);
  Vector b = Vector::Zero(1);
  CHECK(log_likelihood(d, b, 1.0) == doctest::Approx(-0.5 * std::log(2.0 * M_PI)).epsilon(1e-12));

  // zero residual, n=2, gamma=4
  Dataset d2;
  d2.X = Matrix::Ones(2, 1);
  b = Vector::Constant(1, 3.0);
  d2.y = d2.X * b;
  CHECK(log_likelihood(d2, b, 4.0) == doctest::Approx(std::log(4.0 / (2.0 * M_PI))).epsilon(1e-12));
}

TEST_CASE("log_likelihood matches scalar-loop evaluation") {
  Dataset d = make_dataset(3, 2, 7);
  Vector b(2);
  b << 0.3, -1.2;
  const double gamma = 2.0;
  double rss = 0.0;
  for (int i = 0; i < 3; ++i) {
    double fit = 0.0;
    for (int j = 0; j < 2; ++j) fit += d.X(i, j) * b[j];
    rss += (d.y[i] - fit) * (d.y[i] - fit);
  }
  const double expect = 1.5 * std::log(gamma / (2.0 * M_PI)) - 0.5 * gamma * rss;
  CHECK(log_likelihood(d, b, gamma) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("log_prior_beta specializations") {
  Vector b(1), lam(1);
  // alpha=2, gamma=lambda=1 is standard normal
  b << 0.7;
  lam << 1.0;
  const double normal_logpdf = -0.5 * std::log(2.0 * M_PI) - 0.5 * 0.7 * 0.7;
  CHECK(log_prior_beta(b, 1.0, lam, 2.0) == doctest::Approx(normal_logpdf).epsilon(1e-12));
  // alpha=1, gamma=lambda=1, beta=0: normalizer gamma*lambda/4
  b << 0.0;
  CHECK(log_prior_beta(b, 1.0, lam, 1.0) == doctest::Approx(std::log(0.25)).epsilon(1e-12));
}

TEST_CASE("log_prior_beta integrates to one per coordinate") {
  for (double alpha : {0.5, 1.0, 1.5, 2.0, 4.0}) {
    Vector lam = Vector::Constant(1, 3.0);
    auto f = [&](double x) {
      Vector b = Vector::Constant(1, x);
      return std::exp(log_prior_beta(b, 2.0, lam, alpha));
    };
    const auto q = integrate_adaptive(f, -60.0, 60.0, 1e-10);
    CHECK(q.converged);
    CHECK(q.value == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("prior_beta_variance closed cases and quadrature agreement") {
  CHECK(prior_beta_variance(1.0, 1.0, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(prior_beta_variance(1.0, 1.0, 1.0) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(prior_beta_variance(1.0, 2.0, 1.0) < prior_beta_variance(1.0, 1.0, 1.0));

  RngStream rng(11, 0);
  for (int k = 0; k < 20; ++k) {
    const double gamma = 0.5 + 2.0 * rng.uniform();
    const double lam = 0.5 + 2.0 * rng.uniform();
    const double alpha = 0.6 + 2.5 * rng.uniform();
    Vector lv = Vector::Constant(1, lam);
    auto f = [&](double x) {
      Vector b = Vector::Constant(1, x);
      return x * x * std::exp(log_prior_beta(b, gamma, lv, alpha));
    };
    const double sd = std::sqrt(prior_beta_variance(gamma, lam, alpha));
    // piecewise panels keep the adaptive rule from converging on the flat tail
    const double q = 2.0 * (integrate_adaptive(f, 0.0, 2.0 * sd, 1e-12).value +
                            integrate_adaptive(f, 2.0 * sd, 10.0 * sd, 1e-12).value +
                            integrate_adaptive(f, 10.0 * sd, 80.0 * sd, 1e-12).value);
    CHECK(q == doctest::Approx(prior_beta_variance(gamma, lam, alpha)).epsilon(1e-6));
  }
}

TEST_CASE("prior_beta_variance matches Monte Carlo prior draws") {
  // |beta|^alpha ~ Gamma(1/alpha, gamma*lambda/2) gives an exact sampler.
  const double gamma = 2.0, lam = 3.0, alpha = 1.5;
  RngStream rng(5, 1);
  const int N = 1000000;
  double sum_sq = 0.0;
  for (int i = 0; i < N; ++i) {
    const double g = rng.gamma(1.0 / alpha, 0.5 * gamma * lam);
    const double mag = std::pow(g, 1.0 / alpha);
    sum_sq += mag * mag;
  }
  const double mc_var = sum_sq / N;  // mean is 0 by symmetry
  CHECK(mc_var == doctest::Approx(prior_beta_variance(gamma, lam, alpha)).epsilon(0.01));
}

TEST_CASE("log_cond_beta_i: ridge conditional matches Gaussian closed form") {
  Dataset d = make_dataset(5, 1, 3);
  ChainState s = make_state(1, 2.0, 1.5, 2.5);
  const double xx = d.X.col(0).squaredNorm();
  const double xy = d.X.col(0).dot(d.y);
  const double mean = xy / (xx + s.lambda[0]);
  const double var = 1.0 / (s.gamma * (xx + s.lambda[0]));

  auto density = [&](double b) {
    ChainState t = s;
    t.beta[0] = b;
    return std::exp(log_cond_beta_i(0, t, d));
  };
  const auto z = integrate_adaptive(density, mean - 12.0 * std::sqrt(var),
                                    mean + 12.0 * std::sqrt(var), 1e-12);
  REQUIRE(z.converged);
  for (double b : {mean - 1.0, mean - 0.2, mean, mean + 0.4, mean + 1.3}) {
    const double got = density(b) / z.value;
    const double want =
        std::exp(-0.5 * (b - mean) * (b - mean) / var) / std::sqrt(2.0 * M_PI * var);
    CHECK(got == doctest::Approx(want).epsilon(1e-6));
  }
}

TEST_CASE("log_cond_beta_i: tiny lambda gives the OLS-given-others mode") {
  Dataset d = make_dataset(8, 1, 13);
  ChainState s = make_state(1, 2.0, 1.0, 1e-12);
  const double ols = d.X.col(0).dot(d.y) / d.X.col(0).squaredNorm();
  // scan for the argmax near the OLS coordinate
  double best = -1e300, best_b = 0.0;
  for (double b = ols - 1.0; b <= ols + 1.0; b += 1e-4) {
    ChainState t = s;
    t.beta[0] = b;
    const double v = log_cond_beta_i(0, t, d);
    if (v > best) { best = v; best_b = b; }
  }
  CHECK(best_b == doctest::Approx(ols).epsilon(1e-3));
}

TEST_CASE("log_cond_beta_i: even in beta_i when y=0 and other coordinates zero") {
  Dataset d = make_dataset(6, 2, 17);
  d.y.setZero();
  ChainState s = make_state(2, 1.3, 1.0, 2.0);
  for (double c : {0.4, 1.7, 3.2}) {
    ChainState a = s, b = s;
    a.beta[0] = c;
    b.beta[0] = -c;
    CHECK(log_cond_beta_i(0, a, d) == doctest::Approx(log_cond_beta_i(0, b, d)).epsilon(1e-12));
  }
}

TEST_CASE("log_cond_alpha closed case and properties") {
  Dataset d = make_dataset(4, 1, 19);
  ChainState s = make_state(1, 2.0, 1.0, 1.0);
  // p=1, beta=0, lambda=gamma=1, alpha=2
  CHECK(log_cond_alpha(s, d) ==
        doctest::Approx(0.5 * std::log(2.0) - 0.5 * std::log(M_PI)).epsilon(1e-12));

  // with all |beta_i| large, increasing alpha decreases the value
  ChainState big = make_state(3, 1.0, 1.0, 1.0);
  Dataset d3 = make_dataset(4, 3, 23);
  big.beta = Vector::Constant(3, 50.0);
  double prev = 1e300;
  for (double a = 1.0; a <= 3.0; a += 0.25) {
    big.alpha = a;
    const double v = log_cond_alpha(big, d3);
    CHECK(v < prev);
    prev = v;
  }

  // normalization over [k1,k2] finite and positive
  ChainState r = make_state(2, 1.0, 0.7, 1.9);
  r.beta << 0.3, -0.8;
  Dataset d2 = make_dataset(5, 2, 29);
  auto f = [&](double a) {
    ChainState t = r;
    t.alpha = a;
    return std::exp(log_cond_alpha(t, d2));
  };
  const auto q = integrate_adaptive(f, 0.5, 4.0, 1e-8);
  CHECK(q.converged);
  CHECK(q.value > 0.0);
  CHECK(std::isfinite(q.value));
}

TEST_CASE("gamma_cond_params arithmetic") {
  Hyperparams h;
  h.e3 = 0.001;
  h.f3 = 0.001;
  // n=2, p=1, alpha=2, RSS=1, sum lambda|beta|^alpha = 1
  Dataset d;
  d.X = Matrix::Zero(2, 1);
  d.X << 1.0, 0.0;
  d.y.resize(2);
  ChainState s = make_state(1, 2.0, 1.0, 1.0);
  s.beta[0] = 1.0;       // lambda * |beta|^2 = 1
  d.y << 1.0, 1.0;       // residual (0, 1): RSS = 1
  auto gp = gamma_cond_params(s, d, h);
  CHECK(gp.shape == doctest::Approx(1.501).epsilon(1e-12));
  CHECK(gp.rate == doctest::Approx(1.001).epsilon(1e-12));

  // beta=0, y=0: rate is the prior rate
  s.beta.setZero();
  d.y.setZero();
  gp = gamma_cond_params(s, d, h);
  CHECK(gp.shape == doctest::Approx(h.e3 + 1.0 + 1.0 / 2.0).epsilon(1e-12));
  CHECK(gp.rate == doctest::Approx(h.f3).epsilon(1e-12));
}

TEST_CASE("lambda_cond_params arithmetic") {
  Hyperparams h;
  ChainState s = make_state(1, 1.0, 1.0, 1.0);
  s.kappa[0] = 0;
  auto lp = lambda_cond_params(0, s, h);
  CHECK(lp.shape == doctest::Approx(2.0).epsilon(1e-12));  // e1 + 1/alpha
  CHECK(lp.rate == doctest::Approx(1.0).epsilon(1e-12));   // f1, beta = 0

  s.alpha = 2.0;
  s.beta[0] = 2.0;
  s.kappa[0] = 1;
  lp = lambda_cond_params(0, s, h);
  CHECK(lp.shape == doctest::Approx(40.5).epsilon(1e-12));
  CHECK(lp.rate == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("kappa_prob symmetry and extremes") {
  Hyperparams h;
  h.e1 = h.f1 = h.e2 = h.f2 = 1.0;
  for (double lam : {0.1, 1.0, 10.0, 1e6}) CHECK(kappa_prob(lam, h) == doctest::Approx(0.5).epsilon(1e-14));

  Hyperparams hd;  // defaults e1=f1=1, e2=40, f2=0.5
  CHECK(kappa_prob(1.0, hd) < 1e-30);
  CHECK(kappa_prob(80.0, hd) > 1.0 - 1e-12);
}

TEST_CASE("log densities stay finite at extreme beta") {
  Vector b = Vector::Constant(1, 1e6);
  Vector lam = Vector::Constant(1, 1.0);
  for (double alpha : {0.5, 2.0, 8.0}) {
    const double v = log_prior_beta(b, 1.0, lam, alpha);
    CHECK(std::isfinite(v));
  }
  CHECK(abs_pow(0.0, 0.5) == 0.0);
  CHECK(abs_pow(-2.0, 2.0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("validation errors") {
  Dataset d = make_dataset(3, 2, 31);
  Vector b = Vector::Zero(2);
  CHECK_THROWS_AS(log_likelihood(d, b, -1.0), ValidationError);
  Vector lam = Vector::Constant(2, -1.0);
  CHECK_THROWS_AS(log_prior_beta(b, 1.0, lam, 1.0), ValidationError);
  CHECK_THROWS_AS(prior_beta_variance(1.0, 0.0, 1.0), ValidationError);
  CHECK_THROWS_AS(kappa_prob(-1.0, Hyperparams{}), ValidationError);
}
