#include <doctest.h>

#include "core/model.hpp"
#include "core/oracle.hpp"
#include "core/rng.hpp"
#include "core/sampler.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace bridge;

namespace {

Dataset small_data(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
  RngStream rng(seed, 55);
  Dataset d;
  d.X.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < p; ++j) d.X(i, j) = rng.normal();
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.y[i] = rng.normal(0.0, 1.5);
  return d;
}

ChainState basic_state(Eigen::Index p) {
  ChainState s;
  s.beta = Vector::Zero(p);
  s.gamma = 1.0;
  s.lambda = Vector::Ones(p);
  s.alpha = 1.0;
  s.kappa.assign(p, 0);
  return s;
}

}  // namespace

TEST_CASE("update_gamma draws match the conditional moments") {
  Dataset d = small_data(6, 2, 1);
  Hyperparams h;
  h.seed = 10;
  ComponentSampler sampler(d, h, SamplerConfig{});
  sampler.freeze_adaptation();
  ChainState s = basic_state(2);
  s.beta << 0.5, -1.0;
  s.alpha = 1.3;
  sampler.set_state(s);

  const auto gp = gamma_cond_params(s, d, h);
  const int N = 100000;
  double sum = 0.0;
  for (int t = 0; t < N; ++t) {
    sampler.update_gamma();
    sum += sampler.state().gamma;
  }
  const double mean = sum / N;
  const double want = gp.shape / gp.rate;
  const double se = std::sqrt(gp.shape) / gp.rate / std::sqrt(static_cast<double>(N));
  CHECK(std::fabs(mean - want) < 3.0 * se);
}

TEST_CASE("update_lambda_i draws match the conditional moments") {
  Dataset d = small_data(6, 2, 2);
  Hyperparams h;
  h.seed = 11;
  ComponentSampler sampler(d, h, SamplerConfig{});
  sampler.freeze_adaptation();
  ChainState s = basic_state(2);
  s.beta << 0.8, 0.0;
  s.kappa[0] = 1;
  sampler.set_state(s);

  const auto lp = lambda_cond_params(0, s, h);
  const int N = 100000;
  double sum = 0.0;
  for (int t = 0; t < N; ++t) {
    sampler.update_lambda_i(0);
    sum += sampler.state().lambda[0];
  }
  const double mean = sum / N;
  const double want = lp.shape / lp.rate;
  const double se = std::sqrt(lp.shape) / lp.rate / std::sqrt(static_cast<double>(N));
  CHECK(std::fabs(mean - want) < 3.0 * se);
}

TEST_CASE("update_kappa_i frequencies match kappa_prob") {
  Dataset d = small_data(4, 1, 3);
  Hyperparams h;
  h.seed = 12;
  const int N = 20000;
  const double lams[] = {0.5, 1, 2, 5, 10, 20, 40, 60, 80, 120};
  for (double lam : lams) {
    ComponentSampler sampler(d, h, SamplerConfig{});
    sampler.freeze_adaptation();
    ChainState s = basic_state(1);
    s.lambda[0] = lam;
    sampler.set_state(s);
    int ones = 0;
    for (int t = 0; t < N; ++t) {
      sampler.update_kappa_i(0);
      ones += sampler.state().kappa[0];
    }
    const double want = kappa_prob(lam, h);
    const double se = std::sqrt(std::max(want * (1.0 - want), 1e-12) / N);
    CHECK(std::fabs(static_cast<double>(ones) / N - want) < std::max(3.0 * se, 1e-4));
  }
}

TEST_CASE("update_kappa_i is a fair coin under identical mixture components") {
  Dataset d = small_data(4, 1, 4);
  Hyperparams h;
  h.e1 = h.f1 = h.e2 = h.f2 = 1.0;
  h.seed = 13;
  ComponentSampler sampler(d, h, SamplerConfig{});
  sampler.freeze_adaptation();
  ChainState s = basic_state(1);
  sampler.set_state(s);
  const int N = 100000;
  int ones = 0;
  for (int t = 0; t < N; ++t) {
    sampler.update_kappa_i(0);
    ones += sampler.state().kappa[0];
  }
  const double freq = static_cast<double>(ones) / N;
  CHECK(std::fabs(freq - 0.5) < 3.0 * std::sqrt(0.25 / N));
}

TEST_CASE("update_beta_i ridge conditional long-run mean") {
  Dataset d = small_data(10, 1, 5);
  Hyperparams h;
  h.seed = 14;
  h.v_b = 0.8;
  SamplerConfig cfg;
  cfg.alpha_fixed = 2.0;
  cfg.gamma_fixed = 1.0;
  cfg.lambda_fixed = Vector::Constant(1, 2.0);
  ComponentSampler sampler(d, h, cfg);
  sampler.freeze_adaptation();

  const double xx = d.X.col(0).squaredNorm();
  const double want_mean = d.X.col(0).dot(d.y) / (xx + 2.0);
  const double want_var = 1.0 / (xx + 2.0);

  const int N = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int t = 0; t < N; ++t) {
    sampler.update_beta_i(0);
    const double b = sampler.state().beta[0];
    sum += b;
    sum_sq += b * b;
  }
  const double mean = sum / N;
  // generous MCSE proxy: iid se times a correlation inflation factor
  const double se = std::sqrt(want_var / N) * 10.0;
  CHECK(std::fabs(mean - want_mean) < 3.0 * se);
  CHECK(sum_sq / N - mean * mean == doctest::Approx(want_var).epsilon(0.1));
}

TEST_CASE("update_beta_i acceptance collapses for huge proposals") {
  Dataset d = small_data(200, 1, 6);
  Hyperparams h;
  h.seed = 15;
  h.v_b = 1e6;
  SamplerConfig cfg;
  cfg.alpha_fixed = 2.0;
  cfg.gamma_fixed = 5.0;
  cfg.lambda_fixed = Vector::Constant(1, 1.0);
  ComponentSampler sampler(d, h, cfg);
  sampler.freeze_adaptation();
  int accepted = 0;
  for (int t = 0; t < 10000; ++t) accepted += sampler.update_beta_i(0) ? 1 : 0;
  CHECK(accepted < 500);
}

TEST_CASE("update_alpha histogram matches the grid-normalized conditional") {
  Dataset d = small_data(4, 1, 7);
  Hyperparams h;
  h.seed = 16;
  ComponentSampler sampler(d, h, SamplerConfig{});
  sampler.freeze_adaptation();
  ChainState s = basic_state(1);  // p=1, beta=0, lambda=gamma=1
  sampler.set_state(s);

  const int kBins = 40;
  const double lo = h.k1, hi = h.k2;
  std::vector<double> counts(kBins, 0.0);
  const int N = 1000000;
  for (int t = 0; t < N; ++t) {
    sampler.update_alpha();
    const double a = sampler.state().alpha;
    int b = static_cast<int>((a - lo) / (hi - lo) * kBins);
    b = std::min(std::max(b, 0), kBins - 1);
    counts[b] += 1.0;
  }

  // reference: exp(log_cond_alpha) averaged over a fine grid per bin
  const int kFine = 40;
  std::vector<double> ref(kBins, 0.0);
  double z = 0.0;
  for (int b = 0; b < kBins; ++b) {
    for (int j = 0; j < kFine; ++j) {
      ChainState t = s;
      t.alpha = lo + (hi - lo) * (b + (j + 0.5) / kFine) / kBins;
      ref[b] += std::exp(log_cond_alpha(t, d));
    }
    z += ref[b];
  }
  double tv = 0.0;
  for (int b = 0; b < kBins; ++b) tv += 0.5 * std::fabs(counts[b] / N - ref[b] / z);
  CHECK(tv <= 0.02);
}

TEST_CASE("beta update satisfies detailed balance on a coarse discretization") {
  Dataset d = small_data(10, 1, 8);
  Hyperparams h;
  h.seed = 17;
  h.v_b = 0.6;
  SamplerConfig cfg;
  cfg.alpha_fixed = 1.5;
  cfg.gamma_fixed = 1.0;
  cfg.lambda_fixed = Vector::Constant(1, 1.5);
  ComponentSampler sampler(d, h, cfg);
  sampler.freeze_adaptation();
  for (int t = 0; t < 2000; ++t) sampler.update_beta_i(0);  // reach stationarity

  const double xx = d.X.col(0).squaredNorm();
  const double center = d.X.col(0).dot(d.y) / (xx + 1.5);
  const double half_width = 4.0 / std::sqrt(xx);
  const int kBins = 20;
  auto bin_of = [&](double b) {
    int k = static_cast<int>((b - (center - half_width)) / (2.0 * half_width) * kBins);
    return std::min(std::max(k, 0), kBins - 1);
  };
  std::map<std::pair<int, int>, double> flux;
  int prev = bin_of(sampler.state().beta[0]);
  const int N = 400000;
  for (int t = 0; t < N; ++t) {
    sampler.update_beta_i(0);
    const int cur = bin_of(sampler.state().beta[0]);
    flux[{prev, cur}] += 1.0;
    prev = cur;
  }
  for (const auto& [key, fwd] : flux) {
    if (key.first >= key.second) continue;
    auto it = flux.find({key.second, key.first});
    const double bwd = it == flux.end() ? 0.0 : it->second;
    if (fwd + bwd < 50.0) continue;  // too noisy to compare
    CHECK(std::fabs(fwd - bwd) < 5.0 * std::sqrt(fwd + bwd));
  }
}

TEST_CASE("run_chain boundary and determinism") {
  Dataset d = small_data(12, 3, 9);
  Hyperparams h;
  h.iterations = 500;
  h.burn_in = 500;
  h.seed = 42;

  auto out = run_chain(d, h, SamplerConfig{});
  CHECK(out.num_draws() == 0);
  CHECK(out.p == 3);
  CHECK(out.digest.n == 12);

  h.burn_in = 100;
  auto a = run_chain(d, h, SamplerConfig{});
  auto b = run_chain(d, h, SamplerConfig{});
  CHECK(a.draws == b.draws);
  CHECK(a.num_draws() == 400);
}

TEST_CASE("run_chain respects thinning and stores valid states") {
  Dataset d = small_data(15, 2, 10);
  Hyperparams h;
  h.iterations = 1000;
  h.burn_in = 200;
  h.thin = 4;
  h.seed = 7;
  auto out = run_chain(d, h, SamplerConfig{});
  CHECK(out.num_draws() == 200);
  for (Eigen::Index t = 0; t < out.num_draws(); ++t) {
    ChainState s;
    s.beta = out.beta_draws().row(t).transpose();
    s.gamma = out.gamma_draws()[t];
    s.alpha = out.alpha_draws()[t];
    s.lambda = out.lambda_draws().row(t).transpose();
    s.kappa.assign(2, 0);
    for (Eigen::Index i = 0; i < 2; ++i)
      s.kappa[i] = static_cast<std::uint8_t>(out.kappa_draws()(t, i));
    CHECK_NOTHROW(s.validate(h.k1, h.k2));
  }
  CHECK(out.attempts_beta > 0);
  std::int64_t acc = 0;
  for (auto c : out.accept_beta) acc += c;
  CHECK(acc <= out.attempts_beta);
}

TEST_CASE("adaptation freezes after burn-in") {
  Dataset d = small_data(20, 2, 11);
  Hyperparams h;
  h.seed = 21;
  ComponentSampler sampler(d, h, SamplerConfig{});
  // simulate burn-in adaptation, then freeze
  for (int t = 0; t < 50; ++t) sampler.sweep();
  sampler.freeze_adaptation();
  const double s0 = sampler.step_size(0), s1 = sampler.step_size(1);
  for (int t = 0; t < 50; ++t) sampler.sweep();
  CHECK(sampler.step_size(0) == s0);
  CHECK(sampler.step_size(1) == s1);
}

TEST_CASE("fixed blocks stay fixed") {
  Dataset d = small_data(10, 2, 12);
  Hyperparams h;
  h.iterations = 300;
  h.burn_in = 50;
  h.seed = 3;
  SamplerConfig cfg;
  cfg.alpha_fixed = 2.0;
  cfg.gamma_fixed = 1.25;
  auto out = run_chain(d, h, cfg);
  CHECK((out.alpha_draws().array() == 2.0).all());
  CHECK((out.gamma_draws().array() == 1.25).all());
}

TEST_CASE("degenerate alpha range keeps the chain valid") {
  Dataset d = small_data(8, 1, 13);
  Hyperparams h;
  h.k1 = 1.0;
  h.k2 = 1.0 + 1e-9;
  h.iterations = 200;
  h.burn_in = 50;
  h.seed = 5;
  auto out = run_chain(d, h, SamplerConfig{});
  CHECK(out.num_draws() == 150);
  CHECK((out.alpha_draws().array() >= h.k1).all());
  CHECK((out.alpha_draws().array() <= h.k2).all());
}
