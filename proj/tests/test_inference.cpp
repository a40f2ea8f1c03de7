#include <doctest.h>

#include "core/inference.hpp"
#include "core/rng.hpp"
#include "core/sampler.hpp"

#include <cmath>
#include <numeric>

using namespace bridge;

namespace {

// Minimal ChainOutput wrapper around an externally built draw matrix.
ChainOutput wrap(const Matrix& draws, Eigen::Index p) {
  ChainOutput out;
  out.draws = draws;
  out.p = p;
  out.accept_beta.assign(p, 0);
  return out;
}

ChainOutput scalar_chain(const std::vector<double>& beta_vals, double gamma = 1.0,
                         double alpha = 1.0) {
  Matrix d(static_cast<Eigen::Index>(beta_vals.size()), 5);
  for (std::size_t t = 0; t < beta_vals.size(); ++t) {
    d(t, 0) = beta_vals[t];
    d(t, 1) = gamma;
    d(t, 2) = alpha;
    d(t, 3) = 1.0;  // lambda
    d(t, 4) = 0.0;  // kappa
  }
  return wrap(d, 1);
}

}  // namespace

TEST_CASE("sample_quantile follows the type-7 rule") {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  CHECK(sample_quantile(v, 0.5) == doctest::Approx(50.5).epsilon(1e-12));
  CHECK(sample_quantile(v, 0.025) == doctest::Approx(3.475).epsilon(1e-12));
  CHECK(sample_quantile(v, 0.0) == doctest::Approx(1.0));
  CHECK(sample_quantile(v, 1.0) == doctest::Approx(100.0));
}

TEST_CASE("summarize on a constant chain") {
  std::vector<double> vals(500, 2.5);
  auto out = scalar_chain(vals);
  auto s = summarize(out);
  CHECK(s.beta_mean[0] == doctest::Approx(2.5));
  for (Eigen::Index q = 0; q < s.beta_quantiles.cols(); ++q)
    CHECK(s.beta_quantiles(0, q) == doctest::Approx(2.5));
  CHECK(s.ess[0] == doctest::Approx(1.0));  // documented floor for constant chains
  CHECK(s.gamma_mean == doctest::Approx(1.0));
}

TEST_CASE("summarize rejects empty chains and keeps quantiles monotone") {
  ChainOutput empty = wrap(Matrix(0, 5), 1);
  CHECK_THROWS_AS(summarize(empty), ValidationError);

  RngStream rng(1, 0);
  std::vector<double> vals(2000);
  for (auto& v : vals) v = rng.normal();
  auto s = summarize(scalar_chain(vals), {0.05, 0.25, 0.5, 0.75, 0.95});
  for (Eigen::Index q = 1; q < s.beta_quantiles.cols(); ++q)
    CHECK(s.beta_quantiles(0, q - 1) <= s.beta_quantiles(0, q));
}

TEST_CASE("select_variables basics") {
  auto zero = scalar_chain(std::vector<double>(300, 0.0));
  CHECK(select_variables(zero)[0] == 0);

  RngStream rng(2, 0);
  std::vector<double> pos(300);
  for (auto& v : pos) v = 0.1 + rng.uniform();
  CHECK(select_variables(scalar_chain(pos))[0] == 1);

  // straddling zero -> not selected
  std::vector<double> sym(300);
  for (auto& v : sym) v = rng.normal();
  CHECK(select_variables(scalar_chain(sym))[0] == 0);
}

TEST_CASE("selection agrees with summary quantiles") {
  RngStream rng(3, 0);
  std::vector<double> vals(1000);
  for (auto& v : vals) v = rng.normal(0.05, 1.0);
  auto out = scalar_chain(vals);
  auto s = summarize(out, {0.025, 0.975}, 0.95);
  const bool excludes_zero = s.beta_quantiles(0, 0) > 0.0 || s.beta_quantiles(0, 1) < 0.0;
  CHECK(static_cast<bool>(s.selected[0]) == excludes_zero);
  CHECK(s.selected == select_variables(out, 0.95));
}

TEST_CASE("predict_mean linearity and edge cases") {
  RngStream rng(4, 0);
  Matrix draws(400, 8);  // p = 2
  for (Eigen::Index t = 0; t < 400; ++t) {
    draws(t, 0) = rng.normal(1.0, 0.3);
    draws(t, 1) = rng.normal(-2.0, 0.5);
    draws(t, 2) = 2.0;  // gamma
    draws(t, 3) = 1.0;  // alpha
    draws(t, 4) = draws(t, 5) = 1.0;
    draws(t, 6) = draws(t, 7) = 0.0;
  }
  auto out = wrap(draws, 2);

  CHECK((predict_mean(Matrix::Identity(2, 2), out) -
         out.beta_draws().colwise().mean().transpose()).norm() < 1e-12);
  CHECK(predict_mean(Matrix::Zero(3, 2), out).norm() == 0.0);

  Matrix Xn(3, 2);
  Xn << 1, 2, -0.5, 0.3, 4, 4;
  Vector manual = Vector::Zero(3);
  for (Eigen::Index t = 0; t < 400; ++t)
    manual += Xn * out.beta_draws().row(t).transpose();
  manual /= 400.0;
  CHECK((predict_mean(Xn, out) - manual).norm() < 1e-10);

  CHECK_THROWS_AS(predict_mean(Matrix::Zero(2, 3), out), ValidationError);
}

TEST_CASE("predictive_draws mean and noise behavior") {
  RngStream rng(5, 0);
  Matrix draws(2000, 5);
  for (Eigen::Index t = 0; t < 2000; ++t) {
    draws(t, 0) = rng.normal(1.5, 0.2);
    draws(t, 1) = 4.0;  // gamma -> noise sd 0.5
    draws(t, 2) = 1.0;
    draws(t, 3) = 1.0;
    draws(t, 4) = 0.0;
  }
  auto out = wrap(draws, 1);
  Matrix Xn(1, 1);
  Xn << 2.0;

  RngStream pred_rng(9, 0);
  Matrix yd = predictive_draws(Xn, out, pred_rng);
  REQUIRE(yd.rows() == 2000);
  REQUIRE(yd.cols() == 1);
  const double mean = yd.col(0).mean();
  const double want = predict_mean(Xn, out)[0];
  const double var = (yd.col(0).array() - mean).square().mean();
  const double plug_in_var = (Xn(0, 0) * 0.2) * (Xn(0, 0) * 0.2);
  CHECK(std::fabs(mean - want) < 3.0 * std::sqrt(var / 2000.0));
  CHECK(var > plug_in_var);  // observation noise adds variance
  CHECK(var == doctest::Approx(plug_in_var + 0.25).epsilon(0.15));

  // degenerate chain with huge gamma concentrates at X beta
  Matrix dd(50, 5);
  for (Eigen::Index t = 0; t < 50; ++t) {
    dd(t, 0) = 1.5;
    dd(t, 1) = 1e12;
    dd(t, 2) = 1.0;
    dd(t, 3) = 1.0;
    dd(t, 4) = 0.0;
  }
  auto dout = wrap(dd, 1);
  RngStream r2(10, 0);
  Matrix yd2 = predictive_draws(Xn, dout, r2);
  CHECK((yd2.array() - 3.0).abs().maxCoeff() < 1e-3);
}

TEST_CASE("batch_means_ess on reference chains") {
  const int M = 10000;
  RngStream rng(6, 0);
  Vector iid(M);
  for (int t = 0; t < M; ++t) iid[t] = rng.normal();
  auto r = batch_means_ess(iid);
  CHECK(r.ess / M > 0.8);
  CHECK(r.ess / M < 1.2);
  CHECK(r.mcse > 0.0);

  // AR(1) with phi = 0.9: ESS/M about (1-phi)/(1+phi) = 0.0526
  Vector ar(M);
  double x = 0.0;
  for (int t = 0; t < M; ++t) {
    x = 0.9 * x + rng.normal() * std::sqrt(1.0 - 0.81);
    ar[t] = x;
  }
  auto r2 = batch_means_ess(ar);
  const double want = (1.0 - 0.9) / (1.0 + 0.9);
  CHECK(r2.ess / M > want * 0.5);
  CHECK(r2.ess / M < want * 1.5);

  Vector flat = Vector::Constant(M, 3.0);
  CHECK(batch_means_ess(flat).ess == doctest::Approx(1.0));
}

TEST_CASE("ess is clamped to the number of draws") {
  RngStream rng(7, 0);
  Vector v(200);
  for (int t = 0; t < 200; ++t) v[t] = rng.normal();
  auto r = batch_means_ess(v);
  CHECK(r.ess >= 1.0);
  CHECK(r.ess <= 200.0);
}
