#include "multivariate.hpp"

#include "model.hpp"
#include "sampler.hpp"

#include <algorithm>
#include <cmath>

namespace bridge {

namespace {
enum StreamId : std::uint64_t { kInit = 101, kBeta, kAlpha, kSigma, kLambda, kKappa };
constexpr double kLog2 = 0.69314718055994530942;

Matrix resolve_psi(const MVHyperparams& h, Eigen::Index m) {
  if (h.Psi.size() == 0) return Matrix::Identity(m, m);
  if (h.Psi.rows() != m || h.Psi.cols() != m) throw ValidationError("mv: Psi dimension mismatch");
  return h.Psi;
}

double resolve_v(const MVHyperparams& h, Eigen::Index m) {
  const double v = h.v > 0 ? h.v : static_cast<double>(m) + 2.0;
  if (v <= static_cast<double>(m) - 1.0) throw ValidationError("mv: need v > m - 1");
  return v;
}

// mp*[log a - (1/a) log 2 - lgamma(1/a)] + (1/a) sum log lambda - 0.5 sum lambda |beta|^a
double mv_log_cond_alpha(const MVState& s) {
  const double a = s.alpha;
  const double inv_a = 1.0 / a;
  const double mp = static_cast<double>(s.lambda.size());
  double sum_log_lambda = 0.0, penalty = 0.0;
  const double* b = s.beta.data();  // column-major, matches flat indexing
  for (Eigen::Index j = 0; j < s.lambda.size(); ++j) {
    sum_log_lambda += std::log(s.lambda[j]);
    penalty += s.lambda[j] * abs_pow(b[j], a);
  }
  return mp * (std::log(a) - inv_a * kLog2 - std::lgamma(inv_a)) + inv_a * sum_log_lambda -
         0.5 * penalty;
}

}  // namespace

Matrix inverse_wishart_draw(const Matrix& scale, double dof, RngStream& rng) {
  const Eigen::Index m = scale.rows();
  Matrix S = scale;
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) {
    S.diagonal().array() += 1e-8 * S.diagonal().mean();
    llt.compute(S);
    if (llt.info() != Eigen::Success)
      throw RuntimeFailure("inverse_wishart_draw: scale matrix not positive definite");
  }
  // Sigma^-1 ~ Wishart(S^-1, dof); with S = LL', chol(S^-1) = L^-T.
  Matrix L = llt.matrixL();
  Matrix A = Matrix::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    A(i, i) = std::sqrt(rng.chi_squared(dof - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) A(i, j) = rng.normal();
  }
  // M = L^-T A  =>  Sigma^-1 = M M', Sigma = M^-T M^-1.
  Matrix M = L.transpose().triangularView<Eigen::Upper>().solve(A);
  Matrix Minv = M.inverse();
  Matrix sigma = Minv.transpose() * Minv;
  return 0.5 * (sigma + sigma.transpose());
}

Matrix mv_update_sigma(const MVState& s, const MVDataset& d, const MVHyperparams& h, RngStream& rng) {
  const Matrix R = d.Y - d.X * s.beta;
  const Matrix scale = resolve_psi(h, d.m()) + R.transpose() * R;
  return inverse_wishart_draw(scale, resolve_v(h, d.m()) + static_cast<double>(d.n()), rng);
}

double mv_log_cond_beta_j(Eigen::Index j, const MVState& s, const MVDataset& d) {
  if (j < 0 || j >= s.lambda.size()) throw ValidationError("mv_log_cond_beta_j: index out of range");
  const Matrix R = d.Y - d.X * s.beta;
  Eigen::LLT<Matrix> llt(s.Sigma);
  if (llt.info() != Eigen::Success) throw RuntimeFailure("mv_log_cond_beta_j: Sigma not SPD");
  const Matrix omega = llt.solve(Matrix::Identity(d.m(), d.m()));
  const double tr = (R.transpose() * R * omega).trace();
  return -0.5 * (tr + s.lambda[j] * abs_pow(s.beta.data()[j], s.alpha));
}

MVChainOutput mv_run_chain(const MVDataset& d, const MVHyperparams& h, const MVSamplerConfig& c) {
  d.validate();
  if (!(0 < h.k1 && h.k1 < h.k2)) throw ValidationError("mv: need 0 < k1 < k2");
  if (h.burn_in > h.iterations || h.thin < 1) throw ValidationError("mv: bad iteration counts");
  const Eigen::Index n = d.n(), m = d.m(), p = d.p();
  const Eigen::Index mp = m * p;
  const Matrix psi = resolve_psi(h, m);
  const double v = resolve_v(h, m);

  RngStream init(h.seed, kInit);
  RngStream rng_beta(h.seed, kBeta), rng_alpha(h.seed, kAlpha), rng_sigma(h.seed, kSigma),
      rng_lambda(h.seed, kLambda), rng_kappa(h.seed, kKappa);

  MVState s;
  s.beta = Matrix::Zero(p, m);
  s.Sigma = c.sigma_fixed ? *c.sigma_fixed : Matrix::Identity(m, m);
  s.alpha = c.alpha_fixed ? std::clamp(*c.alpha_fixed, h.k1, h.k2) : 0.5 * (h.k1 + h.k2);
  s.kappa.resize(mp);
  s.lambda.resize(mp);
  Hyperparams mix;  // reuse the univariate mixture machinery for kappa_prob
  mix.e1 = h.e1; mix.f1 = h.f1; mix.e2 = h.e2; mix.f2 = h.f2;
  s.kappa = init_penalty_branches(d.X, d.Y);
  for (Eigen::Index j = 0; j < mp; ++j)
    s.lambda[j] = s.kappa[j] ? init.gamma(h.e2, h.f2) : init.gamma(h.e1, h.f1);

  Matrix R = d.Y - d.X * s.beta;
  Eigen::LLT<Matrix> llt(s.Sigma);
  if (llt.info() != Eigen::Success) throw RuntimeFailure("mv: initial Sigma not SPD");
  Matrix omega = llt.solve(Matrix::Identity(m, m));
  const Vector col_sqnorm = d.X.colwise().squaredNorm();

  Vector step = Vector::Constant(mp, 0.1);
  {
    const double sd_y = std::sqrt(
        std::max((d.Y.array() - d.Y.mean()).square().sum() / std::max<Eigen::Index>(n * m - 1, 1), 1e-12));
    step.setConstant(2.4 * sd_y / std::sqrt(static_cast<double>(n)));
  }

  MVChainOutput out;
  out.p = p;
  out.m = m;
  out.accept_beta.assign(mp, 0);
  const std::int64_t stored = (h.iterations - h.burn_in) / h.thin;
  out.draws.resize(stored, mp + 1 + m * m);

  bool adapting = c.adapt_during_burnin && h.burn_in > 0;
  std::int64_t row = 0;
  for (std::int64_t t = 1; t <= h.iterations; ++t) {
    // beta sweep, flat column-major order
    for (Eigen::Index j = 0; j < mp; ++j) {
      const Eigen::Index col = j / p, rowi = j % p;
      const double cur = s.beta(rowi, col);
      const double delta = step[j] * rng_beta.normal();
      const double prop = cur + delta;
      // u = -delta * X[:,rowi] hits residual column `col` only.
      const Vector rtx = R.transpose() * d.X.col(rowi);  // m-vector
      const double d_tr = -2.0 * delta * rtx.dot(omega.col(col)) +
                          delta * delta * col_sqnorm[rowi] * omega(col, col);
      const double d_pen = s.lambda[j] * (abs_pow(prop, s.alpha) - abs_pow(cur, s.alpha));
      const double log_ratio = -0.5 * (d_tr + d_pen);
      bool accepted = log_ratio >= 0.0;
      if (!accepted) accepted = rng_beta.uniform() < std::exp(log_ratio);
      ++out.attempts_beta;
      if (accepted) {
        s.beta(rowi, col) = prop;
        R.col(col) -= delta * d.X.col(rowi);
        ++out.accept_beta[j];
      }
      if (adapting) {
        const double rate = 1.0 / std::pow(static_cast<double>(t), 0.6);
        const double sign = accepted ? 1.0 - c.target_accept : -c.target_accept;
        step[j] = std::clamp(step[j] * std::exp(rate * sign), 1e-8, 1e8);
      }
    }
    // alpha
    if (!c.alpha_fixed) {
      const double prop = rng_alpha.uniform(h.k1, h.k2);
      MVState trial = s;
      trial.alpha = prop;
      const double log_ratio = mv_log_cond_alpha(trial) - mv_log_cond_alpha(s);
      bool accepted = log_ratio >= 0.0;
      if (!accepted) accepted = rng_alpha.uniform() < std::exp(log_ratio);
      ++out.attempts_alpha;
      if (accepted) {
        s.alpha = prop;
        ++out.accept_alpha;
      }
    }
    // Sigma
    if (!c.sigma_fixed) {
      const Matrix scale = psi + R.transpose() * R;
      s.Sigma = inverse_wishart_draw(scale, v + static_cast<double>(n), rng_sigma);
      llt.compute(s.Sigma);
      if (llt.info() != Eigen::Success) throw RuntimeFailure("mv: sampled Sigma not SPD");
      omega = llt.solve(Matrix::Identity(m, m));
    }
    // lambda, kappa
    const double inv_a = 1.0 / s.alpha;
    for (Eigen::Index j = 0; j < mp; ++j) {
      const double data_term = 0.5 * abs_pow(s.beta.data()[j], s.alpha);
      if (s.kappa[j])
        s.lambda[j] = rng_lambda.gamma(h.e2 + inv_a, h.f2 + data_term);
      else
        s.lambda[j] = rng_lambda.gamma(h.e1 + inv_a, h.f1 + data_term);
    }
    for (Eigen::Index j = 0; j < mp; ++j)
      s.kappa[j] = rng_kappa.bernoulli(kappa_prob(s.lambda[j], mix)) ? 1 : 0;

    if (t == h.burn_in) {
      adapting = false;
      out.accept_beta.assign(mp, 0);
      out.attempts_beta = 0;
      out.accept_alpha = 0;
      out.attempts_alpha = 0;
    }
    if (t > h.burn_in && (t - h.burn_in) % h.thin == 0 && row < stored) {
      for (Eigen::Index j = 0; j < mp; ++j) out.draws(row, j) = s.beta.data()[j];
      out.draws(row, mp) = s.alpha;
      for (Eigen::Index j = 0; j < m * m; ++j) out.draws(row, mp + 1 + j) = s.Sigma.data()[j];
      ++row;
    }
  }
  return out;
}

}  // namespace bridge
