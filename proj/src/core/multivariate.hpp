#pragma once

#include "rng.hpp"
#include "types.hpp"

#include <optional>

namespace bridge {

struct MVDataset {
  Matrix Y;  // n x m
  Matrix X;  // n x p

  Eigen::Index n() const { return Y.rows(); }
  Eigen::Index m() const { return Y.cols(); }
  Eigen::Index p() const { return X.cols(); }

  void validate() const {
    if (Y.rows() != X.rows()) throw ValidationError("mv dataset: rows(Y) != rows(X)");
    if (Y.rows() < 1 || Y.cols() < 1 || X.cols() < 1)
      throw ValidationError("mv dataset: empty dimensions");
    if (!Y.allFinite() || !X.allFinite()) throw ValidationError("mv dataset: non-finite entries");
  }
};

struct MVHyperparams {
  Matrix Psi;        // m x m SPD scale; empty means identity
  double v = 0.0;    // inverse-Wishart dof; <= 0 means m + 2
  double e1 = 1.0, f1 = 1.0;
  double e2 = 40.0, f2 = 0.5;
  double k1 = 0.5, k2 = 4.0;
  std::int64_t iterations = 20000;
  std::int64_t burn_in = 2000;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
};

// Coefficients addressed flat in column-major order: j = col*p + row.
struct MVState {
  Matrix beta;    // p x m
  Matrix Sigma;   // m x m SPD
  Vector lambda;  // length m*p
  std::vector<std::uint8_t> kappa;
  double alpha = 1.0;
};

struct MVSamplerConfig {
  bool adapt_during_burnin = true;
  double target_accept = 0.44;
  std::optional<double> alpha_fixed;
  std::optional<Matrix> sigma_fixed;
};

struct MVChainOutput {
  // Row per stored draw: beta (m*p, column-major), alpha, Sigma (m*m, column-major).
  Matrix draws;
  Eigen::Index p = 0, m = 0;
  std::vector<std::int64_t> accept_beta;
  std::int64_t attempts_beta = 0;
  std::int64_t accept_alpha = 0;
  std::int64_t attempts_alpha = 0;

  Eigen::Index num_draws() const { return draws.rows(); }
  auto beta_draws() const { return draws.leftCols(m * p); }
  auto alpha_draws() const { return draws.col(m * p); }
  auto sigma_draws() const { return draws.rightCols(m * m); }
};

// Gibbs draw Sigma | beta ~ InvWishart(Psi + R'R, v + n), R = Y - X beta.
Matrix mv_update_sigma(const MVState& s, const MVDataset& d, const MVHyperparams& h, RngStream& rng);

// Unnormalized log full conditional of one flat coefficient.
double mv_log_cond_beta_j(Eigen::Index j, const MVState& s, const MVDataset& d);

MVChainOutput mv_run_chain(const MVDataset& d, const MVHyperparams& h, const MVSamplerConfig& c);

// Draw from InvWishart(scale, dof) by Bartlett decomposition of the Wishart
// on the inverse scale; jitters once if the scale Cholesky fails.
Matrix inverse_wishart_draw(const Matrix& scale, double dof, RngStream& rng);

}  // namespace bridge
