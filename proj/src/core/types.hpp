#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bridge {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Response vector plus design matrix. The response is assumed centered; the
// first column of X may be an all-ones intercept.
struct Dataset {
  Vector y;
  Matrix X;
  std::vector<bool> standardized;  // per-column flag, informational

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }

  void validate() const {
    if (y.size() != X.rows()) throw ValidationError("dataset: length(y) != rows(X)");
    if (X.rows() < 1 || X.cols() < 1) throw ValidationError("dataset: need n >= 1 and p >= 1");
    if (!y.allFinite() || !X.allFinite()) throw ValidationError("dataset: non-finite entries");
  }
};

// Fixed prior constants plus sampler tuning.
struct Hyperparams {
  double e1 = 1.0, f1 = 1.0;     // lambda mixture, weak-shrinkage component
  double e2 = 40.0, f2 = 0.5;    // lambda mixture, strong-shrinkage component
  double e3 = 0.001, f3 = 0.001; // gamma prior
  double k1 = 0.5, k2 = 4.0;     // alpha range
  double v_b = 0.0;              // RW-MH proposal sd; <=0 means auto-scale
  std::int64_t iterations = 100000;
  std::int64_t burn_in = 10000;
  std::int64_t thin = 1;
  std::uint64_t seed = 0;
  bool penalize_intercept = true;

  void validate() const {
    if (e1 <= 0 || f1 <= 0 || e2 <= 0 || f2 <= 0 || e3 <= 0 || f3 <= 0)
      throw ValidationError("hyperparams: shape/rate values must be > 0");
    if (!(0 < k1 && k1 < k2)) throw ValidationError("hyperparams: need 0 < k1 < k2");
    if (burn_in > iterations || burn_in < 0) throw ValidationError("hyperparams: need burn_in <= iterations");
    if (thin < 1) throw ValidationError("hyperparams: need thin >= 1");
  }
};

// One point in the parameter space.
struct ChainState {
  Vector beta;
  double gamma = 1.0;
  Vector lambda;
  double alpha = 1.0;
  std::vector<std::uint8_t> kappa;

  void validate(double k1, double k2) const {
    if (gamma <= 0) throw ValidationError("state: gamma must be > 0");
    if ((lambda.array() <= 0).any()) throw ValidationError("state: lambda entries must be > 0");
    if (alpha < k1 || alpha > k2) throw ValidationError("state: alpha outside [k1,k2]");
    if (lambda.size() != beta.size() || static_cast<Eigen::Index>(kappa.size()) != beta.size())
      throw ValidationError("state: dimension mismatch");
  }
};

struct DatasetDigest {
  Eigen::Index n = 0, p = 0;
  std::uint64_t hash = 0;
};

// Stored post-burn-in, thinned draws plus acceptance counters.
struct ChainOutput {
  // One row per stored draw: beta_1..beta_p, gamma, alpha, lambda_1..lambda_p,
  // kappa_1..kappa_p.
  Matrix draws;
  Eigen::Index p = 0;
  std::vector<std::int64_t> accept_beta;   // per coordinate, post burn-in
  std::int64_t attempts_beta = 0;          // per coordinate
  std::int64_t accept_alpha = 0;
  std::int64_t attempts_alpha = 0;
  Hyperparams meta;
  DatasetDigest digest;

  Eigen::Index num_draws() const { return draws.rows(); }
  Eigen::Index dim() const { return draws.cols(); }

  auto beta_draws() const { return draws.leftCols(p); }
  auto gamma_draws() const { return draws.col(p); }
  auto alpha_draws() const { return draws.col(p + 1); }
  auto lambda_draws() const { return draws.middleCols(p + 2, p); }
  auto kappa_draws() const { return draws.rightCols(p); }
};

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 1469598103934665603ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

inline DatasetDigest digest_of(const Dataset& d) {
  DatasetDigest dg;
  dg.n = d.n();
  dg.p = d.p();
  std::uint64_t h = fnv1a(d.y.data(), sizeof(double) * d.y.size());
  dg.hash = fnv1a(d.X.data(), sizeof(double) * d.X.size(), h);
  return dg;
}

}  // namespace bridge
