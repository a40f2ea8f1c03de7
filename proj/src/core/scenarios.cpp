#include "scenarios.hpp"

#include "inference.hpp"
#include "rng.hpp"
#include "sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace bridge {

ScenarioId scenario_from_string(const std::string& s) {
  if (s == "I" || s == "1") return ScenarioId::I;
  if (s == "II" || s == "2") return ScenarioId::II;
  if (s == "III" || s == "3") return ScenarioId::III;
  if (s == "IV" || s == "4") return ScenarioId::IV;
  if (s == "V" || s == "5") return ScenarioId::V;
  if (s == "VI" || s == "6") return ScenarioId::VI;
  if (s == "MV7" || s == "mv7") return ScenarioId::MV7;
  if (s == "consistency" || s == "CONSISTENCY") return ScenarioId::Consistency;
  throw ValidationError("unknown scenario id: " + s);
}

std::string scenario_to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::I: return "I";
    case ScenarioId::II: return "II";
    case ScenarioId::III: return "III";
    case ScenarioId::IV: return "IV";
    case ScenarioId::V: return "V";
    case ScenarioId::VI: return "VI";
    case ScenarioId::MV7: return "MV7";
    case ScenarioId::Consistency: return "consistency";
  }
  return "?";
}

ScenarioSpec scenario_spec(ScenarioId id, std::uint64_t seed) {
  ScenarioSpec s;
  s.id = id;
  s.seed = seed;
  switch (id) {
    case ScenarioId::I:
    case ScenarioId::II:
    case ScenarioId::III:
      s.p = 20; s.n_train = 100; s.n_test = 900; s.correlation = CorrelationKind::ArDecay;
      break;
    case ScenarioId::IV:
      s.p = 150; s.n_train = 50; s.n_test = 950; s.correlation = CorrelationKind::ArDecay;
      break;
    case ScenarioId::V:
    case ScenarioId::VI:
      s.p = 40; s.n_train = 200; s.n_test = 400; s.correlation = CorrelationKind::Compound;
      break;
    default:
      throw ValidationError("scenario_spec: " + scenario_to_string(id) +
                            " has no univariate dataset recipe");
  }
  return s;
}

namespace {

Matrix design_covariance(Eigen::Index p, CorrelationKind kind) {
  Matrix sigma(p, p);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i == j)
        sigma(i, j) = 1.0;
      else
        sigma(i, j) = kind == CorrelationKind::ArDecay
                          ? std::pow(0.5, std::abs(static_cast<double>(i - j)))
                          : 0.5;
    }
  return sigma;
}

Vector coefficient_recipe(const ScenarioSpec& spec, RngStream& rng) {
  const Eigen::Index p = spec.p;
  Vector beta = Vector::Zero(p);
  auto sample_nonzero = [&](Eigen::Index count, double mean, double sd) {
    // Zero positions resampled per replication, uniformly without replacement.
    std::vector<Eigen::Index> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    for (Eigen::Index i = 0; i < count; ++i) {
      const auto j = i + static_cast<Eigen::Index>(rng.uniform() * (p - i));
      std::swap(idx[i], idx[std::min(j, p - 1)]);
      beta[idx[i]] = rng.normal(mean, sd);
    }
  };
  switch (spec.id) {
    case ScenarioId::I: sample_nonzero(2, 15.0, 3.0); break;
    case ScenarioId::II: sample_nonzero(10, 5.0, 1.0); break;
    case ScenarioId::III:
      for (Eigen::Index i = 0; i < p; ++i) beta[i] = rng.normal(2.0, 0.001);
      break;
    case ScenarioId::IV: sample_nonzero(8, 15.0, 3.0); break;
    case ScenarioId::V:
    case ScenarioId::VI: {
      const double v = spec.id == ScenarioId::V ? 2.0 : 150.0;
      for (Eigen::Index i = 10; i < 20; ++i) beta[i] = v;
      for (Eigen::Index i = 30; i < 40; ++i) beta[i] = v;
      break;
    }
    default:
      throw ValidationError("coefficient_recipe: unsupported scenario");
  }
  return beta;
}

Dataset make_dataset(const Matrix& chol_lower, const Vector& beta_full, double noise_scale,
                     Eigen::Index n, RngStream& rng) {
  const Eigen::Index p = chol_lower.rows();
  Dataset d;
  d.X.resize(n, p + 1);
  d.X.col(0).setOnes();
  Vector z(p);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.normal();
    d.X.row(r).tail(p) = (chol_lower * z).transpose();
  }
  d.y.resize(n);
  for (Eigen::Index r = 0; r < n; ++r)
    d.y[r] = d.X.row(r).dot(beta_full) + noise_scale * rng.normal();
  d.standardized.assign(p + 1, false);
  return d;
}

}  // namespace

GeneratedData generate(const ScenarioSpec& spec) {
  if (spec.p < 1 || spec.n_train < 1 || spec.n_test < 0)
    throw ValidationError("generate: invalid scenario dimensions");
  RngStream rng(spec.seed, 0xda7aULL);
  const Matrix sigma = design_covariance(spec.p, spec.correlation);
  Eigen::LLT<Matrix> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw RuntimeFailure("generate: design covariance not positive definite");
  const Matrix L = llt.matrixL();

  GeneratedData out;
  out.beta_true = Vector::Zero(spec.p + 1);  // intercept coefficient pinned to 0
  out.beta_true.tail(spec.p) = coefficient_recipe(spec, rng);
  out.train = make_dataset(L, out.beta_true, spec.noise_scale, spec.n_train, rng);
  out.test = make_dataset(L, out.beta_true, spec.noise_scale, std::max<Eigen::Index>(spec.n_test, 1), rng);
  return out;
}

void ConsistencySpec::validate() const {
  if (epsilon <= 0.0) throw ValidationError("consistency: epsilon must be > 0");
  if (rho <= 0.0 || rho >= 1.0) throw ValidationError("consistency: rho must be in (0,1)");
  if (C <= 0.0) throw ValidationError("consistency: C must be > 0");
  if (n_grid.empty()) throw ValidationError("consistency: empty n grid");
  if (gamma_true <= 0.0) throw ValidationError("consistency: gamma must be > 0");
}

double ConsistencySpec::lambda_schedule(Eigen::Index n, Eigen::Index p) const {
  const double nn = static_cast<double>(n);
  const double base = C * std::sqrt(static_cast<double>(p)) * std::pow(nn, 0.5 * rho) * std::log(nn);
  return std::pow(base, alpha);
}

std::vector<ConsistencyRow> consistency_experiment(const ConsistencySpec& spec) {
  spec.validate();
  std::vector<ConsistencyRow> rows;
  for (Eigen::Index n : spec.n_grid) {
    const auto p = static_cast<Eigen::Index>(std::floor(std::pow(static_cast<double>(n), spec.p_exponent)));
    RngStream rng(spec.seed, 0xc0ULL + static_cast<std::uint64_t>(n));
    Dataset d;
    d.X.resize(n, p);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < p; ++c) d.X(r, c) = rng.normal();
    Vector beta0 = Vector::Zero(p);
    for (Eigen::Index j = 0; j < std::min(spec.num_nonzero, p); ++j) beta0[j] = spec.signal;
    const double noise_sd = 1.0 / std::sqrt(spec.gamma_true);
    d.y.resize(n);
    for (Eigen::Index r = 0; r < n; ++r) d.y[r] = d.X.row(r).dot(beta0) + noise_sd * rng.normal();
    d.standardized.assign(p, false);

    const double lam = spec.lambda_schedule(n, p);
    Hyperparams h;
    h.k1 = std::min(spec.alpha, 0.5);
    h.k2 = std::max(spec.alpha, 4.0);
    h.iterations = spec.iterations;
    h.burn_in = spec.burn_in;
    h.seed = fnv1a(&n, sizeof(n), spec.seed ^ 0x5eedULL);
    SamplerConfig cfg;
    cfg.alpha_fixed = spec.alpha;
    cfg.gamma_fixed = spec.gamma_true;  // precision assumed known
    cfg.lambda_fixed = Vector::Constant(p, lam);
    ChainOutput out = run_chain(d, h, cfg);

    std::int64_t outside = 0;
    for (Eigen::Index t = 0; t < out.num_draws(); ++t) {
      const double dist = (out.beta_draws().row(t).transpose() - beta0).norm();
      if (dist > spec.epsilon) ++outside;
    }
    rows.push_back({n, p, lam, out.num_draws() > 0
                                   ? static_cast<double>(outside) / out.num_draws()
                                   : 0.0});
  }
  return rows;
}

MVGenerated generate_mv7(std::uint64_t seed) {
  const Eigen::Index n = 100, m = 10, p_pred = 20;
  RngStream rng(seed, 0x3117ULL);
  MVGenerated out;
  out.beta_true = Matrix::Zero(p_pred + 1, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    std::vector<Eigen::Index> idx(p_pred);
    std::iota(idx.begin(), idx.end(), 0);
    for (Eigen::Index i = 0; i < 2; ++i) {
      const auto j = i + static_cast<Eigen::Index>(rng.uniform() * (p_pred - i));
      std::swap(idx[i], idx[std::min(j, p_pred - 1)]);
      out.beta_true(idx[i] + 1, c) = rng.normal(15.0, 3.0);
    }
  }
  // Sparse lower-triangular L: unit diagonal, strict lower entries N(0,1)
  // kept with probability 0.05.
  Matrix L = Matrix::Identity(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      const double z = rng.normal();
      if (rng.uniform() < 0.05) L(i, j) = z;
    }
  out.sigma_true = L * L.transpose();

  out.data.X.resize(n, p_pred + 1);
  out.data.X.col(0).setOnes();
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 1; c <= p_pred; ++c) out.data.X(r, c) = rng.normal();
  out.data.Y.resize(n, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    Vector eps(m);
    for (Eigen::Index c = 0; c < m; ++c) eps[c] = rng.normal();
    out.data.Y.row(r) = (out.beta_true.transpose() * out.data.X.row(r).transpose() + L * eps).transpose();
  }
  return out;
}

std::string method_to_string(FitMethod m) {
  switch (m) {
    case FitMethod::Full: return "full";
    case FitMethod::AlphaFixed1: return "alpha_fixed_1";
    case FitMethod::AlphaFixed2: return "alpha_fixed_2";
  }
  return "?";
}

namespace {

struct RepResult {
  double l2 = 0.0;
  double mse = 0.0;
  int model_size = 0;
  bool exact = false;
  double coverage = 0.0;
};

RepResult run_one_rep(const ScenarioSpec& spec, FitMethod method, const ReplicateOptions& opts,
                      std::uint64_t rep) {
  ScenarioSpec s = spec;
  s.seed = fnv1a(&rep, sizeof(rep), spec.seed ^ 0x9e3779b9ULL);
  GeneratedData data = generate(s);

  Hyperparams h = opts.hyper;
  h.iterations = opts.iterations;
  h.burn_in = opts.burn_in;
  h.thin = opts.thin;
  h.seed = fnv1a(&rep, sizeof(rep), spec.seed ^ 0xf17ULL);
  SamplerConfig cfg;
  if (method == FitMethod::AlphaFixed1) cfg.alpha_fixed = 1.0;
  if (method == FitMethod::AlphaFixed2) cfg.alpha_fixed = 2.0;

  ChainOutput out = run_chain(data.train, h, cfg);
  const Vector beta_hat = out.beta_draws().colwise().mean().transpose();

  RepResult r;
  r.l2 = (beta_hat - data.beta_true).norm();
  r.mse = (data.test.y - data.test.X * beta_hat).squaredNorm() / data.test.n();

  const auto sel = select_variables(out, opts.select_level);
  // The intercept is always part of the model; selection applies to the rest.
  int size = 1;
  bool exact = true;
  for (Eigen::Index i = 1; i < out.p; ++i) {
    if (sel[i]) ++size;
    if ((sel[i] != 0) != (data.beta_true[i] != 0.0)) exact = false;
  }
  r.model_size = size;
  r.exact = exact;

  // Predictive coverage on the held-out set, on a thinned sub-chain.
  const Eigen::Index total = out.num_draws();
  const Eigen::Index keep = std::min<Eigen::Index>(total, 1000);
  const Eigen::Index stride = std::max<Eigen::Index>(1, total / keep);
  RngStream prng(h.seed, 0xbeefULL);
  Eigen::Index covered = 0;
  std::vector<double> ys;
  for (Eigen::Index row = 0; row < data.test.n(); ++row) {
    ys.clear();
    for (Eigen::Index t = 0; t < total; t += stride) {
      const double mu = data.test.X.row(row).dot(out.beta_draws().row(t));
      ys.push_back(mu + prng.normal() / std::sqrt(out.gamma_draws()(t)));
    }
    const double lo = sample_quantile(ys, 0.025);
    const double hi = sample_quantile(ys, 0.975);
    if (data.test.y[row] >= lo && data.test.y[row] <= hi) ++covered;
  }
  r.coverage = static_cast<double>(covered) / data.test.n();
  return r;
}

}  // namespace

std::vector<MethodMetrics> replicate_study(const ScenarioSpec& spec, int reps,
                                           const std::vector<FitMethod>& methods,
                                           const ReplicateOptions& opts) {
  if (reps < 1) throw ValidationError("replicate_study: need reps >= 1");
  std::vector<MethodMetrics> table;
  for (FitMethod method : methods) {
    std::vector<RepResult> results(reps);
    const int workers = std::max(1, opts.workers);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= reps) return;
        results[r] = run_one_rep(spec, method, opts, static_cast<std::uint64_t>(r));
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    MethodMetrics m;
    m.method = method;
    m.reps = reps;
    std::vector<double> l2s, mses;
    for (const auto& r : results) {
      l2s.push_back(r.l2);
      mses.push_back(r.mse);
      m.avg_model_size += r.model_size;
      m.exact_recovery_count += r.exact ? 1 : 0;
      m.coverage95 += r.coverage;
    }
    m.avg_model_size /= reps;
    m.coverage95 /= reps;
    const double mean_l2 = std::accumulate(l2s.begin(), l2s.end(), 0.0) / reps;
    double var_l2 = 0.0;
    for (double v : l2s) var_l2 += (v - mean_l2) * (v - mean_l2);
    m.mean_l2 = mean_l2;
    m.se_l2 = reps > 1 ? std::sqrt(var_l2 / (reps - 1) / reps) : 0.0;
    m.median_mse = sample_quantile(mses, 0.5);
    const double mean_mse = std::accumulate(mses.begin(), mses.end(), 0.0) / reps;
    double var_mse = 0.0;
    for (double v : mses) var_mse += (v - mean_mse) * (v - mean_mse);
    // Large-sample SE of the sample median under approximate normality.
    m.se_mse = reps > 1 ? 1.2533 * std::sqrt(var_mse / (reps - 1) / reps) : 0.0;
    table.push_back(m);
  }
  return table;
}

}  // namespace bridge
