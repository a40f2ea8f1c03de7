#include "bridgereg.h"

#include "core/inference.hpp"
#include "core/io.hpp"
#include "core/model.hpp"
#include "core/multivariate.hpp"
#include "core/oracle.hpp"
#include "core/sampler.hpp"
#include "core/scenarios.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <sstream>

using json = nlohmann::ordered_json;

namespace {

thread_local std::string g_last_error;

br_status fail(br_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

template <typename Fn>
br_status guarded(Fn&& fn) {
  try {
    fn();
    return BR_OK;
  } catch (const bridge::ValidationError& e) {
    return fail(BR_ERR_VALIDATION, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BR_ERR_VALIDATION, e.what());
  } catch (const std::exception& e) {
    return fail(BR_ERR_RUNTIME, e.what());
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bridge::Hyperparams to_hyper(const br_options& o) {
  bridge::Hyperparams h;
  h.e1 = o.e1; h.f1 = o.f1; h.e2 = o.e2; h.f2 = o.f2; h.e3 = o.e3; h.f3 = o.f3;
  h.k1 = o.k1; h.k2 = o.k2;
  h.v_b = o.v_b;
  h.iterations = o.iterations;
  h.burn_in = o.burn_in;
  h.thin = o.thin;
  h.seed = o.seed;
  h.penalize_intercept = o.penalize_intercept != 0;
  return h;
}

bridge::SamplerConfig to_config(const br_options& o) {
  bridge::SamplerConfig c;
  c.adapt_during_burnin = o.adapt_during_burnin != 0;
  c.target_accept = o.target_accept;
  if (o.alpha_fixed > 0) c.alpha_fixed = o.alpha_fixed;
  if (o.gamma_fixed > 0) c.gamma_fixed = o.gamma_fixed;
  return c;
}

}  // namespace

struct br_dataset {
  bridge::Dataset data;
};

struct br_chain {
  bridge::ChainOutput out;
};

extern "C" {

const char* br_version(void) { return "0.1.0"; }

const char* br_last_error(void) { return g_last_error.c_str(); }

void br_string_free(char* s) { std::free(s); }
void br_array_free(double* a) { std::free(a); }

br_status br_dataset_create(int64_t n, int64_t p, const double* y, const double* x_rowmajor,
                            br_dataset** out) {
  if (!y || !x_rowmajor || !out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto* d = new br_dataset;
    d->data.y = Eigen::Map<const bridge::Vector>(y, n);
    d->data.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                               Eigen::RowMajor>>(x_rowmajor, n, p);
    d->data.standardized.assign(static_cast<std::size_t>(p), false);
    try {
      d->data.validate();
    } catch (...) {
      delete d;
      throw;
    }
    *out = d;
  });
}

br_status br_dataset_load_csv(const char* path, const char* response_column, br_dataset** out) {
  if (!path || !response_column || !out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto d = bridge::dataset_from_csv(path, response_column);
    *out = new br_dataset{std::move(d)};
  });
}

br_status br_dataset_save_csv(const br_dataset* d, const char* path, const char* response_column) {
  if (!d || !path || !response_column) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] { bridge::dataset_to_csv(path, d->data, response_column); });
}

void br_dataset_free(br_dataset* d) { delete d; }

int64_t br_dataset_rows(const br_dataset* d) { return d ? d->data.n() : 0; }
int64_t br_dataset_cols(const br_dataset* d) { return d ? d->data.p() : 0; }

br_status br_dataset_get(const br_dataset* d, double* y_out, double* x_rowmajor_out) {
  if (!d) return fail(BR_ERR_VALIDATION, "null dataset");
  return guarded([&] {
    if (y_out) Eigen::Map<bridge::Vector>(y_out, d->data.n()) = d->data.y;
    if (x_rowmajor_out)
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
          x_rowmajor_out, d->data.n(), d->data.p()) = d->data.X;
  });
}

void br_options_defaults(br_options* opts) {
  if (!opts) return;
  bridge::Hyperparams h;
  opts->e1 = h.e1; opts->f1 = h.f1; opts->e2 = h.e2; opts->f2 = h.f2;
  opts->e3 = h.e3; opts->f3 = h.f3; opts->k1 = h.k1; opts->k2 = h.k2;
  opts->v_b = 0.0;
  opts->target_accept = 0.44;
  opts->iterations = h.iterations;
  opts->burn_in = h.burn_in;
  opts->thin = h.thin;
  opts->seed = 0;
  opts->adapt_during_burnin = 1;
  opts->penalize_intercept = 1;
  opts->alpha_fixed = 0.0;
  opts->gamma_fixed = 0.0;
}

br_status br_fit(const br_dataset* d, const br_options* opts, br_chain** out) {
  if (!d || !opts || !out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto chain = bridge::run_chain(d->data, to_hyper(*opts), to_config(*opts));
    *out = new br_chain{std::move(chain)};
  });
}

void br_chain_free(br_chain* c) { delete c; }

int64_t br_chain_num_draws(const br_chain* c) { return c ? c->out.num_draws() : 0; }
int64_t br_chain_num_coeffs(const br_chain* c) { return c ? c->out.p : 0; }

br_status br_chain_save_csv(const br_chain* c, const char* path) {
  if (!c || !path) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] { bridge::chain_to_csv(path, c->out); });
}

br_status br_chain_load_csv(const char* path, br_chain** out) {
  if (!path || !out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto chain = bridge::chain_from_csv(path);
    *out = new br_chain{std::move(chain)};
  });
}

br_status br_chain_accept_rates(const br_chain* c, double* beta_rate, double* alpha_rate) {
  if (!c) return fail(BR_ERR_VALIDATION, "null chain");
  if (beta_rate) {
    std::int64_t acc = 0;
    for (auto a : c->out.accept_beta) acc += a;
    *beta_rate = c->out.attempts_beta > 0 ? static_cast<double>(acc) / c->out.attempts_beta : 0.0;
  }
  if (alpha_rate)
    *alpha_rate = c->out.attempts_alpha > 0
                      ? static_cast<double>(c->out.accept_alpha) / c->out.attempts_alpha
                      : 0.0;
  return BR_OK;
}

br_status br_summary_json(const br_chain* c, const double* levels, int n_levels,
                          double select_level, char** json_out) {
  if (!c || !json_out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    std::vector<double> lv = {0.025, 0.25, 0.5, 0.75, 0.975};
    if (levels && n_levels > 0) lv.assign(levels, levels + n_levels);
    auto s = bridge::summarize(c->out, lv, select_level);
    json j;
    j["num_draws"] = c->out.num_draws();
    j["num_coeffs"] = c->out.p;
    j["levels"] = lv;
    j["beta_mean"] = std::vector<double>(s.beta_mean.data(), s.beta_mean.data() + s.beta_mean.size());
    json bq = json::array();
    for (Eigen::Index i = 0; i < s.beta_quantiles.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index q = 0; q < s.beta_quantiles.cols(); ++q) row.push_back(s.beta_quantiles(i, q));
      bq.push_back(row);
    }
    j["beta_quantiles"] = bq;
    j["gamma_mean"] = s.gamma_mean;
    j["alpha_mean"] = s.alpha_mean;
    j["alpha_quantiles"] =
        std::vector<double>(s.alpha_quantiles.data(), s.alpha_quantiles.data() + s.alpha_quantiles.size());
    j["select_level"] = s.select_level;
    j["selected"] = std::vector<int>(s.selected.begin(), s.selected.end());
    j["ess"] = std::vector<double>(s.ess.data(), s.ess.data() + s.ess.size());
    j["mcse"] = std::vector<double>(s.mcse.data(), s.mcse.data() + s.mcse.size());
    double br = 0.0, ar = 0.0;
    br_chain_accept_rates(c, &br, &ar);
    j["accept_rate_beta"] = br;
    j["accept_rate_alpha"] = ar;
    *json_out = dup_string(j.dump(2));
  });
}

br_status br_select(const br_chain* c, double level, int32_t* selected) {
  if (!c || !selected) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto sel = bridge::select_variables(c->out, level);
    for (std::size_t i = 0; i < sel.size(); ++i) selected[i] = sel[i];
  });
}

br_status br_ess(const br_chain* c, double* ess, double* mcse) {
  if (!c) return fail(BR_ERR_VALIDATION, "null chain");
  return guarded([&] {
    for (Eigen::Index j = 0; j < c->out.dim(); ++j) {
      bridge::Vector col = c->out.draws.col(j);
      const auto r = bridge::batch_means_ess(col);
      if (ess) ess[j] = r.ess;
      if (mcse) mcse[j] = r.mcse;
    }
  });
}

br_status br_predict(const br_chain* c, int64_t rows, int64_t p, const double* x_rowmajor,
                     uint64_t seed, const double* levels, int n_levels, double* mean_out,
                     double* quantiles_out) {
  if (!c || !x_rowmajor || !mean_out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    bridge::Matrix X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                      Eigen::RowMajor>>(x_rowmajor, rows, p);
    bridge::Vector mean = bridge::predict_mean(X, c->out);
    Eigen::Map<bridge::Vector>(mean_out, rows) = mean;
    if (quantiles_out && levels && n_levels > 0) {
      bridge::RngStream rng(seed, 0x9ed1c7ULL);
      bridge::Matrix draws = bridge::predictive_draws(X, c->out, rng);
      for (int64_t r = 0; r < rows; ++r) {
        std::vector<double> col(draws.col(r).data(), draws.col(r).data() + draws.rows());
        for (int q = 0; q < n_levels; ++q)
          quantiles_out[r * n_levels + q] = bridge::sample_quantile(col, levels[q]);
      }
    }
  });
}

br_status br_simulate(const char* scenario, uint64_t seed, br_dataset** train, br_dataset** test,
                      double** beta_true_out, int64_t* beta_len_out) {
  if (!scenario || !train || !test) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto spec = bridge::scenario_spec(bridge::scenario_from_string(scenario), seed);
    auto g = bridge::generate(spec);
    *train = new br_dataset{std::move(g.train)};
    *test = new br_dataset{std::move(g.test)};
    if (beta_true_out) {
      auto* arr = static_cast<double*>(std::malloc(sizeof(double) * g.beta_true.size()));
      std::memcpy(arr, g.beta_true.data(), sizeof(double) * g.beta_true.size());
      *beta_true_out = arr;
      if (beta_len_out) *beta_len_out = g.beta_true.size();
    }
  });
}

br_status br_benchmark(const char* scenario, int reps, const char* methods, const br_options* opts,
                       int workers, char** csv_out) {
  if (!scenario || !opts || !csv_out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto spec = bridge::scenario_spec(bridge::scenario_from_string(scenario), opts->seed);
    std::vector<bridge::FitMethod> ms;
    std::stringstream ss(methods ? methods : "full");
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok == "full") ms.push_back(bridge::FitMethod::Full);
      else if (tok == "alpha_fixed_1") ms.push_back(bridge::FitMethod::AlphaFixed1);
      else if (tok == "alpha_fixed_2") ms.push_back(bridge::FitMethod::AlphaFixed2);
      else throw bridge::ValidationError("unknown method: " + tok);
    }
    bridge::ReplicateOptions ro;
    ro.iterations = opts->iterations;
    ro.burn_in = opts->burn_in;
    ro.thin = opts->thin;
    ro.workers = workers;
    ro.hyper = to_hyper(*opts);
    auto table = bridge::replicate_study(spec, reps, ms, ro);
    std::ostringstream out;
    out << "method,mean_l2,se_l2,median_mse,se_mse,avg_model_size,exact_recovery_count,coverage95\n";
    for (const auto& m : table) {
      out << bridge::method_to_string(m.method) << ',' << bridge::format_double(m.mean_l2) << ','
          << bridge::format_double(m.se_l2) << ',' << bridge::format_double(m.median_mse) << ','
          << bridge::format_double(m.se_mse) << ',' << bridge::format_double(m.avg_model_size)
          << ',' << m.exact_recovery_count << ',' << bridge::format_double(m.coverage95) << '\n';
    }
    *csv_out = dup_string(out.str());
  });
}

br_status br_tailcheck(double e1, double f1, double e2, double f2, double k1, double k2,
                       const double* ys, int count, double* post_mean, double* dlogm) {
  if (!ys || !post_mean || !dlogm) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    bridge::OneDimModel m;
    m.e1 = e1; m.f1 = f1; m.e2 = e2; m.f2 = f2; m.k1 = k1; m.k2 = k2;
    for (int i = 0; i < count; ++i) {
      dlogm[i] = bridge::dlog_marginal_m(ys[i], m);
      post_mean[i] = ys[i] + dlogm[i];
    }
  });
}

br_status br_consistency(double rho, double c_const, double epsilon, double alpha,
                         const int64_t* n_grid, int n_count, int64_t iterations, int64_t burn_in,
                         uint64_t seed, char** csv_out) {
  if (!csv_out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    bridge::ConsistencySpec spec;
    spec.rho = rho;
    spec.C = c_const;
    spec.epsilon = epsilon;
    spec.alpha = alpha;
    if (n_grid && n_count > 0)
      spec.n_grid.assign(n_grid, n_grid + n_count);
    if (iterations > 0) spec.iterations = iterations;
    if (burn_in >= 0) spec.burn_in = burn_in;
    spec.seed = seed;
    auto rows = bridge::consistency_experiment(spec);
    std::ostringstream out;
    out << "n,p,lambda,mass_outside\n";
    for (const auto& r : rows)
      out << r.n << ',' << r.p << ',' << bridge::format_double(r.lambda) << ','
          << bridge::format_double(r.mass_outside) << '\n';
    *csv_out = dup_string(out.str());
  });
}

br_status br_mv_fit(int64_t n, int64_t m, int64_t p, const double* y_rowmajor,
                    const double* x_rowmajor, const br_options* opts, double** beta_mean_out,
                    double** sigma_mean_out) {
  if (!y_rowmajor || !x_rowmajor || !opts) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    bridge::MVDataset d;
    d.Y = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        y_rowmajor, n, m);
    d.X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        x_rowmajor, n, p);
    bridge::MVHyperparams h;
    h.e1 = opts->e1; h.f1 = opts->f1; h.e2 = opts->e2; h.f2 = opts->f2;
    h.k1 = opts->k1; h.k2 = opts->k2;
    h.iterations = opts->iterations;
    h.burn_in = opts->burn_in;
    h.thin = opts->thin;
    h.seed = opts->seed;
    bridge::MVSamplerConfig c;
    if (opts->alpha_fixed > 0) c.alpha_fixed = opts->alpha_fixed;
    auto out = bridge::mv_run_chain(d, h, c);
    if (beta_mean_out) {
      auto* arr = static_cast<double*>(std::malloc(sizeof(double) * p * m));
      Eigen::Map<bridge::Vector>(arr, p * m) = out.beta_draws().colwise().mean().transpose();
      *beta_mean_out = arr;
    }
    if (sigma_mean_out) {
      auto* arr = static_cast<double*>(std::malloc(sizeof(double) * m * m));
      Eigen::Map<bridge::Vector>(arr, m * m) = out.sigma_draws().colwise().mean().transpose();
      *sigma_mean_out = arr;
    }
  });
}

br_status br_mv_example(uint64_t seed, int64_t iterations, int64_t burn_in,
                        double* max_abs_diff_out) {
  if (!max_abs_diff_out) return fail(BR_ERR_VALIDATION, "null argument");
  return guarded([&] {
    auto g = bridge::generate_mv7(seed);
    bridge::MVHyperparams h;
    h.iterations = iterations > 0 ? iterations : 20000;
    h.burn_in = burn_in >= 0 ? burn_in : 2000;
    h.seed = seed;
    auto out = bridge::mv_run_chain(g.data, h, {});
    bridge::Vector beta_mean = out.beta_draws().colwise().mean().transpose();
    const Eigen::Map<const bridge::Vector> truth(g.beta_true.data(), g.beta_true.size());
    *max_abs_diff_out = (beta_mean - truth).cwiseAbs().maxCoeff();
  });
}

}  // extern "C"
