#pragma once

#include "multivariate.hpp"
#include "types.hpp"

#include <string>
#include <vector>

namespace bridge {

enum class ScenarioId { I, II, III, IV, V, VI, MV7, Consistency };

ScenarioId scenario_from_string(const std::string& s);
std::string scenario_to_string(ScenarioId id);

enum class CorrelationKind { ArDecay, Compound };  // 0.5^|i-j| vs constant 0.5

// Declarative description of a synthetic-data regime. Defaults per scenario
// come from scenario_spec(); fields may be overridden before generate().
struct ScenarioSpec {
  ScenarioId id = ScenarioId::I;
  Eigen::Index n_train = 100;
  Eigen::Index n_test = 900;
  Eigen::Index p = 20;  // non-intercept coefficients
  CorrelationKind correlation = CorrelationKind::ArDecay;
  double noise_scale = 2.0;
  std::uint64_t seed = 0;
};

ScenarioSpec scenario_spec(ScenarioId id, std::uint64_t seed);

struct GeneratedData {
  Dataset train;
  Dataset test;
  Vector beta_true;  // length p+1, intercept first
};

GeneratedData generate(const ScenarioSpec& spec);

struct ConsistencySpec {
  double rho = 0.5;
  double C = 1.0;
  std::vector<Eigen::Index> n_grid = {100, 200, 400, 800};
  double p_exponent = 0.6;  // p_n = floor(n^p_exponent)
  double epsilon = 0.5;
  double alpha = 1.0;
  double gamma_true = 1.0;
  Eigen::Index num_nonzero = 2;
  double signal = 1.0;
  std::int64_t iterations = 5000;
  std::int64_t burn_in = 1000;
  std::uint64_t seed = 0;

  void validate() const;

  double lambda_schedule(Eigen::Index n, Eigen::Index p) const;
};

struct ConsistencyRow {
  Eigen::Index n;
  Eigen::Index p;
  double lambda;
  double mass_outside;  // estimated posterior mass of ||beta - beta0|| > eps
};

std::vector<ConsistencyRow> consistency_experiment(const ConsistencySpec& spec);

// Multivariate example: n=100, p=21 (intercept + 20), m=10; per response
// column two of the 20 predictors carry N(15, 3^2) coefficients; Sigma = LL'
// with a sparse lower-triangular L.
struct MVGenerated {
  MVDataset data;
  Matrix beta_true;   // p x m
  Matrix sigma_true;  // m x m
};

MVGenerated generate_mv7(std::uint64_t seed);

enum class FitMethod { Full, AlphaFixed1, AlphaFixed2 };
std::string method_to_string(FitMethod m);

struct ReplicateOptions {
  std::int64_t iterations = 20000;
  std::int64_t burn_in = 2000;
  std::int64_t thin = 1;
  int workers = 1;
  double select_level = 0.95;
  Hyperparams hyper;  // prior constants; iterations fields above take precedence
};

struct MethodMetrics {
  FitMethod method;
  double mean_l2 = 0.0, se_l2 = 0.0;
  double median_mse = 0.0, se_mse = 0.0;
  double avg_model_size = 0.0;
  int exact_recovery_count = 0;
  double coverage95 = 0.0;  // predictive-interval coverage, averaged over reps
  int reps = 0;
};

std::vector<MethodMetrics> replicate_study(const ScenarioSpec& spec, int reps,
                                           const std::vector<FitMethod>& methods,
                                           const ReplicateOptions& opts);

}  // namespace bridge
