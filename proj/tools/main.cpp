// Command-line front end for the bridge regression shared library. All
// numeric work goes through the C API in bridgereg.h; this file only parses
// arguments and moves bytes between files and the library.
#include <bridgereg.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

[[noreturn]] void die(br_status code) {
  std::cerr << "error: " << br_last_error() << "\n";
  std::exit(code == BR_ERR_VALIDATION ? kExitValidation : kExitRuntime);
}

void check(br_status code) {
  if (code != BR_OK) die(code);
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) {
    std::cerr << "error: cannot write " << path << "\n";
    std::exit(kExitRuntime);
  }
  f << text;
}

std::uint64_t fnv1a_str(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// Every command records its resolved configuration; `rerun` replays it.
void write_manifest(const fs::path& out_dir, const std::string& command, const json& config) {
  json m;
  m["version"] = br_version();
  m["command"] = command;
  m["config"] = config;
  m["config_digest"] = fnv1a_str(config.dump());
  write_text(out_dir / "manifest.json", m.dump(2) + "\n");
}

struct FitFlags {
  br_options opts{};
  std::string data_path;
  std::string response = "y";
  std::string levels = "0.025,0.25,0.5,0.75,0.975";
  double select_level = 0.95;

  void attach(CLI::App* cmd, bool with_data) {
    br_options_defaults(&opts);
    if (with_data) {
      cmd->add_option("--data", data_path, "input CSV with header row")->required();
      cmd->add_option("--response", response, "response column name");
    }
    cmd->add_option("--iterations", opts.iterations, "MCMC iterations");
    cmd->add_option("--burn-in", opts.burn_in, "burn-in iterations");
    cmd->add_option("--thin", opts.thin, "thinning stride");
    cmd->add_option("--seed", opts.seed, "RNG seed");
    cmd->add_option("--e1", opts.e1);
    cmd->add_option("--f1", opts.f1);
    cmd->add_option("--e2", opts.e2);
    cmd->add_option("--f2", opts.f2);
    cmd->add_option("--e3", opts.e3);
    cmd->add_option("--f3", opts.f3);
    cmd->add_option("--k1", opts.k1, "alpha lower bound");
    cmd->add_option("--k2", opts.k2, "alpha upper bound");
    cmd->add_option("--v-b", opts.v_b, "RW-MH proposal sd (<=0: auto)");
    cmd->add_option("--alpha-fixed", opts.alpha_fixed, "fix alpha (<=0: sampled)");
    cmd->add_option("--gamma-fixed", opts.gamma_fixed, "fix gamma (<=0: sampled)");
    cmd->add_flag_callback("--no-adapt", [this] { opts.adapt_during_burnin = 0; },
                           "disable burn-in step-size adaptation");
    cmd->add_option("--levels", levels, "summary quantile levels");
    cmd->add_option("--select-level", select_level, "credible level for selection");
  }

  json to_json(bool with_data) const {
    json j;
    if (with_data) {
      j["data"] = data_path;
      j["response"] = response;
    }
    j["iterations"] = opts.iterations;
    j["burn_in"] = opts.burn_in;
    j["thin"] = opts.thin;
    j["seed"] = opts.seed;
    j["e1"] = opts.e1; j["f1"] = opts.f1;
    j["e2"] = opts.e2; j["f2"] = opts.f2;
    j["e3"] = opts.e3; j["f3"] = opts.f3;
    j["k1"] = opts.k1; j["k2"] = opts.k2;
    j["v_b"] = opts.v_b;
    j["alpha_fixed"] = opts.alpha_fixed;
    j["gamma_fixed"] = opts.gamma_fixed;
    j["adapt_during_burnin"] = opts.adapt_during_burnin;
    j["levels"] = levels;
    j["select_level"] = select_level;
    return j;
  }

  void from_json(const json& j, bool with_data) {
    br_options_defaults(&opts);
    if (with_data) {
      data_path = j.at("data");
      response = j.at("response");
    }
    opts.iterations = j.at("iterations");
    opts.burn_in = j.at("burn_in");
    opts.thin = j.at("thin");
    opts.seed = j.at("seed");
    opts.e1 = j.at("e1"); opts.f1 = j.at("f1");
    opts.e2 = j.at("e2"); opts.f2 = j.at("f2");
    opts.e3 = j.at("e3"); opts.f3 = j.at("f3");
    opts.k1 = j.at("k1"); opts.k2 = j.at("k2");
    opts.v_b = j.at("v_b");
    opts.alpha_fixed = j.at("alpha_fixed");
    opts.gamma_fixed = j.at("gamma_fixed");
    opts.adapt_during_burnin = j.at("adapt_during_burnin");
    levels = j.at("levels");
    select_level = j.at("select_level");
  }
};

int default_workers() {
  if (const char* env = std::getenv("BRIDGEREG_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

// ---- command implementations, shared by direct flags and `rerun` ----

void run_simulate(const std::string& scenario, std::uint64_t seed, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  br_dataset* train = nullptr;
  br_dataset* test = nullptr;
  double* beta_true = nullptr;
  int64_t beta_len = 0;
  check(br_simulate(scenario.c_str(), seed, &train, &test, &beta_true, &beta_len));
  check(br_dataset_save_csv(train, (out_dir / "train.csv").string().c_str(), "y"));
  check(br_dataset_save_csv(test, (out_dir / "test.csv").string().c_str(), "y"));
  std::ostringstream bt;
  bt << "coefficient,value\n";
  for (int64_t i = 0; i < beta_len; ++i) bt << "beta_" << i + 1 << ',' << fmt(beta_true[i]) << '\n';
  write_text(out_dir / "beta_true.csv", bt.str());
  br_array_free(beta_true);
  br_dataset_free(train);
  br_dataset_free(test);
  json cfg;
  cfg["scenario"] = scenario;
  cfg["seed"] = seed;
  write_manifest(out_dir, "simulate", cfg);
}

void run_fit(const FitFlags& ff, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  br_dataset* data = nullptr;
  check(br_dataset_load_csv(ff.data_path.c_str(), ff.response.c_str(), &data));
  br_chain* chain = nullptr;
  check(br_fit(data, &ff.opts, &chain));
  check(br_chain_save_csv(chain, (out_dir / "chain.csv").string().c_str()));
  const auto levels = parse_list(ff.levels);
  char* summary = nullptr;
  check(br_summary_json(chain, levels.data(), static_cast<int>(levels.size()), ff.select_level,
                        &summary));
  write_text(out_dir / "summary.json", std::string(summary) + "\n");
  br_string_free(summary);
  br_chain_free(chain);
  br_dataset_free(data);
  write_manifest(out_dir, "fit", ff.to_json(true));
}

void run_predict(const std::string& chain_path, const std::string& data_path,
                 const std::string& response, const std::string& levels_csv, std::uint64_t seed,
                 const fs::path& out_dir) {
  fs::create_directories(out_dir);
  br_chain* chain = nullptr;
  check(br_chain_load_csv(chain_path.c_str(), &chain));
  br_dataset* data = nullptr;
  check(br_dataset_load_csv(data_path.c_str(), response.c_str(), &data));
  const int64_t rows = br_dataset_rows(data);
  const int64_t p = br_dataset_cols(data);
  std::vector<double> x(static_cast<std::size_t>(rows * p));
  check(br_dataset_get(data, nullptr, x.data()));
  const auto levels = parse_list(levels_csv);
  std::vector<double> mean(rows), quants(static_cast<std::size_t>(rows) * levels.size());
  check(br_predict(chain, rows, p, x.data(), seed, levels.data(),
                   static_cast<int>(levels.size()), mean.data(), quants.data()));
  std::ostringstream out;
  out << "row,mean";
  for (double lv : levels) out << ",q" << lv;
  out << '\n';
  for (int64_t r = 0; r < rows; ++r) {
    out << r + 1 << ',' << fmt(mean[r]);
    for (std::size_t q = 0; q < levels.size(); ++q) out << ',' << fmt(quants[r * levels.size() + q]);
    out << '\n';
  }
  write_text(out_dir / "predictions.csv", out.str());
  br_dataset_free(data);
  br_chain_free(chain);
  json cfg;
  cfg["chain"] = chain_path;
  cfg["data"] = data_path;
  cfg["response"] = response;
  cfg["levels"] = levels_csv;
  cfg["seed"] = seed;
  write_manifest(out_dir, "predict", cfg);
}

void run_select(const std::string& chain_path, double level, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  br_chain* chain = nullptr;
  check(br_chain_load_csv(chain_path.c_str(), &chain));
  const int64_t p = br_chain_num_coeffs(chain);
  std::vector<int32_t> sel(p);
  check(br_select(chain, level, sel.data()));
  std::ostringstream out;
  out << "coefficient,selected\n";
  for (int64_t i = 0; i < p; ++i) out << "beta_" << i + 1 << ',' << sel[i] << '\n';
  write_text(out_dir / "selection.csv", out.str());
  br_chain_free(chain);
  json cfg;
  cfg["chain"] = chain_path;
  cfg["level"] = level;
  write_manifest(out_dir, "select", cfg);
}

void run_diagnose(const std::string& chain_path, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  br_chain* chain = nullptr;
  check(br_chain_load_csv(chain_path.c_str(), &chain));
  const int64_t p = br_chain_num_coeffs(chain);
  const int64_t dim = 3 * p + 2;
  std::vector<double> ess(dim), mcse(dim);
  check(br_ess(chain, ess.data(), mcse.data()));
  std::ostringstream out;
  out << "parameter,ess,mcse\n";
  auto emit = [&](const std::string& name, int64_t idx) {
    out << name << ',' << fmt(ess[idx]) << ',' << fmt(mcse[idx]) << '\n';
  };
  for (int64_t i = 0; i < p; ++i) emit("beta_" + std::to_string(i + 1), i);
  emit("gamma", p);
  emit("alpha", p + 1);
  for (int64_t i = 0; i < p; ++i) emit("lambda_" + std::to_string(i + 1), p + 2 + i);
  for (int64_t i = 0; i < p; ++i) emit("kappa_" + std::to_string(i + 1), 2 * p + 2 + i);
  write_text(out_dir / "diagnostics.csv", out.str());
  br_chain_free(chain);
  json cfg;
  cfg["chain"] = chain_path;
  write_manifest(out_dir, "diagnose", cfg);
}

struct BenchFlags {
  std::string scenario = "I";
  int reps = 50;
  std::string methods = "full";
  int workers = default_workers();
  FitFlags fit;
  // consistency-only settings
  double rho = 0.5, C = 1.0, epsilon = 0.5, alpha = 1.0;
  std::string n_grid = "100,200,400,800";
};

void run_benchmark(const BenchFlags& bf, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  char* csv = nullptr;
  if (bf.scenario == "consistency" || bf.scenario == "CONSISTENCY") {
    std::vector<int64_t> grid;
    for (double v : parse_list(bf.n_grid)) grid.push_back(static_cast<int64_t>(v));
    check(br_consistency(bf.rho, bf.C, bf.epsilon, bf.alpha, grid.data(),
                         static_cast<int>(grid.size()), bf.fit.opts.iterations,
                         bf.fit.opts.burn_in, bf.fit.opts.seed, &csv));
    write_text(out_dir / "consistency.csv", csv);
  } else {
    check(br_benchmark(bf.scenario.c_str(), bf.reps, bf.methods.c_str(), &bf.fit.opts, bf.workers,
                       &csv));
    write_text(out_dir / "benchmark.csv", csv);
  }
  br_string_free(csv);
  json cfg = bf.fit.to_json(false);
  cfg["scenario"] = bf.scenario;
  cfg["reps"] = bf.reps;
  cfg["methods"] = bf.methods;
  cfg["workers"] = bf.workers;
  cfg["rho"] = bf.rho;
  cfg["C"] = bf.C;
  cfg["epsilon"] = bf.epsilon;
  cfg["alpha"] = bf.alpha;
  cfg["n_grid"] = bf.n_grid;
  write_manifest(out_dir, "benchmark", cfg);
}

struct TailFlags {
  double e1 = 1.0, f1 = 1.0, e2 = 1.0, f2 = 1.0, k1 = 0.5, k2 = 4.0;
  std::string grid = "0,1,2,5,10,20,50";
};

void run_tailcheck(const TailFlags& tf, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const auto ys = parse_list(tf.grid);
  std::vector<double> post_mean(ys.size()), dlogm(ys.size());
  check(br_tailcheck(tf.e1, tf.f1, tf.e2, tf.f2, tf.k1, tf.k2, ys.data(),
                     static_cast<int>(ys.size()), post_mean.data(), dlogm.data()));
  std::ostringstream out;
  out << "y,posterior_mean,shrinkage,dlog_m\n";
  for (std::size_t i = 0; i < ys.size(); ++i)
    out << fmt(ys[i]) << ',' << fmt(post_mean[i]) << ',' << fmt(ys[i] - post_mean[i]) << ','
        << fmt(dlogm[i]) << '\n';
  write_text(out_dir / "tailcheck.csv", out.str());
  json cfg;
  cfg["e1"] = tf.e1; cfg["f1"] = tf.f1;
  cfg["e2"] = tf.e2; cfg["f2"] = tf.f2;
  cfg["k1"] = tf.k1; cfg["k2"] = tf.k2;
  cfg["grid"] = tf.grid;
  write_manifest(out_dir, "tailcheck", cfg);
}

int run_rerun(const fs::path& manifest_path, fs::path out_dir) {
  std::ifstream f(manifest_path);
  if (!f) {
    std::cerr << "error: cannot open manifest " << manifest_path << "\n";
    return kExitValidation;
  }
  json m = json::parse(f, nullptr, false);
  if (m.is_discarded() || !m.contains("command") || !m.contains("config")) {
    std::cerr << "error: malformed manifest " << manifest_path << "\n";
    return kExitValidation;
  }
  if (out_dir.empty()) out_dir = manifest_path.parent_path();
  const std::string command = m["command"];
  const json& cfg = m["config"];
  if (command == "simulate") {
    run_simulate(cfg.at("scenario"), cfg.at("seed"), out_dir);
  } else if (command == "fit") {
    FitFlags ff;
    ff.from_json(cfg, true);
    run_fit(ff, out_dir);
  } else if (command == "predict") {
    run_predict(cfg.at("chain"), cfg.at("data"), cfg.at("response"), cfg.at("levels"),
                cfg.at("seed"), out_dir);
  } else if (command == "select") {
    run_select(cfg.at("chain"), cfg.at("level"), out_dir);
  } else if (command == "diagnose") {
    run_diagnose(cfg.at("chain"), out_dir);
  } else if (command == "benchmark") {
    BenchFlags bf;
    bf.fit.from_json(cfg, false);
    bf.scenario = cfg.at("scenario");
    bf.reps = cfg.at("reps");
    bf.methods = cfg.at("methods");
    bf.workers = cfg.at("workers");
    bf.rho = cfg.at("rho");
    bf.C = cfg.at("C");
    bf.epsilon = cfg.at("epsilon");
    bf.alpha = cfg.at("alpha");
    bf.n_grid = cfg.at("n_grid");
    run_benchmark(bf, out_dir);
  } else if (command == "tailcheck") {
    TailFlags tf;
    tf.e1 = cfg.at("e1"); tf.f1 = cfg.at("f1");
    tf.e2 = cfg.at("e2"); tf.f2 = cfg.at("f2");
    tf.k1 = cfg.at("k1"); tf.k2 = cfg.at("k2");
    tf.grid = cfg.at("grid");
    run_tailcheck(tf, out_dir);
  } else {
    std::cerr << "error: unknown command in manifest: " << command << "\n";
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fully Bayesian penalized regression under a generalized bridge prior"};
  app.require_subcommand(1);

  std::string out_dir = "out";

  auto* sim = app.add_subcommand("simulate", "generate a synthetic scenario dataset");
  std::string sim_scenario = "I";
  std::uint64_t sim_seed = 0;
  sim->add_option("--scenario", sim_scenario, "scenario id (I..VI)")->required();
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", out_dir, "output directory");

  auto* fit = app.add_subcommand("fit", "run the MCMC sampler on a CSV dataset");
  FitFlags ff;
  ff.attach(fit, true);
  fit->add_option("--out", out_dir, "output directory");

  auto* pred = app.add_subcommand("predict", "posterior predictive summaries for new rows");
  std::string pr_chain, pr_data, pr_response = "y", pr_levels = "0.025,0.975";
  std::uint64_t pr_seed = 0;
  pred->add_option("--chain", pr_chain, "chain CSV from fit")->required();
  pred->add_option("--data", pr_data, "CSV with design rows")->required();
  pred->add_option("--response", pr_response, "response column to drop");
  pred->add_option("--levels", pr_levels, "predictive quantile levels");
  pred->add_option("--seed", pr_seed, "RNG seed for predictive noise");
  pred->add_option("--out", out_dir, "output directory");

  auto* sel = app.add_subcommand("select", "credible-interval variable selection");
  std::string se_chain;
  double se_level = 0.95;
  sel->add_option("--chain", se_chain, "chain CSV from fit")->required();
  sel->add_option("--level", se_level, "credible level");
  sel->add_option("--out", out_dir, "output directory");

  auto* diag = app.add_subcommand("diagnose", "effective sample size and MCSE per parameter");
  std::string di_chain;
  diag->add_option("--chain", di_chain, "chain CSV from fit")->required();
  diag->add_option("--out", out_dir, "output directory");

  auto* bench = app.add_subcommand("benchmark", "replicated simulation study or consistency run");
  BenchFlags bf;
  bench->add_option("--scenario", bf.scenario, "scenario id (I..VI or consistency)")->required();
  bench->add_option("--reps", bf.reps, "number of replications");
  bench->add_option("--methods", bf.methods, "comma list: full,alpha_fixed_1,alpha_fixed_2");
  bench->add_option("--workers", bf.workers, "parallel workers (env BRIDGEREG_WORKERS)");
  bench->add_option("--rho", bf.rho, "consistency: rate exponent");
  bench->add_option("--C", bf.C, "consistency: schedule constant");
  bench->add_option("--epsilon", bf.epsilon, "consistency: ball radius");
  bench->add_option("--alpha", bf.alpha, "consistency: fixed alpha");
  bench->add_option("--n-grid", bf.n_grid, "consistency: sample sizes");
  bf.fit.attach(bench, false);
  bench->add_option("--out", out_dir, "output directory");

  auto* tail = app.add_subcommand("tailcheck", "tail-robustness sweep of the 1-D oracle");
  TailFlags tf;
  tail->add_option("--e1", tf.e1);
  tail->add_option("--f1", tf.f1);
  tail->add_option("--e2", tf.e2);
  tail->add_option("--f2", tf.f2);
  tail->add_option("--k1", tf.k1);
  tail->add_option("--k2", tf.k2);
  tail->add_option("--grid", tf.grid, "comma list of y values");
  tail->add_option("--out", out_dir, "output directory");

  auto* rerun = app.add_subcommand("rerun", "replay a command from its manifest");
  std::string rr_manifest;
  std::string rr_out;
  rerun->add_option("manifest", rr_manifest, "path to manifest.json")->required();
  rerun->add_option("--out", rr_out, "output directory (default: manifest directory)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) run_simulate(sim_scenario, sim_seed, out_dir);
    else if (fit->parsed()) run_fit(ff, out_dir);
    else if (pred->parsed()) run_predict(pr_chain, pr_data, pr_response, pr_levels, pr_seed, out_dir);
    else if (sel->parsed()) run_select(se_chain, se_level, out_dir);
    else if (diag->parsed()) run_diagnose(di_chain, out_dir);
    else if (bench->parsed()) run_benchmark(bf, out_dir);
    else if (tail->parsed()) run_tailcheck(tf, out_dir);
    else if (rerun->parsed()) return run_rerun(rr_manifest, rr_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
