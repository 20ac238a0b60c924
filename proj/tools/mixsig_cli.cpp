// Copyright 2026 The mixsig Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// mixsig command-line front end: generate, fit, experiment (run), metrics.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mixsig.hpp"

namespace fs = std::filesystem;
using namespace mixsig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFailures = 2;
constexpr int kExitRuntime = 3;

ExperimentConfig config_or_default(const std::string& path) {
  if (path.empty()) {
    ExperimentConfig cfg;
    cfg.validate();
    return cfg;
  }
  return load_config(path);
}

int threads_from_env() {
  const char* env = std::getenv("MIXSIG_THREADS");
  if (!env || !*env) return 0;
  try {
    const int v = std::stoi(env);
    if (v >= 1) return v;
  } catch (const std::exception&) {
  }
  std::cerr << "warning: ignoring invalid MIXSIG_THREADS='" << env << "'\n";
  return 0;
}

void write_cores_csv(const fs::path& path, const std::vector<Graph>& graphs) {
  std::ofstream out(path);
  if (!out) throw io::IoError("cannot write " + path.string());
  for (const Graph& g : graphs) {
    for (std::size_t i = 0; i < g.core_set.size(); ++i)
      out << (i ? "," : "") << g.core_set[i];
    out << '\n';
  }
}

std::vector<std::vector<Index>> read_cores_csv(const std::string& path) {
  const Matrix M = io::read_matrix_csv(path);
  std::vector<std::vector<Index>> cores(M.rows());
  for (Index r = 0; r < M.rows(); ++r)
    for (Index c = 0; c < M.cols(); ++c)
      cores[r].push_back(static_cast<Index>(M(r, c)));
  return cores;
}

struct GenerateArgs {
  std::string config;
  std::string out;
  int C = 2;
  int trial = 0;
  std::optional<std::uint64_t> seed;
};

int cmd_generate(const GenerateArgs& a) {
  ExperimentConfig cfg = config_or_default(a.config);
  if (a.seed) cfg.seed = *a.seed;
  Rng rng(trial_seed(cfg.seed, a.C, a.trial));
  const Dataset ds = make_trial_dataset(cfg, a.C, rng);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::write_matrix_csv((dir / "Y.csv").string(), ds.Y);
  io::write_matrix_csv((dir / "Z.csv").string(), ds.Z);
  io::write_labels_csv((dir / "labels.csv").string(), ds.true_w);
  io::write_matrix_csv((dir / "B.csv").string(), ds.truth->B);
  for (std::size_t c = 0; c < ds.truth->graphs.size(); ++c)
    io::write_matrix_csv(
        (dir / ("adjacency_" + std::to_string(c + 1) + ".csv")).string(),
        ds.truth->graphs[c].adjacency);
  write_cores_csv(dir / "cores.csv", ds.truth->graphs);
  std::cout << "wrote " << ds.m() << " samples (n=" << ds.Y.rows()
            << ", k=" << ds.Z.rows() << ", C=" << a.C << ") to " << dir.string()
            << '\n';
  return kExitOk;
}

struct FitArgs {
  std::string y_path, z_path, out;
  int C = 2;
  std::string init = "spectral";
  double sigma2 = 0.01;
  double lambda_L = EMConfig{}.lambda_L;
  double lambda_S = EMConfig{}.lambda_S;
  int T_max = 100;
  std::uint64_t seed = 1;
};

int cmd_fit(const FitArgs& a) {
  const Matrix Y = io::read_matrix_csv(a.y_path);
  const Matrix Z = io::read_matrix_csv(a.z_path);
  EMConfig cfg;
  cfg.T_max = a.T_max;
  cfg.sigma2 = a.sigma2;
  cfg.lambda_L = a.lambda_L;
  cfg.lambda_S = a.lambda_S;
  Rng rng(a.seed);
  EMResult res;
  if (a.init == "sc") {
    res = run_spectral_baseline(Y, Z, a.C, cfg, rng);
  } else {
    cfg.init = a.init == "random" ? InitKind::random : InitKind::spectral;
    res = run_em(Y, Z, a.C, cfg, rng);
  }

  const fs::path dir(a.out);
  fs::create_directories(dir);
  io::write_labels_csv((dir / "labels.csv").string(), res.w_hat);
  Matrix cent(Y.rows(), a.C);
  for (int c = 0; c < a.C; ++c) cent.col(c) = res.centralities[c];
  io::write_matrix_csv((dir / "centralities.csv").string(), cent);
  io::write_matrix_csv((dir / "S.csv").string(), res.theta.S);
  for (int c = 0; c < a.C; ++c)
    io::write_matrix_csv((dir / ("L_" + std::to_string(c + 1) + ".csv")).string(),
                         res.theta.L[c]);

  nlohmann::json j;
  j["P"] = std::vector<double>(res.theta.P.data(),
                               res.theta.P.data() + res.theta.P.size());
  std::vector<int> one_based(res.w_hat);
  for (int& w : one_based) ++w;
  j["w_hat"] = one_based;
  nlohmann::json cj = nlohmann::json::array();
  for (const Vector& v : res.centralities)
    cj.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  j["centralities"] = cj;
  j["objective_trace"] = res.objective_trace;
  std::ofstream((dir / "result.json").string()) << j.dump(2) << '\n';
  std::cout << "final objective "
            << io::format_double(res.objective_trace.back()) << ", P = ["
            << res.theta.P.transpose() << "]\n";
  return kExitOk;
}

struct ExperimentArgs {
  std::string config;
  std::string out;
  int threads = 0;
  std::optional<std::uint64_t> seed;
};

int cmd_experiment(const ExperimentArgs& a) {
  ExperimentConfig cfg = config_or_default(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads > 0) {
    cfg.threads = a.threads;
  } else if (const int env = threads_from_env(); env > 0) {
    cfg.threads = env;
  }
  cfg.validate();
  const ExperimentResults res = run_experiment(cfg);
  write_results(cfg, res, a.out);
  for (const SummaryRow& row : summarize(res))
    std::cout << row.method << " C=" << row.C << "  nmi " << row.nmi_mean
              << " +/- " << row.nmi_std << "  error " << row.error_mean
              << " +/- " << row.error_std << '\n';
  for (const FailureRecord& f : res.failures)
    std::cerr << "failed: " << f.method << " C=" << f.C << " trial=" << f.trial
              << ": " << f.message << '\n';
  if (res.failure_fraction() > 0.10) {
    std::cerr << res.failures.size() << " of " << res.attempted
              << " runs failed\n";
    return kExitFailures;
  }
  return kExitOk;
}

struct MetricsArgs {
  std::string truth_labels, est_labels;
  std::string centralities, cores;
  int top_k = 10;
};

int cmd_metrics(const MetricsArgs& a) {
  nlohmann::json j;
  if (!a.truth_labels.empty() || !a.est_labels.empty()) {
    if (a.truth_labels.empty() || a.est_labels.empty())
      throw ParameterError("--truth and --estimate must be given together");
    j["nmi"] = nmi(io::read_labels_csv(a.truth_labels),
                   io::read_labels_csv(a.est_labels));
  }
  if (!a.centralities.empty() || !a.cores.empty()) {
    if (a.centralities.empty() || a.cores.empty())
      throw ParameterError("--centralities and --cores must be given together");
    const Matrix cent = io::read_matrix_csv(a.centralities);
    std::vector<Vector> est;
    for (Index c = 0; c < cent.cols(); ++c) est.emplace_back(cent.col(c));
    j["error_rate"] =
        centrality_error_rate(est, read_cores_csv(a.cores), a.top_k);
  }
  if (j.empty()) throw ParameterError("nothing to evaluate");
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mixtures of low-pass filtered graph signals: simulate, cluster "
               "and estimate eigen-centrality"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Synthesize one dataset to CSV");
  g->add_option("--config", gen.config, "Experiment config (JSON)");
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_option("--C", gen.C, "Number of graphs")->check(CLI::PositiveNumber);
  g->add_option("--trial", gen.trial, "Trial index for seed derivation")
      ->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed, "Override the config seed");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Run EM on Y/Z CSV files");
  f->add_option("--Y", fit.y_path, "Signals, n x m CSV")->required();
  f->add_option("--Z", fit.z_path, "Excitations, k x m CSV")->required();
  f->add_option("--C", fit.C, "Number of graphs")->check(CLI::PositiveNumber);
  f->add_option("--out", fit.out, "Output directory")->required();
  f->add_option("--init", fit.init, "spectral, random or sc")
      ->check(CLI::IsMember({"spectral", "random", "sc"}));
  f->add_option("--sigma2", fit.sigma2, "Noise variance")
      ->check(CLI::PositiveNumber);
  f->add_option("--lambda-L", fit.lambda_L, "Nuclear-norm weight");
  f->add_option("--lambda-S", fit.lambda_S, "L1 weight");
  f->add_option("--T-max", fit.T_max, "Outer iterations")
      ->check(CLI::PositiveNumber);
  f->add_option("--seed", fit.seed, "RNG seed for the initializer");

  ExperimentArgs ex;
  auto* e = app.add_subcommand("experiment", "Monte-Carlo sweep");
  e->alias("run");
  e->add_option("--config", ex.config, "Experiment config (JSON)");
  e->add_option("--out", ex.out, "Output directory")->required();
  e->add_option("--threads", ex.threads, "Worker threads (env MIXSIG_THREADS)")
      ->check(CLI::PositiveNumber);
  e->add_option("--seed", ex.seed, "Override the config seed");

  MetricsArgs me;
  auto* m = app.add_subcommand("metrics", "NMI and centrality error rate");
  m->add_option("--truth", me.truth_labels, "True labels CSV (1-based)");
  m->add_option("--estimate", me.est_labels, "Estimated labels CSV (1-based)");
  m->add_option("--centralities", me.centralities,
                "Estimated centralities, one column per graph");
  m->add_option("--cores", me.cores, "True core sets, one row per graph");
  m->add_option("--top-k", me.top_k, "Central nodes per graph")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    return app.exit(err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*f) return cmd_fit(fit);
    if (*e) return cmd_experiment(ex);
    if (*m) return cmd_metrics(me);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const io::IoError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
