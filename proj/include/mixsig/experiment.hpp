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

#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mixsig/core.hpp"
#include "mixsig/em.hpp"
#include "mixsig/filters.hpp"
#include "mixsig/graphs.hpp"
#include "mixsig/io.hpp"
#include "mixsig/metrics.hpp"
#include "mixsig/mixture.hpp"

namespace mixsig {

/// Invalid experiment configuration; the message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Method { em_spectral, em_random, sc_only };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::em_spectral:
      return "em_spectral";
    case Method::em_random:
      return "em_random";
    case Method::sc_only:
      return "sc_only";
  }
  return "?";
}

inline Method parse_method(const std::string& s) {
  if (s == "em_spectral") return Method::em_spectral;
  if (s == "em_random") return Method::em_random;
  if (s == "sc_only") return Method::sc_only;
  throw ConfigError("methods: unknown method '" + s +
                    "' (expected em_spectral, em_random or sc_only)");
}

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int n = 100;
  int core_size = 10;
  double p_core_periph = 0.2;
  double p_periph = 0.05;
  std::vector<int> C_values{2, 3, 4};
  int m_per_graph = 200;
  int trials = 20;
  FilterSpec filter = FilterSpec::resolvent(1.0 / 40.0);
  int k = 40;
  double b_density = 0.1;
  double z_density = 0.6;
  double sigma2 = 0.01;
  double lambda_L = 3.0;
  double lambda_S = 0.3;
  int T_max = 100;
  SolverConfig solver;
  std::vector<Method> methods{Method::em_spectral, Method::em_random,
                              Method::sc_only};
  // Per-iteration NMI is recorded for the first trace_trials trials at C =
  // trace_C (0 means the first entry of C_values).
  int trace_C = 0;
  int trace_trials = 1;
  // When false the seconds column is written as 0 so outputs are
  // byte-reproducible.
  bool timing = true;
  int threads = 1;

  void validate() const {
    auto positive = [](int v, const char* field) {
      if (v < 1) throw ConfigError(std::string(field) + ": must be >= 1");
    };
    auto fraction = [](double v, const char* field) {
      if (!(v >= 0.0 && v <= 1.0))
        throw ConfigError(std::string(field) + ": must lie in [0, 1]");
    };
    positive(n, "n");
    positive(core_size, "core_size");
    if (core_size > n) throw ConfigError("core_size: must not exceed n");
    fraction(p_core_periph, "p_core_periph");
    fraction(p_periph, "p_periph");
    if (C_values.empty()) throw ConfigError("C_values: must not be empty");
    for (int c : C_values) positive(c, "C_values");
    positive(m_per_graph, "m_per_graph");
    positive(trials, "trials");
    positive(k, "k");
    if (k > n) throw ConfigError("k: must not exceed n");
    fraction(b_density, "b_density");
    fraction(z_density, "z_density");
    if (!(sigma2 > 0.0)) throw ConfigError("sigma2: must be positive");
    if (!(lambda_L >= 0.0)) throw ConfigError("lambda_L: must be >= 0");
    if (!(lambda_S >= 0.0)) throw ConfigError("lambda_S: must be >= 0");
    positive(T_max, "T_max");
    positive(solver.max_iter, "solver.max_iter");
    if (!(solver.tol > 0.0)) throw ConfigError("solver.tol: must be positive");
    if (methods.empty()) throw ConfigError("methods: must not be empty");
    if (trace_trials < 0) throw ConfigError("trace_trials: must be >= 0");
    positive(threads, "threads");
    if (filter.kind == FilterSpec::Kind::polynomial && filter.coeffs.empty())
      throw ConfigError("filter.coeffs: must not be empty");
  }

  int traced_C() const { return trace_C > 0 ? trace_C : C_values.front(); }
};

namespace detail {

template <typename T>
T get_field(const nlohmann::json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(path + ": wrong type (got " + std::string(j.type_name()) +
                      ")");
  }
}

inline FilterSpec parse_filter(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("filter: must be an object");
  for (const auto& [key, _] : j.items())
    if (key != "kind" && key != "alpha" && key != "coeffs")
      throw ConfigError("filter." + key + ": unknown field");
  if (!j.contains("kind")) throw ConfigError("filter.kind: missing");
  const auto kind = get_field<std::string>(j.at("kind"), "filter.kind");
  if (kind == "resolvent") {
    if (!j.contains("alpha")) throw ConfigError("filter.alpha: missing");
    return FilterSpec::resolvent(get_field<double>(j.at("alpha"), "filter.alpha"));
  }
  if (kind == "polynomial") {
    if (!j.contains("coeffs")) throw ConfigError("filter.coeffs: missing");
    auto coeffs =
        get_field<std::vector<double>>(j.at("coeffs"), "filter.coeffs");
    if (coeffs.empty()) throw ConfigError("filter.coeffs: must not be empty");
    return FilterSpec::polynomial(std::move(coeffs));
  }
  throw ConfigError("filter.kind: expected 'resolvent' or 'polynomial'");
}

inline nlohmann::json filter_to_json(const FilterSpec& f) {
  if (f.kind == FilterSpec::Kind::resolvent)
    return {{"kind", "resolvent"}, {"alpha", f.alpha}};
  return {{"kind", "polynomial"}, {"coeffs", f.coeffs}};
}

}  // namespace detail

/// Reads a config from JSON; missing fields keep their defaults and unknown
/// fields are rejected.
inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::get_field;
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig cfg;
  for (const auto& [key, val] : j.items()) {
    if (key == "seed") cfg.seed = get_field<std::uint64_t>(val, key);
    else if (key == "n") cfg.n = get_field<int>(val, key);
    else if (key == "core_size") cfg.core_size = get_field<int>(val, key);
    else if (key == "p_core_periph") cfg.p_core_periph = get_field<double>(val, key);
    else if (key == "p_periph") cfg.p_periph = get_field<double>(val, key);
    else if (key == "C_values") cfg.C_values = get_field<std::vector<int>>(val, key);
    else if (key == "m_per_graph") cfg.m_per_graph = get_field<int>(val, key);
    else if (key == "trials") cfg.trials = get_field<int>(val, key);
    else if (key == "filter") cfg.filter = detail::parse_filter(val);
    else if (key == "k") cfg.k = get_field<int>(val, key);
    else if (key == "b_density") cfg.b_density = get_field<double>(val, key);
    else if (key == "z_density") cfg.z_density = get_field<double>(val, key);
    else if (key == "sigma2") cfg.sigma2 = get_field<double>(val, key);
    else if (key == "lambda_L") cfg.lambda_L = get_field<double>(val, key);
    else if (key == "lambda_S") cfg.lambda_S = get_field<double>(val, key);
    else if (key == "T_max") cfg.T_max = get_field<int>(val, key);
    else if (key == "solver") {
      if (!val.is_object()) throw ConfigError("solver: must be an object");
      for (const auto& [sk, sv] : val.items()) {
        const std::string path = "solver." + sk;
        if (sk == "max_iter") cfg.solver.max_iter = get_field<int>(sv, path);
        else if (sk == "tol") cfg.solver.tol = get_field<double>(sv, path);
        else if (sk == "acceleration") cfg.solver.acceleration = get_field<bool>(sv, path);
        else throw ConfigError(path + ": unknown field");
      }
    } else if (key == "methods") {
      cfg.methods.clear();
      for (const auto& s : get_field<std::vector<std::string>>(val, key))
        cfg.methods.push_back(parse_method(s));
    }
    else if (key == "trace_C") cfg.trace_C = get_field<int>(val, key);
    else if (key == "trace_trials") cfg.trace_trials = get_field<int>(val, key);
    else if (key == "timing") cfg.timing = get_field<bool>(val, key);
    else if (key == "threads") cfg.threads = get_field<int>(val, key);
    else throw ConfigError(key + ": unknown field");
  }
  cfg.validate();
  return cfg;
}

/// Parses JSON text; syntax errors report line and column.
inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ", column " + std::to_string(col) + ": " + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  std::vector<std::string> methods;
  for (Method m : c.methods) methods.emplace_back(method_name(m));
  return {{"seed", c.seed},
          {"n", c.n},
          {"core_size", c.core_size},
          {"p_core_periph", c.p_core_periph},
          {"p_periph", c.p_periph},
          {"C_values", c.C_values},
          {"m_per_graph", c.m_per_graph},
          {"trials", c.trials},
          {"filter", detail::filter_to_json(c.filter)},
          {"k", c.k},
          {"b_density", c.b_density},
          {"z_density", c.z_density},
          {"sigma2", c.sigma2},
          {"lambda_L", c.lambda_L},
          {"lambda_S", c.lambda_S},
          {"T_max", c.T_max},
          {"solver",
           {{"max_iter", c.solver.max_iter},
            {"tol", c.solver.tol},
            {"acceleration", c.solver.acceleration}}},
          {"methods", methods},
          {"trace_C", c.trace_C},
          {"trace_trials", c.trace_trials},
          {"timing", c.timing}};
}

struct TrialRecord {
  std::string method;
  int C = 0;
  int trial = 0;
  double nmi = 0.0;
  double error_rate = 0.0;
  double seconds = 0.0;
  int iterations = 0;
};

struct TraceRecord {
  std::string method;
  int C = 0;
  int trial = 0;
  int iteration = 0;
  double nmi = 0.0;
};

struct FailureRecord {
  std::string method;
  int C = 0;
  int trial = 0;
  std::string message;
};

struct ExperimentResults {
  std::vector<TrialRecord> trials;  // sorted by (C, trial, method order)
  std::vector<TraceRecord> traces;
  std::vector<FailureRecord> failures;
  int attempted = 0;

  double failure_fraction() const {
    return attempted == 0 ? 0.0
                          : static_cast<double>(failures.size()) / attempted;
  }
};

/// Seed of trial `trial` at component count C; independent of the other
/// entries of C_values.
inline std::uint64_t trial_seed(std::uint64_t seed, int C, int trial) {
  return derive_seed(seed, static_cast<std::uint64_t>(C),
                     static_cast<std::uint64_t>(trial));
}

/// Synthetic data for one trial: C core-periphery graphs (re-drawn while two
/// graphs share all but at most one core node), basis, excitations, samples.
inline Dataset make_trial_dataset(const ExperimentConfig& cfg, int C, Rng& rng) {
  std::vector<Graph> graphs;
  graphs.reserve(C);
  const Index clash = std::max<Index>(cfg.core_size - 1, 1);
  while (static_cast<int>(graphs.size()) < C) {
    Graph g = generate_cp_graph(cfg.n, cfg.core_size, cfg.p_core_periph,
                                cfg.p_periph, rng);
    bool distinct = true;
    if (cfg.core_size > 1)
      for (const Graph& h : graphs)
        if (core_overlap(g, h) >= clash) distinct = false;
    if (!distinct) continue;
    if (!is_connected(g)) warn("generated graph is disconnected");
    graphs.push_back(std::move(g));
  }
  const ExcitationBasis basis = generate_basis(cfg.n, cfg.k, cfg.b_density, rng);
  const Index m = static_cast<Index>(cfg.m_per_graph) * C;
  const Matrix Z = generate_excitations(cfg.k, m, cfg.z_density, rng);
  const std::vector<double> P(C, 1.0 / C);
  return sample_dataset(graphs, cfg.filter, basis, Z, P, cfg.sigma2, rng);
}

inline EMConfig em_config_for(const ExperimentConfig& cfg, InitKind init) {
  EMConfig em;
  em.T_max = cfg.T_max;
  em.sigma2 = cfg.sigma2;
  em.lambda_L = cfg.lambda_L;
  em.lambda_S = cfg.lambda_S;
  em.solver = cfg.solver;
  em.init = init;
  return em;
}

namespace detail {

struct TrialOutput {
  std::vector<TrialRecord> records;
  std::vector<TraceRecord> traces;
  std::vector<FailureRecord> failures;
  int attempted = 0;
};

inline TrialOutput run_trial(const ExperimentConfig& cfg, int C, int trial) {
  TrialOutput out;
  const std::uint64_t seed = trial_seed(cfg.seed, C, trial);
  Dataset ds;
  try {
    Rng data_rng(seed);
    ds = make_trial_dataset(cfg, C, data_rng);
  } catch (const std::exception& e) {
    for (Method m : cfg.methods) {
      ++out.attempted;
      out.failures.push_back({method_name(m), C, trial,
                              std::string("data generation: ") + e.what()});
    }
    return out;
  }
  std::vector<std::vector<Index>> cores;
  for (const Graph& g : ds.truth->graphs) cores.push_back(g.core_set);
  const bool traced = C == cfg.traced_C() && trial < cfg.trace_trials;

  for (Method method : cfg.methods) {
    ++out.attempted;
    Rng rng(derive_seed(seed, 0x6d657468ULL, static_cast<std::uint64_t>(method)));
    const auto start = std::chrono::steady_clock::now();
    try {
      EMResult res;
      int iterations = 0;
      std::vector<TraceRecord> trace;
      if (method == Method::sc_only) {
        res = run_spectral_baseline(ds.Y, ds.Z, C,
                                    em_config_for(cfg, InitKind::spectral), rng);
        iterations = 1;
      } else {
        const InitKind init = method == Method::em_spectral ? InitKind::spectral
                                                            : InitKind::random;
        EMObserver obs;
        if (traced) {
          obs = [&](int round, const Theta&, const Responsibilities& W) {
            const std::vector<int> labels = W.hard_labels();
            trace.push_back(
                {method_name(method), C, trial, round, nmi(ds.true_w, labels)});
          };
        }
        res = run_em(ds.Y, ds.Z, C, em_config_for(cfg, init), rng, obs);
        iterations = cfg.T_max;
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
              .count();
      TrialRecord rec;
      rec.method = method_name(method);
      rec.C = C;
      rec.trial = trial;
      rec.nmi = nmi(ds.true_w, res.w_hat);
      rec.error_rate = centrality_error_rate(res.centralities, cores,
                                             static_cast<Index>(cfg.core_size));
      rec.seconds = cfg.timing ? secs : 0.0;
      rec.iterations = iterations;
      out.records.push_back(rec);
      out.traces.insert(out.traces.end(), trace.begin(), trace.end());
    } catch (const std::exception& e) {
      out.failures.push_back({method_name(method), C, trial, e.what()});
    }
  }
  return out;
}

}  // namespace detail

/**
 * Monte-Carlo sweep over C_values x trials. Trials run on cfg.threads worker
 * threads; results are collected in (C, trial) order regardless of
 * scheduling.
 */
inline ExperimentResults run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::vector<std::pair<int, int>> jobs;
  for (int C : cfg.C_values)
    for (int t = 0; t < cfg.trials; ++t) jobs.emplace_back(C, t);

  std::vector<detail::TrialOutput> outputs(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++)
      outputs[i] = detail::run_trial(cfg, jobs[i].first, jobs[i].second);
  };
  const int nthreads =
      std::max(1, std::min<int>(cfg.threads, static_cast<int>(jobs.size())));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ExperimentResults res;
  for (auto& o : outputs) {
    res.attempted += o.attempted;
    res.trials.insert(res.trials.end(), o.records.begin(), o.records.end());
    res.traces.insert(res.traces.end(), o.traces.begin(), o.traces.end());
    res.failures.insert(res.failures.end(), o.failures.begin(),
                        o.failures.end());
  }
  return res;
}

struct SummaryRow {
  std::string method;
  int C = 0;
  int count = 0;
  double nmi_mean = 0.0, nmi_std = 0.0;
  double error_mean = 0.0, error_std = 0.0;
  double seconds_mean = 0.0;
};

inline std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size() - 1))};
}

/// Per (method, C) aggregates in the order methods first appear, then by C.
inline std::vector<SummaryRow> summarize(const ExperimentResults& r) {
  std::vector<std::string> order;
  for (const auto& t : r.trials)
    if (std::find(order.begin(), order.end(), t.method) == order.end())
      order.push_back(t.method);
  std::vector<SummaryRow> rows;
  for (const std::string& method : order) {
    std::set<int> cs;
    for (const auto& t : r.trials)
      if (t.method == method) cs.insert(t.C);
    for (int C : cs) {
      std::vector<double> nm, er, sec;
      for (const auto& t : r.trials) {
        if (t.method != method || t.C != C) continue;
        nm.push_back(t.nmi);
        er.push_back(t.error_rate);
        sec.push_back(t.seconds);
      }
      SummaryRow row;
      row.method = method;
      row.C = C;
      row.count = static_cast<int>(nm.size());
      std::tie(row.nmi_mean, row.nmi_std) = mean_std(nm);
      std::tie(row.error_mean, row.error_std) = mean_std(er);
      row.seconds_mean = mean_std(sec).first;
      rows.push_back(row);
    }
  }
  return rows;
}

/**
 * Plot series: one per (method, metric) against C, plus one NMI-by-iteration
 * series per traced method. Bands are mean +/- sample standard deviation.
 */
inline nlohmann::json emit_plot_data(const ExperimentResults& r) {
  require(!r.trials.empty() || !r.traces.empty(), "no results to plot");
  nlohmann::json series = nlohmann::json::array();
  const std::vector<SummaryRow> rows = summarize(r);
  std::vector<std::string> order;
  for (const auto& row : rows)
    if (std::find(order.begin(), order.end(), row.method) == order.end())
      order.push_back(row.method);
  for (const std::string& method : order) {
    for (const char* metric : {"nmi", "error_rate"}) {
      nlohmann::json s = {{"method", method}, {"metric", metric}, {"x_label", "C"}};
      std::vector<double> x, y, lo, hi;
      for (const auto& row : rows) {
        if (row.method != method) continue;
        const bool is_nmi = std::string(metric) == "nmi";
        const double mean = is_nmi ? row.nmi_mean : row.error_mean;
        const double sd = is_nmi ? row.nmi_std : row.error_std;
        x.push_back(row.C);
        y.push_back(mean);
        lo.push_back(mean - sd);
        hi.push_back(mean + sd);
      }
      s["x"] = x;
      s["y"] = y;
      s["y_lo"] = lo;
      s["y_hi"] = hi;
      series.push_back(std::move(s));
    }
  }

  std::map<std::string, std::map<int, std::vector<double>>> by_iter;
  std::vector<std::string> trace_order;
  for (const auto& t : r.traces) {
    if (!by_iter.count(t.method)) trace_order.push_back(t.method);
    by_iter[t.method][t.iteration].push_back(t.nmi);
  }
  for (const std::string& method : trace_order) {
    nlohmann::json s = {{"method", method},
                        {"metric", "nmi_by_iteration"},
                        {"x_label", "iteration"}};
    std::vector<double> x, y, lo, hi;
    for (const auto& [it, vals] : by_iter[method]) {
      const auto [mean, sd] = mean_std(vals);
      x.push_back(it);
      y.push_back(mean);
      lo.push_back(mean - sd);
      hi.push_back(mean + sd);
    }
    s["x"] = x;
    s["y"] = y;
    s["y_lo"] = lo;
    s["y_hi"] = hi;
    series.push_back(std::move(s));
  }
  return {{"series", series}};
}

/// Writes trials.csv, summary.csv, traces.csv, failures.csv, plot_data.json
/// and the resolved config.json into out_dir.
inline void write_results(const ExperimentConfig& cfg,
                          const ExperimentResults& r,
                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  using io::format_double;
  auto open = [&](const char* name) {
    std::ofstream f(out_dir / name);
    if (!f) throw io::IoError("cannot write " + (out_dir / name).string());
    return f;
  };
  {
    auto f = open("trials.csv");
    f << "method,C,trial,nmi,error_rate,seconds,iterations\n";
    for (const auto& t : r.trials)
      f << t.method << ',' << t.C << ',' << t.trial << ',' << format_double(t.nmi)
        << ',' << format_double(t.error_rate) << ','
        << format_double(t.seconds) << ',' << t.iterations << '\n';
  }
  {
    auto f = open("summary.csv");
    f << "method,C,trials,nmi_mean,nmi_std,error_rate_mean,error_rate_std,"
         "seconds_mean\n";
    for (const auto& s : summarize(r))
      f << s.method << ',' << s.C << ',' << s.count << ','
        << format_double(s.nmi_mean) << ',' << format_double(s.nmi_std) << ','
        << format_double(s.error_mean) << ',' << format_double(s.error_std)
        << ',' << format_double(s.seconds_mean) << '\n';
  }
  {
    auto f = open("traces.csv");
    f << "method,C,trial,iteration,nmi\n";
    for (const auto& t : r.traces)
      f << t.method << ',' << t.C << ',' << t.trial << ',' << t.iteration << ','
        << format_double(t.nmi) << '\n';
  }
  {
    auto f = open("failures.csv");
    f << "method,C,trial,message\n";
    for (const auto& x : r.failures) {
      std::string msg = x.message;
      std::replace(msg.begin(), msg.end(), '"', '\'');
      f << x.method << ',' << x.C << ',' << x.trial << ",\"" << msg << "\"\n";
    }
  }
  if (!r.trials.empty() || !r.traces.empty()) {
    auto f = open("plot_data.json");
    f << emit_plot_data(r).dump(2) << '\n';
  }
  {
    auto f = open("config.json");
    f << config_to_json(cfg).dump(2) << '\n';
  }
}

}  // namespace mixsig
