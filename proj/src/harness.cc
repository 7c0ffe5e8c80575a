//
// Copyright 2026 The POOL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "pool/harness.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <optional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "pool/baselines.h"
#include "pool/csv.h"
#include "pool/inventory.h"
#include "pool/pool.h"
#include "pool/privacy.h"
#include "pool/rng.h"

namespace pool {
namespace {

constexpr uint64_t kDataKey = 1;
constexpr uint64_t kSchemeKey = 2;
constexpr uint64_t kNoiseKey = 3;
constexpr uint64_t kSaaKey = 4;
constexpr uint64_t kBaselineKey = 5;

std::string Trim(const std::string& s) {
  const size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitList(const std::string& value) {
  std::vector<std::string> out;
  for (const std::string& f : SplitCsvLine(value)) {
    const std::string t = Trim(f);
    if (!t.empty()) out.push_back(t);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

int ParseInt(const std::string& s) {
  size_t pos = 0;
  const long long v = std::stoll(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: " + s);
  return static_cast<int>(v);
}

uint64_t ParseU64(const std::string& s) {
  size_t pos = 0;
  const unsigned long long v = std::stoull(s, &pos);
  if (pos != s.size()) throw std::invalid_argument("not an integer: " + s);
  return v;
}

std::vector<double> ParseDoubles(const std::string& value) {
  std::vector<double> out;
  for (const std::string& s : SplitList(value)) out.push_back(ParseDouble(s));
  return out;
}

std::vector<int> ParseInts(const std::string& value) {
  std::vector<int> out;
  for (const std::string& s : SplitList(value)) out.push_back(ParseInt(s));
  return out;
}

template <typename T>
void SetAxis(bool swept, std::vector<T> values, std::vector<T>& grid, T& base,
             const std::string& key) {
  if (swept) {
    grid = std::move(values);
  } else if (values.size() == 1) {
    base = values[0];
  } else {
    throw std::invalid_argument("'" + key +
                                "' takes a single value unless it is swept");
  }
}

bool IsMethod(const std::string& m) {
  return m == "pool" || m == "nonprivate" || m == "ip" || m == "op";
}

struct Environments {
  InventoryParams train;
  InventoryParams test;
  double benchmark = 0.0;
  uint64_t eval_seed = 0;
};

Environments MakeEnvironments(const ExperimentConfig& config, int horizon,
                              int dims) {
  const int products = dims / 2;
  const std::string& model = config.demand_model;
  Environments env;
  if (model == "uniform") {
    env.train = MakeInventoryParams(products, horizon, config.demand_bound,
                                    config.holding_seed, config.backorder_seed,
                                    DemandModel::Uniform());
    env.test = env.train;
  } else if (model.rfind("constant:", 0) == 0) {
    env.train = MakeInventoryParams(
        products, horizon, config.demand_bound, config.holding_seed,
        config.backorder_seed, DemandModel::Constant(ParseDouble(model.substr(9))));
    env.test = env.train;
  } else if (model.rfind("csv:", 0) == 0) {
    DemandTraces traces = LoadDemandCsvFile(model.substr(4), horizon);
    if (static_cast<int>(traces.train.front().front().size()) != products) {
      throw std::invalid_argument("demand csv product count differs from dims/2");
    }
    if (traces.test.empty()) {
      throw std::invalid_argument("demand csv has no test episodes");
    }
    env.train = MakeInventoryParams(products, horizon, config.demand_bound,
                                    config.holding_seed, config.backorder_seed,
                                    DemandModel::Traces(std::move(traces.train)));
    env.test = env.train;
    env.test.demand = DemandModel::Traces(std::move(traces.test));
  } else {
    throw std::invalid_argument("unknown demand_model: " + model);
  }
  const uint64_t saa_seed =
      DeriveSeed(config.root_seed, {kSaaKey, static_cast<uint64_t>(horizon),
                                    static_cast<uint64_t>(dims)});
  const std::vector<Vector> levels =
      SaaLevels(env.train, config.saa_samples, saa_seed);
  env.eval_seed = SaaEvalSeed(saa_seed);
  const InventoryEnvironment test_env(env.test);
  const BaseStockPolicy base_stock(levels, config.demand_bound);
  env.benchmark =
      -MonteCarloValue(test_env, base_stock, config.eval_episodes, env.eval_seed)
           .mean;
  return env;
}

struct Task {
  size_t cell;
  size_t method;
  int seed;
};

ResultRow RunTask(const ExperimentConfig& config, const Cell& cell,
                  const std::string& method, int seed, const Environments& env) {
  ResultRow row;
  row.method = method;
  row.rho = cell.rho;
  row.horizon = cell.horizon;
  row.zones = cell.zones;
  row.dims = cell.dims;
  row.lambda = cell.lambda;
  row.seed = seed;
  row.delta = config.delta;
  row.benchmark_cost = env.benchmark;
  const auto start = std::chrono::steady_clock::now();

  const int products = cell.dims / 2;
  const uint64_t s = static_cast<uint64_t>(seed);
  const uint64_t h = static_cast<uint64_t>(cell.horizon);
  const uint64_t dims = static_cast<uint64_t>(cell.dims);
  const uint64_t zones = static_cast<uint64_t>(cell.zones);
  const std::vector<Vector> boundaries =
      UniformBoundaries(cell.horizon, cell.dims, cell.lambda);
  const Dataset dataset = GenerateDataset(
      env.train, UniformOrderUpTo(), config.episodes,
      DeriveSeed(config.root_seed, {kDataKey, h, dims, s}), boundaries);
  auto scheme = std::make_shared<const ZoneScheme>(BuildZoneScheme(
      products, products, cell.zones,
      DeriveSeed(config.root_seed, {kSchemeKey, zones, dims, s}),
      boundaries.front()));

  PoolConfig pc;
  pc.delta = config.delta;
  pc.pessimism.c1 = config.c1;
  pc.pessimism.c2 = config.c2;
  pc.pessimism.c_fallback = config.c_fallback;
  pc.grid_points = config.grid_points;
  pc.refine_iterations = config.refine_iterations;
  pc.action_floor = InventoryActionFloor();
  const RewardModel reward = InventoryRewardModel(env.train);
  const PrivacyBudget budget{cell.rho, config.delta};
  const uint64_t noise_seed =
      DeriveSeed(config.root_seed, {kNoiseKey, h, dims, zones, s});
  const uint64_t baseline_seed =
      DeriveSeed(config.root_seed, {kBaselineKey, h, dims, zones, s});

  std::optional<PoolRun> run;
  if (method == "pool") {
    run.emplace(TrainPool(dataset, scheme, budget, pc, boundaries, reward,
                          noise_seed));
    row.privacy = "formal";
  } else if (method == "nonprivate") {
    run.emplace(TrainNonPrivate(dataset, scheme, pc, boundaries, reward));
    row.privacy = "none";
  } else if (method == "ip") {
    run.emplace(TrainInputPerturbation(dataset, scheme, budget, pc, boundaries,
                                       reward, baseline_seed));
    row.privacy = "nominal";
  } else if (method == "op") {
    run.emplace(TrainOutputPerturbation(dataset, scheme, budget, pc,
                                        boundaries, reward, baseline_seed));
    row.privacy = "nominal";
  } else {
    throw std::invalid_argument("unknown method: " + method);
  }
  row.epsilon_at_delta = method == "nonprivate"
                             ? std::numeric_limits<double>::infinity()
                             : run->accountant.Epsilon(config.delta);

  if (!config.policy_dir.empty()) {
    std::ostringstream name;
    name << config.policy_dir << '/' << method << "_rho" << FormatDouble(cell.rho)
         << "_H" << cell.horizon << "_M" << cell.zones << "_dims" << cell.dims
         << "_lambda" << FormatDouble(cell.lambda) << "_seed" << seed << ".csv";
    std::ofstream dump(name.str());
    if (!dump) throw std::runtime_error("cannot write " + name.str());
    WritePolicyCsv(run->policy.tables(), dump);
  }

  const InventoryEnvironment test_env(env.test);
  const MonteCarloEstimate est = MonteCarloValue(
      test_env, run->policy, config.eval_episodes, env.eval_seed);
  row.cost = -est.mean;
  row.relative_gap_percent = RelativeGap(row.cost, row.benchmark_cost);
  row.absolute_gap = row.cost - row.benchmark_cost;
  row.ok = true;
  row.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return row;
}

std::string Field(double v, bool ok) { return ok ? FormatDouble(v) : ""; }

}  // namespace

void ApplySetting(ExperimentConfig& c, const std::string& raw_key,
                  const std::string& raw_value) {
  const std::string key = Trim(raw_key);
  const std::string value = Trim(raw_value);
  try {
    if (key == "method" || key == "methods") {
      c.methods = SplitList(value);
    } else if (key == "sweep") {
      c.sweep = value;
    } else if (key == "rho") {
      SetAxis(c.sweep == "rho", ParseDoubles(value), c.rho_grid, c.rho, key);
    } else if (key == "H") {
      SetAxis(c.sweep == "H", ParseInts(value), c.horizon_grid, c.horizon, key);
    } else if (key == "M") {
      SetAxis(c.sweep == "M", ParseInts(value), c.zones_grid, c.zones, key);
    } else if (key == "dims") {
      SetAxis(c.sweep == "dims", ParseInts(value), c.dims_grid, c.dims, key);
    } else if (key == "lambda") {
      SetAxis(c.sweep == "lambda", ParseDoubles(value), c.lambda_grid,
              c.lambda, key);
    } else if (key == "episodes") {
      c.episodes = ParseInt(value);
    } else if (key == "eval_episodes") {
      c.eval_episodes = ParseInt(value);
    } else if (key == "saa_samples") {
      c.saa_samples = ParseInt(value);
    } else if (key == "seeds") {
      c.seeds = ParseInt(value);
    } else if (key == "seed") {
      c.root_seed = ParseU64(value);
    } else if (key == "delta") {
      c.delta = ParseDouble(value);
    } else if (key == "demand_bound") {
      c.demand_bound = ParseDouble(value);
    } else if (key == "holding_seed") {
      c.holding_seed = ParseU64(value);
    } else if (key == "backorder_seed") {
      c.backorder_seed = ParseU64(value);
    } else if (key == "demand_model") {
      c.demand_model = value;
    } else if (key == "c1") {
      c.c1 = ParseDouble(value);
    } else if (key == "c2") {
      c.c2 = ParseDouble(value);
    } else if (key == "c_fallback") {
      c.c_fallback = ParseDouble(value);
    } else if (key == "grid_points") {
      c.grid_points = ParseInt(value);
    } else if (key == "refine_iterations") {
      c.refine_iterations = ParseInt(value);
    } else if (key == "threads") {
      c.threads = ParseInt(value);
    } else if (key == "policy_dir") {
      c.policy_dir = value;
    } else if (key == "output" || key == "out") {
      c.output = value;
    } else {
      throw std::invalid_argument("unknown key");
    }
  } catch (const std::exception& e) {
    throw std::invalid_argument("config '" + key + " = " + value +
                                "': " + e.what());
  }
}

ExperimentConfig ParseConfig(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> settings;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (Trim(line).empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    settings.emplace_back(Trim(line.substr(0, eq)), Trim(line.substr(eq + 1)));
  }
  ExperimentConfig config;
  for (const auto& [k, v] : settings) {
    if (k == "sweep") ApplySetting(config, k, v);
  }
  for (const auto& [k, v] : settings) {
    if (k != "sweep") ApplySetting(config, k, v);
  }
  return config;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return ParseConfig(in);
}

void ValidateConfig(const ExperimentConfig& c) {
  if (c.methods.empty()) throw std::invalid_argument("no methods");
  for (const std::string& m : c.methods) {
    if (!IsMethod(m)) throw std::invalid_argument("unknown method: " + m);
  }
  static const char* kSweeps[] = {"none", "rho", "H", "M", "dims", "lambda"};
  if (std::find(std::begin(kSweeps), std::end(kSweeps), c.sweep) ==
      std::end(kSweeps)) {
    throw std::invalid_argument("unknown sweep: " + c.sweep);
  }
  if (c.rho_grid.empty() || c.horizon_grid.empty() || c.zones_grid.empty() ||
      c.dims_grid.empty() || c.lambda_grid.empty()) {
    throw std::invalid_argument("grids must be nonempty");
  }
  for (const Cell& cell : ExpandCells(c)) {
    if (!(cell.rho > 0.0)) throw std::invalid_argument("rho must be > 0");
    if (cell.horizon < 1) throw std::invalid_argument("H must be >= 1");
    if (cell.zones < 1) throw std::invalid_argument("M must be >= 1");
    if (cell.dims < 2 || cell.dims % 2 != 0) {
      throw std::invalid_argument("dims must be even and >= 2");
    }
    if (!(cell.lambda > 0.0 && cell.lambda <= 1.0)) {
      throw std::invalid_argument("lambda must lie in (0, 1]");
    }
  }
  if (c.episodes < 1 || c.eval_episodes < 1 || c.saa_samples < 1 ||
      c.seeds < 1) {
    throw std::invalid_argument("counts must be >= 1");
  }
  if (!(c.delta > 0.0 && c.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (!(c.demand_bound > 0.0)) throw std::invalid_argument("demand_bound > 0");
}

std::vector<Cell> ExpandCells(const ExperimentConfig& c) {
  const Cell base{c.rho, c.horizon, c.zones, c.dims, c.lambda};
  std::vector<Cell> cells;
  if (c.sweep == "none") {
    cells.push_back(base);
  } else if (c.sweep == "rho") {
    for (double v : c.rho_grid) cells.push_back({v, base.horizon, base.zones, base.dims, base.lambda});
  } else if (c.sweep == "H") {
    for (int v : c.horizon_grid) cells.push_back({base.rho, v, base.zones, base.dims, base.lambda});
  } else if (c.sweep == "M") {
    for (int v : c.zones_grid) cells.push_back({base.rho, base.horizon, v, base.dims, base.lambda});
  } else if (c.sweep == "dims") {
    for (int v : c.dims_grid) cells.push_back({base.rho, base.horizon, base.zones, v, base.lambda});
  } else if (c.sweep == "lambda") {
    for (double v : c.lambda_grid) cells.push_back({base.rho, base.horizon, base.zones, base.dims, v});
  } else {
    throw std::invalid_argument("unknown sweep: " + c.sweep);
  }
  return cells;
}

double RelativeGap(double cost, double benchmark) {
  if (!(benchmark > 0.0)) {
    throw std::invalid_argument("benchmark cost must be > 0");
  }
  return 100.0 * (cost - benchmark) / benchmark;
}

int ResolveThreads(int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char* env = std::getenv("POOL_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return std::max(n, 1);
}

std::vector<ResultRow> RunExperiment(const ExperimentConfig& config,
                                     std::ostream* log) {
  ValidateConfig(config);
  const std::vector<Cell> cells = ExpandCells(config);

  // Environment construction errors fail every row of the affected cells.
  std::map<std::pair<int, int>, std::optional<Environments>> envs;
  std::map<std::pair<int, int>, std::string> env_errors;
  for (const Cell& cell : cells) {
    const auto key = std::make_pair(cell.horizon, cell.dims);
    if (envs.count(key)) continue;
    try {
      envs.emplace(key, MakeEnvironments(config, cell.horizon, cell.dims));
    } catch (const std::exception& e) {
      envs.emplace(key, std::nullopt);
      env_errors[key] = e.what();
    }
  }

  std::vector<Task> tasks;
  for (size_t c = 0; c < cells.size(); ++c) {
    for (size_t m = 0; m < config.methods.size(); ++m) {
      for (int s = 0; s < config.seeds; ++s) tasks.push_back({c, m, s});
    }
  }
  std::vector<ResultRow> rows(tasks.size());
  std::atomic<size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& t = tasks[i];
      const Cell& cell = cells[t.cell];
      const std::string& method = config.methods[t.method];
      try {
        const auto key = std::make_pair(cell.horizon, cell.dims);
        const std::optional<Environments>& env = envs.at(key);
        if (!env) throw std::runtime_error(env_errors.at(key));
        rows[i] = RunTask(config, cell, method, t.seed, *env);
      } catch (const std::exception& e) {
        ResultRow row;
        row.method = method;
        row.rho = cell.rho;
        row.horizon = cell.horizon;
        row.zones = cell.zones;
        row.dims = cell.dims;
        row.lambda = cell.lambda;
        row.seed = t.seed;
        row.delta = config.delta;
        row.ok = false;
        rows[i] = row;
        if (log != nullptr) {
          std::lock_guard<std::mutex> lock(log_mutex);
          *log << "row failed (" << method << ", seed " << t.seed
               << "): " << e.what() << '\n';
        }
      }
    }
  };
  const int threads =
      std::min<int>(ResolveThreads(config.threads), static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return rows;
}

void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "schema_version,method,rho,H,M,dims,lambda,seed,status,cost,"
         "benchmark_cost,relative_gap_percent,absolute_gap,epsilon_at_delta,"
         "delta,privacy\n";
  for (const ResultRow& r : rows) {
    out << kResultsSchemaVersion << ',' << r.method << ','
        << FormatDouble(r.rho) << ',' << r.horizon << ',' << r.zones << ','
        << r.dims << ',' << FormatDouble(r.lambda) << ',' << r.seed << ','
        << (r.ok ? "ok" : "failed") << ',' << Field(r.cost, r.ok) << ','
        << Field(r.benchmark_cost, r.ok) << ','
        << Field(r.relative_gap_percent, r.ok) << ','
        << Field(r.absolute_gap, r.ok) << ','
        << Field(r.epsilon_at_delta, r.ok) << ',' << FormatDouble(r.delta)
        << ',' << r.privacy << '\n';
  }
}

void WriteTimingCsv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << "method,rho,H,M,dims,lambda,seed,wall_time_s\n";
  for (const ResultRow& r : rows) {
    out << r.method << ',' << FormatDouble(r.rho) << ',' << r.horizon << ','
        << r.zones << ',' << r.dims << ',' << FormatDouble(r.lambda) << ','
        << r.seed << ',' << FormatDouble(r.wall_time_s) << '\n';
  }
}

std::vector<ResultRow> ReadResultsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("results csv: empty");
  const std::vector<std::string> header = SplitCsvLine(line);
  if (header.size() != 16 || header[0] != "schema_version") {
    throw std::runtime_error("results csv: unrecognised header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != 16) throw std::runtime_error("results csv: bad row");
    if (ParseInt(f[0]) != kResultsSchemaVersion) {
      throw std::runtime_error("results csv: unsupported schema version");
    }
    ResultRow r;
    r.method = f[1];
    r.rho = ParseDouble(f[2]);
    r.horizon = ParseInt(f[3]);
    r.zones = ParseInt(f[4]);
    r.dims = ParseInt(f[5]);
    r.lambda = ParseDouble(f[6]);
    r.seed = ParseInt(f[7]);
    r.ok = f[8] == "ok";
    if (r.ok) {
      r.cost = ParseDouble(f[9]);
      r.benchmark_cost = ParseDouble(f[10]);
      r.relative_gap_percent = ParseDouble(f[11]);
      r.absolute_gap = ParseDouble(f[12]);
      r.epsilon_at_delta = ParseDouble(f[13]);
    }
    r.delta = ParseDouble(f[14]);
    r.privacy = Trim(f[15]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("Summarize: no rows");
  using Key = std::tuple<std::string, double, int, int, int, double>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) {
    if (!r.ok) continue;
    groups[{r.method, r.rho, r.horizon, r.zones, r.dims, r.lambda}].push_back(&r);
  }
  std::vector<SummaryRow> out;
  for (auto& [key, members] : groups) {
    // Fixed summation order makes the summary independent of row order.
    std::sort(members.begin(), members.end(),
              [](const ResultRow* a, const ResultRow* b) {
                return std::tie(a->seed, a->relative_gap_percent) <
                       std::tie(b->seed, b->relative_gap_percent);
              });
    std::vector<double> gaps, costs;
    for (const ResultRow* r : members) {
      gaps.push_back(r->relative_gap_percent);
      costs.push_back(r->cost);
    }
    const MonteCarloEstimate g = MeanAndSd(gaps);
    const MonteCarloEstimate c = MeanAndSd(costs);
    out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key),
                   std::get<3>(key), std::get<4>(key), std::get<5>(key),
                   static_cast<int>(members.size()), g.mean, g.sd, c.mean,
                   c.sd});
  }
  return out;
}

void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "method,rho,H,M,dims,lambda,count,mean_gap_percent,sd_gap_percent,"
         "mean_cost,sd_cost\n";
  for (const SummaryRow& r : rows) {
    out << r.method << ',' << FormatDouble(r.rho) << ',' << r.horizon << ','
        << r.zones << ',' << r.dims << ',' << FormatDouble(r.lambda) << ','
        << r.count << ',' << FormatDouble(r.mean_gap) << ','
        << FormatDouble(r.sd_gap) << ',' << FormatDouble(r.mean_cost) << ','
        << FormatDouble(r.sd_cost) << '\n';
  }
}

}  // namespace pool
