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

// Experiment configuration, seeded sweeps over the inventory benchmark,
// relative-gap scoring, and result persistence.

#ifndef POOL_HARNESS_H_
#define POOL_HARNESS_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pool {

inline constexpr int kResultsSchemaVersion = 1;

struct ExperimentConfig {
  std::vector<std::string> methods = {"pool"};
  // Which axis takes its grid; every other axis stays at its base value.
  // One of: none, rho, H, M, dims, lambda.
  std::string sweep = "none";

  std::vector<double> rho_grid = {0.1, 1, 5, 10, 20, 40};
  std::vector<int> horizon_grid = {5, 10, 15, 20, 40};
  std::vector<int> zones_grid = {50, 100, 200, 400, 800};
  std::vector<int> dims_grid = {2, 4, 6, 8, 16};
  std::vector<double> lambda_grid = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0};

  double rho = 10.0;
  int horizon = 7;
  int zones = 100;
  int dims = 2;  // w + d; products = dims / 2
  double lambda = 1.0;

  int episodes = 10000;
  int eval_episodes = 10000;
  int saa_samples = 10000;
  int seeds = 10;
  uint64_t root_seed = 20260101;
  double delta = 0.05;

  double demand_bound = 100.0;
  uint64_t holding_seed = 11;
  uint64_t backorder_seed = 12;
  std::string demand_model = "uniform";  // uniform | constant:<v> | csv:<path>

  // Experiment-level pessimism scales. The library defaults in
  // PessimismConfig penalise every anchor down to zero at n = 10^4.
  double c1 = 0.1;
  double c2 = 0.001;
  double c_fallback = 2.0;
  int grid_points = 32;
  int refine_iterations = 10;

  int threads = 0;  // 0: POOL_THREADS or hardware concurrency
  std::string output = "results.csv";
  std::string policy_dir;  // when set, each trained table is dumped here
};

// Applies one key=value setting. List-valued axis keys (rho, H, M, dims,
// lambda) set the grid when that axis is swept and the base value otherwise.
void ApplySetting(ExperimentConfig& config, const std::string& key,
                  const std::string& value);

// Flat key = value lines; '#' starts a comment. `sweep` is applied first.
ExperimentConfig ParseConfig(std::istream& in);
ExperimentConfig LoadConfigFile(const std::string& path);
void ValidateConfig(const ExperimentConfig& config);

struct Cell {
  double rho;
  int horizon;
  int zones;
  int dims;
  double lambda;
};

std::vector<Cell> ExpandCells(const ExperimentConfig& config);

struct ResultRow {
  std::string method;
  double rho = 0.0;
  int horizon = 0;
  int zones = 0;
  int dims = 0;
  double lambda = 0.0;
  int seed = 0;
  bool ok = false;
  double cost = 0.0;
  double benchmark_cost = 0.0;
  double relative_gap_percent = 0.0;
  double absolute_gap = 0.0;
  double epsilon_at_delta = 0.0;
  double delta = 0.0;
  std::string privacy;  // formal, nominal or none
  double wall_time_s = 0.0;
};

// 100 * (c - c_star) / c_star.
double RelativeGap(double cost, double benchmark);

// Rows come back sorted by cell, method and seed regardless of scheduling.
std::vector<ResultRow> RunExperiment(const ExperimentConfig& config,
                                     std::ostream* log = nullptr);

// Main results; byte-identical for identical config and seeds.
void WriteResultsCsv(const std::vector<ResultRow>& rows, std::ostream& out);
// Wall-clock timings, kept apart so the main file stays deterministic.
void WriteTimingCsv(const std::vector<ResultRow>& rows, std::ostream& out);
std::vector<ResultRow> ReadResultsCsv(std::istream& in);

struct SummaryRow {
  std::string method;
  double rho;
  int horizon;
  int zones;
  int dims;
  double lambda;
  int count;
  double mean_gap;
  double sd_gap;
  double mean_cost;
  double sd_cost;
};

// Mean and sample sd per grid cell over successful rows, ordered by
// (method, rho, H, M, dims, lambda).
std::vector<SummaryRow> Summarize(const std::vector<ResultRow>& rows);
void WriteSummaryCsv(const std::vector<SummaryRow>& rows, std::ostream& out);

int ResolveThreads(int requested);

}  // namespace pool

#endif  // POOL_HARNESS_H_
