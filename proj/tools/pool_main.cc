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

// Command-line entry point: run sweeps, summarise result files, and print the
// base-stock benchmark for a configuration.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pool/discretization.h"
#include "pool/harness.h"
#include "pool/inventory.h"

namespace {

pool::ExperimentConfig LoadWithOverrides(
    const std::string& path, const std::vector<std::string>& settings) {
  pool::ExperimentConfig config =
      path.empty() ? pool::ExperimentConfig() : pool::LoadConfigFile(path);
  for (const std::string& s : settings) {
    const size_t eq = s.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got " + s);
    }
    pool::ApplySetting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  return config;
}

int Run(const std::string& config_path, const std::vector<std::string>& sets) {
  const pool::ExperimentConfig config = LoadWithOverrides(config_path, sets);
  const std::vector<pool::ResultRow> rows =
      pool::RunExperiment(config, &std::cerr);
  if (!config.output.empty()) {
    std::ofstream out(config.output);
    if (!out) throw std::runtime_error("cannot write " + config.output);
    pool::WriteResultsCsv(rows, out);
    std::ofstream timing(config.output + ".timing.csv");
    pool::WriteTimingCsv(rows, timing);
  }
  int failed = 0;
  for (const pool::ResultRow& r : rows) failed += r.ok ? 0 : 1;
  if (failed < static_cast<int>(rows.size())) {
    pool::WriteSummaryCsv(pool::Summarize(rows), std::cout);
  }
  if (failed > 0) {
    std::cerr << failed << " of " << rows.size() << " rows failed\n";
    return 1;
  }
  return 0;
}

int Summarize(const std::string& path, const std::string& out_path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  const std::vector<pool::SummaryRow> summary =
      pool::Summarize(pool::ReadResultsCsv(in));
  if (out_path.empty()) {
    pool::WriteSummaryCsv(summary, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    pool::WriteSummaryCsv(summary, out);
  }
  return 0;
}

int Saa(const std::string& config_path, const std::vector<std::string>& sets) {
  const pool::ExperimentConfig config = LoadWithOverrides(config_path, sets);
  pool::ValidateConfig(config);
  std::cout << "H,dims,stage,product,level,benchmark_cost\n";
  std::map<std::pair<int, int>, bool> seen;
  for (const pool::Cell& cell : pool::ExpandCells(config)) {
    if (seen[{cell.horizon, cell.dims}]) continue;
    seen[{cell.horizon, cell.dims}] = true;
    if (config.demand_model != "uniform") {
      throw std::invalid_argument("saa: only the uniform demand model");
    }
    const pool::InventoryParams params = pool::MakeInventoryParams(
        cell.dims / 2, cell.horizon, config.demand_bound, config.holding_seed,
        config.backorder_seed, pool::DemandModel::Uniform());
    const uint64_t seed = config.root_seed;
    const pool::SaaResult saa = pool::SaaBenchmark(
        params, config.saa_samples, config.eval_episodes, seed);
    for (int h = 0; h < cell.horizon; ++h) {
      for (int i = 0; i < params.products; ++i) {
        std::cout << cell.horizon << ',' << cell.dims << ',' << h + 1 << ','
                  << i << ',' << saa.levels[h][i] << ',' << saa.cost << '\n';
      }
    }
  }
  return 0;
}

int Basis(int dim, int zones, uint64_t seed) {
  const pool::ZoneGrid grid(dim, zones, seed);
  pool::WriteBasisCsv(grid, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private offline RL with one-sided feedback"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string rho, method, out;
  int seeds = 0;
  int threads = 0;

  CLI::App* run = app.add_subcommand("run", "Run an experiment sweep");
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--rho", rho, "rho value, or grid when sweep = rho");
  run->add_option("--method", method, "comma list of pool,nonprivate,ip,op");
  run->add_option("--seeds", seeds, "number of seeds");
  run->add_option("--out", out, "results CSV path");
  run->add_option("--threads", threads, "worker threads");
  run->add_option("--set", sets, "extra key=value override")->take_all();

  std::string csv_path, summary_out;
  CLI::App* summarize = app.add_subcommand("summarize", "Summarise a results CSV");
  summarize->add_option("csv", csv_path, "results CSV")->required();
  summarize->add_option("--out", summary_out, "write the summary here");

  CLI::App* saa = app.add_subcommand("saa", "Print the base-stock benchmark");
  saa->add_option("--config", config_path, "key = value config file");
  saa->add_option("--set", sets, "extra key=value override")->take_all();

  int dim = 2, zones = 100;
  uint64_t basis_seed = 1;
  CLI::App* basis = app.add_subcommand("basis", "Dump the anchors of one grid");
  basis->add_option("--dim", dim, "space dimension");
  basis->add_option("--M", zones, "number of zones");
  basis->add_option("--seed", basis_seed, "grid seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (!rho.empty()) sets.push_back("rho=" + rho);
      if (!method.empty()) sets.push_back("method=" + method);
      if (seeds > 0) sets.push_back("seeds=" + std::to_string(seeds));
      if (!out.empty()) sets.push_back("output=" + out);
      if (threads > 0) sets.push_back("threads=" + std::to_string(threads));
      return Run(config_path, sets);
    }
    if (*summarize) return Summarize(csv_path, summary_out);
    if (*saa) return Saa(config_path, sets);
    if (*basis) return Basis(dim, zones, basis_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
