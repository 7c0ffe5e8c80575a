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

#include "pool/inventory.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <stdexcept>
#include <utility>

#include "pool/csv.h"

namespace pool {
namespace {

constexpr double kOrderTolerance = 1e-9;
constexpr uint64_t kSaaEvalKey = 0x5aa;

void CheckSizes(size_t n, std::span<const double> a, std::span<const double> b,
                std::span<const double> c, std::span<const double> d) {
  if (a.size() != n || b.size() != n || c.size() != n || d.size() != n) {
    throw std::invalid_argument("inventory step: dimension mismatch");
  }
}

void CheckOrder(std::span<const double> x, std::span<const double> y) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (y[i] < x[i] - kOrderTolerance) {
      throw std::invalid_argument("order-up-to level below current inventory");
    }
  }
}

}  // namespace

DemandModel DemandModel::Uniform() { return DemandModel(); }

DemandModel DemandModel::Constant(double value) {
  if (!(value >= 0.0)) throw std::invalid_argument("demand must be >= 0");
  DemandModel m;
  m.kind_ = Kind::kConstant;
  m.constant_ = value;
  return m;
}

DemandModel DemandModel::Traces(std::vector<std::vector<Vector>> traces) {
  if (traces.empty()) throw std::invalid_argument("no demand traces");
  DemandModel m;
  m.kind_ = Kind::kTraces;
  m.traces_ = std::move(traces);
  return m;
}

Vector DemandModel::Draw(int stage, int products, double bound,
                         Rng& rng) const {
  switch (kind_) {
    case Kind::kUniform: {
      Vector d(products);
      for (double& v : d) v = UniformRange(rng, 0.0, bound);
      return d;
    }
    case Kind::kConstant:
      return Vector(products, constant_);
    case Kind::kTraces: {
      const size_t e = static_cast<size_t>(Uniform01(rng) * traces_.size());
      return ForEpisode(static_cast<int>(std::min(e, traces_.size() - 1)),
                        stage, products, bound, rng);
    }
  }
  return Vector(products, 0.0);
}

Vector DemandModel::ForEpisode(int episode, int stage, int products,
                               double bound, Rng& rng) const {
  if (kind_ != Kind::kTraces) return Draw(stage, products, bound, rng);
  const std::vector<Vector>& trace = traces_[episode % traces_.size()];
  if (stage < 1 || stage > static_cast<int>(trace.size())) {
    throw std::out_of_range("demand trace shorter than the horizon");
  }
  const Vector& row = trace[stage - 1];
  if (static_cast<int>(row.size()) != products) {
    throw std::invalid_argument("demand trace has the wrong product count");
  }
  return row;
}

InventoryParams MakeInventoryParams(int products, int horizon,
                                    double demand_bound, uint64_t holding_seed,
                                    uint64_t backorder_seed,
                                    DemandModel demand) {
  InventoryParams p;
  p.products = products;
  p.horizon = horizon;
  p.demand_bound = demand_bound;
  p.demand = std::move(demand);
  Rng hr = MakeRng(holding_seed);
  Rng br = MakeRng(backorder_seed);
  p.holding.assign(horizon, Vector(products));
  p.backorder.assign(horizon, Vector(products));
  for (int h = 0; h < horizon; ++h) {
    for (int i = 0; i < products; ++i) {
      p.holding[h][i] = UniformRange(hr, 0.0, 0.5);
      p.backorder[h][i] = UniformRange(br, 0.0, 0.5);
    }
  }
  ValidateParams(p);
  return p;
}

void ValidateParams(const InventoryParams& p) {
  if (p.products < 1 || p.horizon < 1) {
    throw std::invalid_argument("products and horizon must be >= 1");
  }
  if (!(p.demand_bound > 0.0)) {
    throw std::invalid_argument("demand bound must be > 0");
  }
  if (static_cast<int>(p.holding.size()) != p.horizon ||
      static_cast<int>(p.backorder.size()) != p.horizon) {
    throw std::invalid_argument("need costs for every stage");
  }
  for (int h = 0; h < p.horizon; ++h) {
    if (static_cast<int>(p.holding[h].size()) != p.products ||
        static_cast<int>(p.backorder[h].size()) != p.products) {
      throw std::invalid_argument("need costs for every product");
    }
    for (int i = 0; i < p.products; ++i) {
      if (p.holding[h][i] < 0.0 || p.backorder[h][i] < 0.0) {
        throw std::invalid_argument("costs must be >= 0");
      }
    }
  }
}

LostSalesOutcome StepLostSales(std::span<const double> x,
                               std::span<const double> y,
                               std::span<const double> demand,
                               std::span<const double> holding,
                               std::span<const double> backorder) {
  CheckSizes(x.size(), y, demand, holding, backorder);
  CheckOrder(x, y);
  LostSalesOutcome out{0.0, Vector(x.size()), false};
  double cost = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double left = std::max(y[i] - demand[i], 0.0);
    const double sold = std::min(y[i], demand[i]);
    cost += holding[i] * left - backorder[i] * sold;
    out.next_x[i] = left;
    if (demand[i] > y[i]) out.censored = true;
  }
  out.virtual_reward = -cost;
  return out;
}

BacklogOutcome StepBacklog(std::span<const double> x, std::span<const double> y,
                           std::span<const double> demand,
                           std::span<const double> holding,
                           std::span<const double> backorder) {
  CheckSizes(x.size(), y, demand, holding, backorder);
  CheckOrder(x, y);
  BacklogOutcome out{0.0, Vector(x.size())};
  double cost = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    cost += holding[i] * std::max(y[i] - demand[i], 0.0) +
            backorder[i] * std::max(demand[i] - y[i], 0.0);
    out.next_x[i] = y[i] - demand[i];
  }
  out.reward = -cost;
  return out;
}

double StageCost(std::span<const double> y, std::span<const double> demand,
                 std::span<const double> holding,
                 std::span<const double> backorder) {
  CheckSizes(y.size(), demand, holding, backorder, y);
  double cost = 0.0;
  for (size_t i = 0; i < y.size(); ++i) {
    cost += holding[i] * std::max(y[i] - demand[i], 0.0) +
            backorder[i] * std::max(demand[i] - y[i], 0.0);
  }
  return cost;
}

Vector NormalizeInventory(std::span<const double> raw, double bound,
                          bool lost_sales) {
  Vector out(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    out[i] = lost_sales ? raw[i] / bound : (raw[i] + bound) / (2.0 * bound);
  }
  return out;
}

Vector DenormalizeInventory(std::span<const double> unit, double bound,
                            bool lost_sales) {
  Vector out(unit.size());
  for (size_t i = 0; i < unit.size(); ++i) {
    out[i] = lost_sales ? unit[i] * bound : unit[i] * 2.0 * bound - bound;
  }
  return out;
}

InventoryEnvironment::InventoryEnvironment(InventoryParams params)
    : params_(std::move(params)) {
  ValidateParams(params_);
}

Vector InventoryEnvironment::InitialState(Rng& /*rng*/) const {
  const Vector zero(params_.products, 0.0);
  return NormalizeInventory(zero, params_.demand_bound, params_.lost_sales);
}

StepOutcome InventoryEnvironment::Step(int stage, std::span<const double> state,
                                       std::span<const double> action,
                                       Rng& rng) const {
  const int k = params_.products;
  const double bound = params_.demand_bound;
  if (static_cast<int>(state.size()) != k ||
      static_cast<int>(action.size()) != k) {
    throw std::invalid_argument("InventoryEnvironment: dimension mismatch");
  }
  const Vector x = DenormalizeInventory(state, bound, params_.lost_sales);
  Vector y(k);
  for (int i = 0; i < k; ++i) {
    y[i] = std::max(std::clamp(action[i], 0.0, 1.0) * bound, x[i]);
  }
  const Vector demand = params_.demand.Draw(stage, k, bound, rng);
  const Vector& hc = params_.holding[stage - 1];
  const Vector& bc = params_.backorder[stage - 1];
  StepOutcome out;
  out.reward = -StageCost(y, demand, hc, bc);
  Vector next(k);
  for (int i = 0; i < k; ++i) {
    next[i] = params_.lost_sales ? std::max(y[i] - demand[i], 0.0)
                                 : std::max(y[i] - demand[i], -bound);
  }
  out.next_state = NormalizeInventory(next, bound, params_.lost_sales);
  for (double& v : out.next_state) v = std::clamp(v, 0.0, 1.0);
  return out;
}

Vector UniformOrderUpTo::Act(int /*stage*/, std::span<const double> state,
                             Rng& rng) const {
  Vector a(state.size());
  for (size_t i = 0; i < state.size(); ++i) {
    const double lo = std::clamp(state[i], 0.0, 1.0);
    a[i] = UniformRange(rng, lo, 1.0);
  }
  return a;
}

BaseStockPolicy::BaseStockPolicy(std::vector<Vector> levels,
                                 double demand_bound)
    : levels_(std::move(levels)), bound_(demand_bound) {}

Vector BaseStockPolicy::Act(int stage, std::span<const double> state,
                            Rng& /*rng*/) const {
  const Vector& level = levels_.at(stage - 1);
  Vector a(state.size());
  for (size_t i = 0; i < state.size(); ++i) {
    a[i] = std::clamp(std::max(level[i] / bound_, state[i]), 0.0, 1.0);
  }
  return a;
}

Dataset GenerateDataset(const InventoryParams& params, const Policy& behavior,
                        int episodes, uint64_t seed,
                        const std::vector<Vector>& boundaries) {
  ValidateParams(params);
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  const int k = params.products;
  const double bound = params.demand_bound;
  ValidateBoundaries(boundaries, params.horizon, 2 * k);
  Dataset dataset(k, k, params.horizon);
  for (int e = 0; e < episodes; ++e) {
    Rng rng = MakeRng(DeriveSeed(seed, {static_cast<uint64_t>(e)}));
    Vector state = NormalizeInventory(Vector(k, 0.0), bound, params.lost_sales);
    std::vector<TransitionRecord> records;
    records.reserve(params.horizon);
    for (int h = 1; h <= params.horizon; ++h) {
      Vector action = behavior.Act(h, state, rng);
      const Vector x = DenormalizeInventory(state, bound, params.lost_sales);
      Vector y(k);
      for (int i = 0; i < k; ++i) {
        action[i] = std::clamp(action[i], 0.0, 1.0);
        y[i] = std::max(action[i] * bound, x[i]);
      }
      const Vector demand = params.demand.ForEpisode(e, h, k, bound, rng);
      const Vector& hc = params.holding[h - 1];
      const Vector& bc = params.backorder[h - 1];
      double reward;
      Vector next_raw;
      if (params.lost_sales) {
        LostSalesOutcome o = StepLostSales(x, y, demand, hc, bc);
        reward = o.virtual_reward;
        next_raw = std::move(o.next_x);
      } else {
        BacklogOutcome o = StepBacklog(x, y, demand, hc, bc);
        reward = o.reward;
        next_raw = std::move(o.next_x);
        for (double& v : next_raw) v = std::max(v, -bound);
      }
      Vector next = NormalizeInventory(next_raw, bound, params.lost_sales);
      for (double& v : next) v = std::clamp(v, 0.0, 1.0);
      const Vector sa = JoinStateAction(state, action);
      if (IsBelow(sa, boundaries[h - 1])) {
        records.push_back(
            TransitionRecord::Observed(h, state, action, reward, next));
      } else {
        records.push_back(TransitionRecord::Censored(h, state, action));
      }
      state = std::move(next);
    }
    dataset.AddEpisode(std::move(records));
  }
  return dataset;
}

RewardModel InventoryRewardModel(const InventoryParams& params) {
  ValidateParams(params);
  const int k = params.products;
  const double bound = params.demand_bound;
  double scale = 0.0;
  std::vector<double> shift(params.horizon, 0.0);
  for (int h = 0; h < params.horizon; ++h) {
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      total += (params.holding[h][i] + params.backorder[h][i]) * bound;
      shift[h] += params.holding[h][i] * bound;
    }
    scale = std::max(scale, total);
  }
  if (scale <= 0.0) scale = 1.0;
  return [params, shift, scale, k, bound](int stage,
                                          std::span<const double> sa,
                                          std::span<const double> next) {
    const Vector& hc = params.holding[stage - 1];
    const Vector& bc = params.backorder[stage - 1];
    double raw = 0.0;
    for (int i = 0; i < k; ++i) {
      const double y = sa[k + i] * bound;
      const double left = next[i] * bound;
      raw += -hc[i] * left + bc[i] * std::max(y - left, 0.0);
    }
    return (raw + shift[stage - 1]) / scale;
  };
}

std::vector<Vector> UniformBoundaries(int horizon, int dim, double value) {
  return std::vector<Vector>(horizon, Vector(dim, value));
}

ActionFloor InventoryActionFloor() {
  return [](std::span<const double> state) {
    return Vector(state.begin(), state.end());
  };
}

namespace {

// Mean newsvendor cost at level s from sorted samples and prefix sums.
double SampleCost(double s, const std::vector<double>& sorted,
                  const std::vector<double>& prefix, double h, double b) {
  const size_t n = sorted.size();
  const size_t k = std::lower_bound(sorted.begin(), sorted.end(), s) -
                   sorted.begin();
  const double over = k * s - prefix[k];
  const double under = (prefix[n] - prefix[k]) - (n - k) * s;
  return (h * over + b * under) / n;
}

}  // namespace

std::vector<Vector> SaaLevels(const InventoryParams& params, int samples,
                              uint64_t seed) {
  ValidateParams(params);
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const double bound = params.demand_bound;
  std::vector<Vector> levels(params.horizon, Vector(params.products, 0.0));
  std::vector<double> sorted(samples);
  std::vector<double> prefix(samples + 1);
  for (int h = 1; h <= params.horizon; ++h) {
    for (int i = 0; i < params.products; ++i) {
      Rng rng = MakeRng(DeriveSeed(seed, {static_cast<uint64_t>(h),
                                          static_cast<uint64_t>(i)}));
      for (int n = 0; n < samples; ++n) {
        sorted[n] = params.demand.Draw(h, params.products, bound, rng)[i];
      }
      std::sort(sorted.begin(), sorted.end());
      prefix[0] = 0.0;
      for (int n = 0; n < samples; ++n) prefix[n + 1] = prefix[n] + sorted[n];
      const double hc = params.holding[h - 1][i];
      const double bc = params.backorder[h - 1][i];
      auto cost = [&](double s) { return SampleCost(s, sorted, prefix, hc, bc); };

      const double step = bound / (kSaaGridPoints - 1);
      int best = 0;
      double best_cost = cost(0.0);
      for (int g = 1; g < kSaaGridPoints; ++g) {
        const double c = cost(g * step);
        if (c < best_cost) {
          best_cost = c;
          best = g;
        }
      }
      double level = best * step;
      // The sample cost is convex; golden-section search in the bracket.
      double lo = std::max(0.0, (best - 1) * step);
      double hi = std::min(bound, (best + 1) * step);
      const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
      double a = hi - phi * (hi - lo);
      double b = lo + phi * (hi - lo);
      double fa = cost(a);
      double fb = cost(b);
      for (int it = 0; it < 100; ++it) {
        if (fa <= fb) {
          hi = b;
          b = a;
          fb = fa;
          a = hi - phi * (hi - lo);
          fa = cost(a);
        } else {
          lo = a;
          a = b;
          fa = fb;
          b = lo + phi * (hi - lo);
          fb = cost(b);
        }
      }
      const double refined = 0.5 * (lo + hi);
      if (cost(refined) < best_cost) level = refined;
      levels[h - 1][i] = level;
    }
  }
  return levels;
}

SaaResult SaaBenchmark(const InventoryParams& params, int samples,
                       int eval_episodes, uint64_t seed) {
  SaaResult out;
  out.levels = SaaLevels(params, samples, seed);
  const InventoryEnvironment env(params);
  const BaseStockPolicy policy(out.levels, params.demand_bound);
  const MonteCarloEstimate est = MonteCarloValue(
      env, policy, eval_episodes, SaaEvalSeed(seed));
  out.cost = -est.mean;
  out.cost_sd = est.sd;
  return out;
}

uint64_t SaaEvalSeed(uint64_t seed) { return DeriveSeed(seed, {kSaaEvalKey}); }

DemandTraces LoadDemandCsv(std::istream& in, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("demand csv: empty");
  const std::vector<std::string> header = SplitCsvLine(line);
  if (header.size() < 2 || header[0] != "period") {
    throw std::runtime_error("demand csv: header must be period,demand_0,...");
  }
  const size_t k = header.size() - 1;
  for (size_t i = 0; i < k; ++i) {
    if (header[i + 1] != "demand_" + std::to_string(i)) {
      throw std::runtime_error("demand csv: unexpected column " + header[i + 1]);
    }
  }
  std::vector<Vector> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != k + 1) {
      throw std::runtime_error("demand csv: wrong field count on line " +
                               std::to_string(line_no));
    }
    Vector row(k);
    for (size_t i = 0; i < k; ++i) {
      try {
        row[i] = ParseDouble(f[i + 1]);
      } catch (const std::invalid_argument&) {
        throw std::runtime_error("demand csv: malformed value on line " +
                                 std::to_string(line_no));
      }
      if (!(row[i] >= 0.0)) {
        throw std::runtime_error("demand csv: negative demand on line " +
                                 std::to_string(line_no));
      }
    }
    rows.push_back(std::move(row));
  }
  const size_t episodes = rows.size() / horizon;
  if (episodes == 0) {
    throw std::runtime_error("demand csv: fewer rows than one episode");
  }
  const size_t train = (episodes + 1) / 2;
  DemandTraces out;
  for (size_t e = 0; e < episodes; ++e) {
    std::vector<Vector> trace(rows.begin() + e * horizon,
                              rows.begin() + (e + 1) * horizon);
    (e < train ? out.train : out.test).push_back(std::move(trace));
  }
  return out;
}

DemandTraces LoadDemandCsvFile(const std::string& path, int horizon) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return LoadDemandCsv(in, horizon);
}

}  // namespace pool
