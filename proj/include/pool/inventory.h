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

// Multi-product inventory control with lost sales or backlogging, behaviour
// data generation under one-sided feedback, and a sample average
// approximation base-stock benchmark.

#ifndef POOL_INVENTORY_H_
#define POOL_INVENTORY_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pool/mdp_core.h"
#include "pool/pool.h"

namespace pool {

// Demand per stage and product, in raw units.
class DemandModel {
 public:
  enum class Kind { kUniform, kConstant, kTraces };

  static DemandModel Uniform();
  static DemandModel Constant(double value);
  // traces[e][h-1][i]: episode e, stage h, product i.
  static DemandModel Traces(std::vector<std::vector<Vector>> traces);

  Kind kind() const { return kind_; }
  const std::vector<std::vector<Vector>>& traces() const { return traces_; }

  // Independent draw for one stage. Traces draw a random episode's row.
  Vector Draw(int stage, int products, double bound, Rng& rng) const;
  // Deterministic replay of trace episode `episode % traces`; other kinds
  // fall back to Draw.
  Vector ForEpisode(int episode, int stage, int products, double bound,
                    Rng& rng) const;

 private:
  Kind kind_ = Kind::kUniform;
  double constant_ = 0.0;
  std::vector<std::vector<Vector>> traces_;
};

struct InventoryParams {
  int products = 1;
  int horizon = 7;
  double demand_bound = 100.0;
  bool lost_sales = true;
  std::vector<Vector> holding;    // [h-1][i]
  std::vector<Vector> backorder;  // [h-1][i]
  DemandModel demand = DemandModel::Uniform();
};

// Costs drawn per stage and product from U[0, 0.5] with the given seeds.
InventoryParams MakeInventoryParams(int products, int horizon,
                                    double demand_bound, uint64_t holding_seed,
                                    uint64_t backorder_seed,
                                    DemandModel demand);

void ValidateParams(const InventoryParams& params);

struct LostSalesOutcome {
  double virtual_reward;
  Vector next_x;
  bool censored;  // some product's demand exceeded its order-up-to level
};

// r = -(h^T (y-D)^+ - b^T min(y, D)); next_x = (y - D)^+.
LostSalesOutcome StepLostSales(std::span<const double> x,
                               std::span<const double> y,
                               std::span<const double> demand,
                               std::span<const double> holding,
                               std::span<const double> backorder);

struct BacklogOutcome {
  double reward;
  Vector next_x;
};

// r = -(h^T (y-D)^+ + b^T (D-y)^+); next_x = y - D.
BacklogOutcome StepBacklog(std::span<const double> x, std::span<const double> y,
                           std::span<const double> demand,
                           std::span<const double> holding,
                           std::span<const double> backorder);

// Holding plus shortage cost of one stage; the quantity evaluated policies
// are scored on.
double StageCost(std::span<const double> y, std::span<const double> demand,
                 std::span<const double> holding,
                 std::span<const double> backorder);

// Raw inventory <-> [0,1] view. Lost sales divides by D; backlog maps
// [-D, D] onto [0, 1].
Vector NormalizeInventory(std::span<const double> raw, double bound,
                          bool lost_sales);
Vector DenormalizeInventory(std::span<const double> unit, double bound,
                            bool lost_sales);

// Simulator in the normalised view. Rewards are the negative stage cost.
// Actions are order-up-to levels divided by D and are raised to the current
// inventory if below it.
class InventoryEnvironment : public Environment {
 public:
  explicit InventoryEnvironment(InventoryParams params);

  int horizon() const override { return params_.horizon; }
  int state_dim() const override { return params_.products; }
  int action_dim() const override { return params_.products; }
  Vector InitialState(Rng& rng) const override;
  StepOutcome Step(int stage, std::span<const double> state,
                   std::span<const double> action, Rng& rng) const override;

  const InventoryParams& params() const { return params_; }

 private:
  InventoryParams params_;
};

// Order-up-to level uniform in [x_i, 1] per product.
class UniformOrderUpTo : public Policy {
 public:
  Vector Act(int stage, std::span<const double> state, Rng& rng) const override;
};

// Orders up to max(x, level) with per-stage raw levels.
class BaseStockPolicy : public Policy {
 public:
  BaseStockPolicy(std::vector<Vector> levels, double demand_bound);
  Vector Act(int stage, std::span<const double> state, Rng& rng) const override;

 private:
  std::vector<Vector> levels_;
  double bound_;
};

// Lost-sales data: every record whose normalised (s, a) is NotBelow
// lambda_h is censored. Stored rewards are the raw virtual reward.
Dataset GenerateDataset(const InventoryParams& params, const Policy& behavior,
                        int episodes, uint64_t seed,
                        const std::vector<Vector>& boundaries);

// Virtual reward in the normalised view, shifted and scaled into [0, 1] by
// constants common to all stages, so per-stage argmax is unchanged.
RewardModel InventoryRewardModel(const InventoryParams& params);

// lambda_h = value * (1, ..., 1) for every stage.
std::vector<Vector> UniformBoundaries(int horizon, int dim, double value);

// Project actions onto y >= x.
ActionFloor InventoryActionFloor();

struct SaaResult {
  std::vector<Vector> levels;  // raw order-up-to level per stage and product
  double cost = 0.0;           // expected total cost from zero inventory
  double cost_sd = 0.0;
};

inline constexpr int kSaaGridPoints = 200;

// Minimises sample newsvendor cost over kSaaGridPoints levels in [0, D] and
// refines inside the bracketing cell. The cost is scored by Monte Carlo.
std::vector<Vector> SaaLevels(const InventoryParams& params, int samples,
                              uint64_t seed);
SaaResult SaaBenchmark(const InventoryParams& params, int samples,
                       int eval_episodes, uint64_t seed);

// Monte Carlo seed SaaBenchmark scores with; evaluating other policies with
// it gives common random numbers against the benchmark.
uint64_t SaaEvalSeed(uint64_t seed);

struct DemandTraces {
  std::vector<std::vector<Vector>> train;
  std::vector<std::vector<Vector>> test;
};

// CSV with header period,demand_0..demand_{k-1}. Rows are chunked into
// H-length episodes in file order; the first ceil(E/2) go to training.
DemandTraces LoadDemandCsv(std::istream& in, int horizon);
DemandTraces LoadDemandCsvFile(const std::string& path, int horizon);

}  // namespace pool

#endif  // POOL_INVENTORY_H_
