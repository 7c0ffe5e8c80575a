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

// Private offline learning over anchors: count tabulation and release,
// private transition kernels, pessimistic backward induction, piecewise-linear
// Q evaluation with boundary truncation, and greedy policy extraction.

#ifndef POOL_POOL_H_
#define POOL_POOL_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "pool/discretization.h"
#include "pool/mdp_core.h"
#include "pool/privacy.h"

namespace pool {

// Per-stage count tables; joint is row-major num_sa x num_s.
struct StageCounts {
  int num_sa = 0;
  int num_s = 0;
  std::vector<double> joint;
  std::vector<double> marginal;

  double Joint(int sa, int s) const {
    return joint[static_cast<size_t>(sa) * num_s + s];
  }
};

struct CountTables {
  std::vector<StageCounts> stages;  // index h - 1
};

// Histogram of uncensored records whose (s, a) is Below lambda_h, bucketed by
// nearest state-action anchor and nearest next-state anchor.
CountTables TabulateCounts(const Dataset& dataset, const ZoneScheme& scheme,
                           const std::vector<Vector>& boundaries);

// Adds N(0, sigma_sq) to every joint cell and every marginal, clips at zero,
// then projects each row onto the consistent set. Noise for cell (h, j, k) is
// a pure function of (noise_seed, h, j, k).
CountTables PrivatizeCounts(const CountTables& raw, double sigma_sq,
                            double e_rho, uint64_t noise_seed);

CountTables TabulatePrivateCounts(const Dataset& dataset,
                                  const ZoneScheme& scheme,
                                  const std::vector<Vector>& boundaries,
                                  double sigma_sq, double e_rho,
                                  uint64_t noise_seed);

struct StageKernel {
  int num_sa = 0;
  int num_s = 0;
  std::vector<double> p;       // row-major
  std::vector<char> fallback;  // row used the uniform distribution

  std::span<const double> Row(int sa) const {
    return {p.data() + static_cast<size_t>(sa) * num_s,
            static_cast<size_t>(num_s)};
  }
};

// Rows with marginal > e_rho are joint / marginal; the rest are uniform.
StageKernel BuildPrivateKernel(const StageCounts& counts, double e_rho);

struct PenaltyInputs {
  int anchor;
  int stage;
  int horizon;
  std::span<const double> kernel_row;
  std::span<const double> v_next;
  double n_tilde;
  double e_rho;
  double iota;
};

struct PessimismConfig {
  double c1 = 1.4142135623730951;  // sqrt(2)
  double c2 = 16.0;
  double c_fallback = 2.0;
  // Replaces the built-in form when set.
  std::function<double(const PenaltyInputs&)> custom;
};

// log(H * M * (w + d) / delta).
double Iota(int horizon, int zones, int state_action_dim, double delta);

// C*H if n_tilde <= e_rho, otherwise
// c1 * sqrt(Var(v_next) * iota / n_tilde) + c2 * H * iota * (1 + e_rho) / n_tilde.
double PessimismPenalty(const PenaltyInputs& in, const PessimismConfig& config);

using RewardModel = std::function<double(
    int stage, std::span<const double> state_action,
    std::span<const double> next_state)>;

// Lower corner of the admissible action box at a state.
using ActionFloor = std::function<Vector(std::span<const double> state)>;

struct PoolConfig {
  double delta = 0.05;
  PessimismConfig pessimism;
  bool zero_penalty = false;
  int grid_points = 32;
  int refine_iterations = 10;
  ActionFloor action_floor;  // empty: the zero vector
};

struct StageTable {
  Vector lambda;
  std::vector<double> q_bar;    // per state-action anchor
  std::vector<double> q_tilde;  // 0 for anchors NotBelow lambda
  std::vector<double> gamma;    // 0 for anchors NotBelow lambda
  std::vector<char> below;
  double boundary_value = 0.0;
  std::vector<double> v_tilde;  // per state anchor
};

struct AnchorValueTables {
  std::vector<StageTable> stages;  // index h - 1
  int horizon() const { return static_cast<int>(stages.size()); }
};

// Value at lambda: convex interpolation in lambda's direction restricted to
// anchors Below lambda, in the highest zone where that weight is positive.
double BoundaryValue(const StageTable& stage, const ZoneGrid& grid);

// Boundary value for points NotBelow lambda. Below it, convex interpolation
// in the point's zone over the anchors that are themselves Below lambda; if
// none carries weight, their zone average, then the boundary value.
double EvaluateQ(std::span<const double> state_action, int stage,
                 const AnchorValueTables& tables, const ZoneScheme& scheme);

struct GreedyResult {
  Vector action;
  double value;
};

GreedyResult GreedyAction(std::span<const double> state, int stage,
                          const AnchorValueTables& tables,
                          const ZoneScheme& scheme, const PoolConfig& config);

// Fills every stage from H down to 1 given released counts.
AnchorValueTables BackwardInduction(const CountTables& counts, double e_rho,
                                    const ZoneScheme& scheme,
                                    const PoolConfig& config,
                                    const std::vector<Vector>& boundaries,
                                    const RewardModel& reward);

// Recomputes boundary values and the values at state anchors after the
// stored Q-bar entries were modified externally.
void RefreshDerivedValues(AnchorValueTables& tables, const ZoneScheme& scheme,
                          const PoolConfig& config);

class PoolPolicy : public Policy {
 public:
  PoolPolicy(std::shared_ptr<const ZoneScheme> scheme, AnchorValueTables tables,
             PoolConfig config);

  Vector Act(int stage, std::span<const double> state, Rng& rng) const override;

  const AnchorValueTables& tables() const { return tables_; }
  const ZoneScheme& scheme() const { return *scheme_; }
  const PoolConfig& config() const { return config_; }

 private:
  std::shared_ptr<const ZoneScheme> scheme_;
  AnchorValueTables tables_;
  PoolConfig config_;
};

struct PoolRun {
  PoolPolicy policy;
  PrivacyAccountant accountant;
  double sigma_sq = 0.0;
  double e_rho = 0.0;
};

void ValidateBoundaries(const std::vector<Vector>& boundaries, int horizon,
                        int dim);

PoolRun TrainPool(const Dataset& dataset,
                  std::shared_ptr<const ZoneScheme> scheme,
                  const PrivacyBudget& budget, const PoolConfig& config,
                  const std::vector<Vector>& boundaries,
                  const RewardModel& reward, uint64_t noise_seed);

// stage,anchor_index,q_bar,gamma
void WritePolicyCsv(const AnchorValueTables& tables, std::ostream& out);

}  // namespace pool

#endif  // POOL_POOL_H_
