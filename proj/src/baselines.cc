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

#include "pool/baselines.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "pool/rng.h"

namespace pool {

std::string BaselineName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kNonPrivate:
      return "nonprivate";
    case BaselineKind::kInputPerturbation:
      return "ip";
    case BaselineKind::kOutputPerturbation:
      return "op";
  }
  return "unknown";
}

PoolRun TrainNonPrivate(const Dataset& dataset,
                        std::shared_ptr<const ZoneScheme> scheme,
                        const PoolConfig& config,
                        const std::vector<Vector>& boundaries,
                        const RewardModel& reward) {
  const CountTables counts = TabulateCounts(dataset, *scheme, boundaries);
  AnchorValueTables tables =
      BackwardInduction(counts, 0.0, *scheme, config, boundaries, reward);
  return PoolRun{PoolPolicy(std::move(scheme), std::move(tables), config),
                 PrivacyAccountant(), 0.0, 0.0};
}

Dataset PerturbNextStates(const Dataset& dataset, double sigma_sq,
                          uint64_t seed) {
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("sigma_sq must be >= 0");
  const double sigma = std::sqrt(sigma_sq);
  Dataset out(dataset.state_dim(), dataset.action_dim(), dataset.horizon());
  for (int e = 0; e < dataset.episodes(); ++e) {
    std::vector<TransitionRecord> episode;
    episode.reserve(dataset.horizon());
    for (int h = 1; h <= dataset.horizon(); ++h) {
      const TransitionRecord& r = dataset.record(e, h);
      if (r.censored()) {
        episode.push_back(r);
        continue;
      }
      Vector next = r.next_state();
      for (size_t i = 0; i < next.size(); ++i) {
        const double z = KeyedStandardNormal(DeriveSeed(
            seed, {static_cast<uint64_t>(e), static_cast<uint64_t>(h),
                   static_cast<uint64_t>(i)}));
        next[i] = std::clamp(next[i] + sigma * z, 0.0, 1.0);
      }
      episode.push_back(TransitionRecord::Observed(h, r.state(), r.action(),
                                                   r.reward(), std::move(next)));
    }
    out.AddEpisode(std::move(episode));
  }
  return out;
}

PoolRun TrainInputPerturbation(const Dataset& dataset,
                               std::shared_ptr<const ZoneScheme> scheme,
                               const PrivacyBudget& budget,
                               const PoolConfig& config,
                               const std::vector<Vector>& boundaries,
                               const RewardModel& reward, uint64_t seed) {
  ValidateBudget(budget);
  const double sigma_sq = CountNoiseScale(dataset.horizon(), budget.rho);
  const Dataset noisy = PerturbNextStates(dataset, sigma_sq, seed);
  PoolRun run =
      TrainNonPrivate(noisy, std::move(scheme), config, boundaries, reward);
  run.sigma_sq = sigma_sq;
  run.accountant.Spend("perturbed next states (nominal)", budget.rho);
  return run;
}

PoolRun TrainOutputPerturbation(const Dataset& dataset,
                                std::shared_ptr<const ZoneScheme> scheme,
                                const PrivacyBudget& budget,
                                const PoolConfig& config,
                                const std::vector<Vector>& boundaries,
                                const RewardModel& reward, uint64_t seed) {
  ValidateBudget(budget);
  const int horizon = dataset.horizon();
  PoolRun base = TrainNonPrivate(dataset, scheme, config, boundaries, reward);
  AnchorValueTables tables = base.policy.tables();
  const double h3 = static_cast<double>(horizon) * horizon * horizon;
  const double sigma_sq = 2.0 * h3 / budget.rho;
  const double sigma = std::sqrt(sigma_sq);
  for (int h = 1; h <= horizon; ++h) {
    StageTable& st = tables.stages[h - 1];
    const double cap = horizon - h + 1;
    for (size_t j = 0; j < st.q_bar.size(); ++j) {
      if (!st.below[j]) continue;
      const double z = KeyedStandardNormal(DeriveSeed(
          seed, {static_cast<uint64_t>(h), static_cast<uint64_t>(j)}));
      st.q_bar[j] = std::clamp(st.q_bar[j] + sigma * z, 0.0, cap);
    }
  }
  RefreshDerivedValues(tables, *scheme, config);
  PrivacyAccountant accountant;
  accountant.Spend("perturbed anchor values (nominal)", budget.rho);
  return PoolRun{PoolPolicy(std::move(scheme), std::move(tables), config),
                 std::move(accountant), sigma_sq, 0.0};
}

}  // namespace pool
