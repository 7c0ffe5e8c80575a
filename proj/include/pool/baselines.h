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

// Comparison trainers that share the anchor backbone: a non-private run, a
// run on a dataset whose observed successors were perturbed, and a run whose
// learned anchor values were perturbed afterwards.

#ifndef POOL_BASELINES_H_
#define POOL_BASELINES_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "pool/pool.h"

namespace pool {

enum class BaselineKind { kNonPrivate, kInputPerturbation, kOutputPerturbation };

std::string BaselineName(BaselineKind kind);

// Counts are used as tabulated; no noise, E_rho = 0.
PoolRun TrainNonPrivate(const Dataset& dataset,
                        std::shared_ptr<const ZoneScheme> scheme,
                        const PoolConfig& config,
                        const std::vector<Vector>& boundaries,
                        const RewardModel& reward);

// Copy of `dataset` with N(0, sigma_sq) added to every coordinate of every
// observed next state, clipped to [0, 1]. Censored records are untouched.
Dataset PerturbNextStates(const Dataset& dataset, double sigma_sq, uint64_t seed);

// Next states perturbed at sigma^2 = 2H / rho, then TrainNonPrivate.
PoolRun TrainInputPerturbation(const Dataset& dataset,
                               std::shared_ptr<const ZoneScheme> scheme,
                               const PrivacyBudget& budget,
                               const PoolConfig& config,
                               const std::vector<Vector>& boundaries,
                               const RewardModel& reward, uint64_t seed);

// TrainNonPrivate, then N(0, 2H^3 / rho) added to every anchor Q-bar Below
// the boundary, re-clipped to [0, H-h+1]; boundary values and state-anchor
// values are recomputed from the perturbed tables.
PoolRun TrainOutputPerturbation(const Dataset& dataset,
                                std::shared_ptr<const ZoneScheme> scheme,
                                const PrivacyBudget& budget,
                                const PoolConfig& config,
                                const std::vector<Vector>& boundaries,
                                const RewardModel& reward, uint64_t seed);

}  // namespace pool

#endif  // POOL_BASELINES_H_
