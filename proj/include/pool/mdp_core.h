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

// Finite-horizon episodic MDP abstractions over the unit cube, the one-sided
// feedback boundary predicate, offline dataset containers, and Monte Carlo
// policy evaluation.

#ifndef POOL_MDP_CORE_H_
#define POOL_MDP_CORE_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pool/rng.h"

namespace pool {

using Vector = std::vector<double>;

// Result of comparing a state-action point against an observable boundary.
// kBelow: every coordinate is strictly smaller than the boundary.
// kNotBelow: at least one coordinate reaches or exceeds it (ties included).
enum class BoundarySide { kBelow, kNotBelow };

BoundarySide CompareToBoundary(std::span<const double> point,
                               std::span<const double> boundary);

inline bool IsBelow(std::span<const double> point,
                    std::span<const double> boundary) {
  return CompareToBoundary(point, boundary) == BoundarySide::kBelow;
}

// Concatenates a state and an action into a state-action point.
Vector JoinStateAction(std::span<const double> state,
                       std::span<const double> action);

// Thrown when a learner touches the feedback of a censored record.
class UnobservedFeedbackError : public std::logic_error {
 public:
  UnobservedFeedbackError();
};

// One (s_h, a_h, r_h, s_{h+1}) tuple. Censored records carry no reward and no
// successor; the accessors throw instead of returning a placeholder.
class TransitionRecord {
 public:
  static TransitionRecord Observed(int stage, Vector state, Vector action,
                                   double reward, Vector next_state);
  static TransitionRecord Censored(int stage, Vector state, Vector action);

  int stage() const { return stage_; }
  const Vector& state() const { return state_; }
  const Vector& action() const { return action_; }
  bool censored() const { return !feedback_.has_value(); }

  double reward() const;
  const Vector& next_state() const;

  Vector StateAction() const { return JoinStateAction(state_, action_); }

 private:
  struct Feedback {
    double reward;
    Vector next_state;
  };

  TransitionRecord(int stage, Vector state, Vector action,
                   std::optional<Feedback> feedback);

  int stage_;
  Vector state_;
  Vector action_;
  std::optional<Feedback> feedback_;
};

// n episodes of exactly H records each, stored episode-major.
class Dataset {
 public:
  Dataset(int state_dim, int action_dim, int horizon);

  // Appends a full episode; records must be stages 1..H in order with the
  // dataset's dimensions.
  void AddEpisode(std::vector<TransitionRecord> episode);

  int state_dim() const { return state_dim_; }
  int action_dim() const { return action_dim_; }
  int horizon() const { return horizon_; }
  int episodes() const { return episodes_; }

  // stage is 1-based.
  const TransitionRecord& record(int episode, int stage) const;
  const std::vector<TransitionRecord>& records() const { return records_; }

  // Mutable access is for baselines that rewrite observed successors.
  std::vector<TransitionRecord>& mutable_records() { return records_; }

  int CensoredCount() const;

 private:
  int state_dim_;
  int action_dim_;
  int horizon_;
  int episodes_ = 0;
  std::vector<TransitionRecord> records_;
};

// Header: episode,stage,state_0..,action_0..,reward,next_0..,censored.
// Censored rows leave reward and next fields empty.
void WriteDatasetCsv(const Dataset& dataset, std::ostream& out);
Dataset ReadDatasetCsv(std::istream& in);

// pi_h: S -> A. Implementations must return actions in [0,1]^d.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual Vector Act(int stage, std::span<const double> state,
                     Rng& rng) const = 0;
};

struct StepOutcome {
  double reward = 0.0;
  Vector next_state;
};

// Simulator used for evaluation. Stages are 1-based.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual int horizon() const = 0;
  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual Vector InitialState(Rng& rng) const = 0;
  virtual StepOutcome Step(int stage, std::span<const double> state,
                           std::span<const double> action, Rng& rng) const = 0;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation of per-episode returns
  int episodes = 0;

  double StandardError() const;
};

// Per-episode returns; episode e draws from MakeRng(DeriveSeed(seed, {e})).
std::vector<double> EpisodeReturns(const Environment& env,
                                   const Policy& policy, int episodes,
                                   uint64_t seed);

MonteCarloEstimate MonteCarloValue(const Environment& env,
                                   const Policy& policy, int episodes,
                                   uint64_t seed);

MonteCarloEstimate MeanAndSd(std::span<const double> samples);

}  // namespace pool

#endif  // POOL_MDP_CORE_H_
