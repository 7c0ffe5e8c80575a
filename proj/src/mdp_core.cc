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

#include "pool/mdp_core.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <utility>

#include "pool/csv.h"

namespace pool {

BoundarySide CompareToBoundary(std::span<const double> point,
                               std::span<const double> boundary) {
  if (point.size() != boundary.size()) {
    throw std::invalid_argument("CompareToBoundary: dimension mismatch");
  }
  for (size_t i = 0; i < point.size(); ++i) {
    if (!(point[i] < boundary[i])) return BoundarySide::kNotBelow;
  }
  return BoundarySide::kBelow;
}

Vector JoinStateAction(std::span<const double> state,
                       std::span<const double> action) {
  Vector out;
  out.reserve(state.size() + action.size());
  out.insert(out.end(), state.begin(), state.end());
  out.insert(out.end(), action.begin(), action.end());
  return out;
}

UnobservedFeedbackError::UnobservedFeedbackError()
    : std::logic_error("feedback of a censored record is unobserved") {}

TransitionRecord::TransitionRecord(int stage, Vector state, Vector action,
                                   std::optional<Feedback> feedback)
    : stage_(stage),
      state_(std::move(state)),
      action_(std::move(action)),
      feedback_(std::move(feedback)) {
  if (stage_ < 1) throw std::invalid_argument("stage must be >= 1");
}

TransitionRecord TransitionRecord::Observed(int stage, Vector state,
                                            Vector action, double reward,
                                            Vector next_state) {
  if (next_state.size() != state.size()) {
    throw std::invalid_argument("next_state dimension differs from state");
  }
  return TransitionRecord(stage, std::move(state), std::move(action),
                          Feedback{reward, std::move(next_state)});
}

TransitionRecord TransitionRecord::Censored(int stage, Vector state,
                                            Vector action) {
  return TransitionRecord(stage, std::move(state), std::move(action),
                          std::nullopt);
}

double TransitionRecord::reward() const {
  if (!feedback_) throw UnobservedFeedbackError();
  return feedback_->reward;
}

const Vector& TransitionRecord::next_state() const {
  if (!feedback_) throw UnobservedFeedbackError();
  return feedback_->next_state;
}

Dataset::Dataset(int state_dim, int action_dim, int horizon)
    : state_dim_(state_dim), action_dim_(action_dim), horizon_(horizon) {
  if (state_dim < 1 || action_dim < 1 || horizon < 1) {
    throw std::invalid_argument("Dataset: dimensions and horizon must be >= 1");
  }
}

void Dataset::AddEpisode(std::vector<TransitionRecord> episode) {
  if (static_cast<int>(episode.size()) != horizon_) {
    throw std::invalid_argument("Dataset: episode must have exactly H records");
  }
  for (int h = 1; h <= horizon_; ++h) {
    const TransitionRecord& r = episode[h - 1];
    if (r.stage() != h) {
      throw std::invalid_argument("Dataset: stages must run 1..H in order");
    }
    if (static_cast<int>(r.state().size()) != state_dim_ ||
        static_cast<int>(r.action().size()) != action_dim_) {
      throw std::invalid_argument("Dataset: record dimension mismatch");
    }
  }
  for (TransitionRecord& r : episode) records_.push_back(std::move(r));
  ++episodes_;
}

const TransitionRecord& Dataset::record(int episode, int stage) const {
  if (episode < 0 || episode >= episodes_ || stage < 1 || stage > horizon_) {
    throw std::out_of_range("Dataset::record");
  }
  return records_[static_cast<size_t>(episode) * horizon_ + (stage - 1)];
}

int Dataset::CensoredCount() const {
  int count = 0;
  for (const TransitionRecord& r : records_) count += r.censored() ? 1 : 0;
  return count;
}

void WriteDatasetCsv(const Dataset& dataset, std::ostream& out) {
  const int w = dataset.state_dim();
  const int d = dataset.action_dim();
  out << "episode,stage";
  for (int i = 0; i < w; ++i) out << ",state_" << i;
  for (int i = 0; i < d; ++i) out << ",action_" << i;
  out << ",reward";
  for (int i = 0; i < w; ++i) out << ",next_" << i;
  out << ",censored\n";
  for (int e = 0; e < dataset.episodes(); ++e) {
    for (int h = 1; h <= dataset.horizon(); ++h) {
      const TransitionRecord& r = dataset.record(e, h);
      out << e << ',' << h;
      for (double v : r.state()) out << ',' << FormatDouble(v);
      for (double v : r.action()) out << ',' << FormatDouble(v);
      if (r.censored()) {
        out << ',';
        for (int i = 0; i < w; ++i) out << ',';
        out << ",1\n";
      } else {
        out << ',' << FormatDouble(r.reward());
        for (double v : r.next_state()) out << ',' << FormatDouble(v);
        out << ",0\n";
      }
    }
  }
}

Dataset ReadDatasetCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: empty");
  const std::vector<std::string> header = SplitCsvLine(line);
  int w = 0;
  int d = 0;
  for (const std::string& h : header) {
    if (h.rfind("state_", 0) == 0) ++w;
    if (h.rfind("action_", 0) == 0) ++d;
  }
  const size_t expected = 2 + w + d + 1 + w + 1;
  if (w == 0 || d == 0 || header.size() != expected) {
    throw std::runtime_error("dataset csv: malformed header");
  }

  struct Row {
    int episode;
    TransitionRecord record;
  };
  std::vector<Row> rows;
  int horizon = 0;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitCsvLine(line);
    if (f.size() != expected) {
      throw std::runtime_error("dataset csv: wrong field count on line " +
                               std::to_string(line_no));
    }
    const int episode = std::stoi(f[0]);
    const int stage = std::stoi(f[1]);
    Vector state(w), action(d);
    for (int i = 0; i < w; ++i) state[i] = ParseDouble(f[2 + i]);
    for (int i = 0; i < d; ++i) action[i] = ParseDouble(f[2 + w + i]);
    const bool censored = f.back() == "1";
    if (censored) {
      rows.push_back({episode, TransitionRecord::Censored(
                                   stage, std::move(state), std::move(action))});
    } else {
      const double reward = ParseDouble(f[2 + w + d]);
      Vector next(w);
      for (int i = 0; i < w; ++i) next[i] = ParseDouble(f[3 + w + d + i]);
      rows.push_back({episode, TransitionRecord::Observed(
                                   stage, std::move(state), std::move(action),
                                   reward, std::move(next))});
    }
    horizon = std::max(horizon, stage);
  }
  if (horizon == 0) throw std::runtime_error("dataset csv: no records");

  Dataset dataset(w, d, horizon);
  std::vector<TransitionRecord> episode;
  int current = -1;
  for (Row& row : rows) {
    if (row.episode != current) {
      if (!episode.empty()) dataset.AddEpisode(std::move(episode));
      episode.clear();
      current = row.episode;
    }
    episode.push_back(std::move(row.record));
  }
  if (!episode.empty()) dataset.AddEpisode(std::move(episode));
  return dataset;
}

double MonteCarloEstimate::StandardError() const {
  return episodes > 0 ? sd / std::sqrt(static_cast<double>(episodes)) : 0.0;
}

std::vector<double> EpisodeReturns(const Environment& env,
                                   const Policy& policy, int episodes,
                                   uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  std::vector<double> returns(episodes);
  for (int e = 0; e < episodes; ++e) {
    Rng rng = MakeRng(DeriveSeed(seed, {static_cast<uint64_t>(e)}));
    Vector state = env.InitialState(rng);
    double total = 0.0;
    for (int h = 1; h <= env.horizon(); ++h) {
      const Vector action = policy.Act(h, state, rng);
      StepOutcome step = env.Step(h, state, action, rng);
      total += step.reward;
      state = std::move(step.next_state);
    }
    returns[e] = total;
  }
  return returns;
}

MonteCarloEstimate MeanAndSd(std::span<const double> samples) {
  MonteCarloEstimate est;
  est.episodes = static_cast<int>(samples.size());
  if (samples.empty()) return est;
  // Two-pass for accuracy; summation order is fixed so results are
  // reproducible bit for bit.
  double sum = 0.0;
  for (double x : samples) sum += x;
  est.mean = sum / samples.size();
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - est.mean) * (x - est.mean);
    est.sd = std::sqrt(ss / (samples.size() - 1));
  }
  return est;
}

MonteCarloEstimate MonteCarloValue(const Environment& env,
                                   const Policy& policy, int episodes,
                                   uint64_t seed) {
  const std::vector<double> returns =
      EpisodeReturns(env, policy, episodes, seed);
  return MeanAndSd(returns);
}

}  // namespace pool
