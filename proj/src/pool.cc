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

#include "pool/pool.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "pool/csv.h"

namespace pool {
namespace {

double TieTolerance(double v) { return 1e-12 * std::max(1.0, std::fabs(v)); }

constexpr uint64_t kJointTag = 0;
constexpr uint64_t kMarginalTag = 1;

}  // namespace

CountTables TabulateCounts(const Dataset& dataset, const ZoneScheme& scheme,
                           const std::vector<Vector>& boundaries) {
  if (dataset.state_dim() != scheme.state_dim ||
      dataset.action_dim() != scheme.action_dim) {
    throw std::invalid_argument("TabulateCounts: dataset/scheme mismatch");
  }
  const int horizon = dataset.horizon();
  ValidateBoundaries(boundaries, horizon,
                     scheme.state_dim + scheme.action_dim);
  const int num_sa = scheme.state_action.num_anchors();
  const int num_s = scheme.state.num_anchors();
  CountTables tables;
  tables.stages.resize(horizon);
  for (StageCounts& st : tables.stages) {
    st.num_sa = num_sa;
    st.num_s = num_s;
    st.joint.assign(static_cast<size_t>(num_sa) * num_s, 0.0);
    st.marginal.assign(num_sa, 0.0);
  }
  Vector sa;
  for (const TransitionRecord& r : dataset.records()) {
    if (r.censored()) continue;
    sa = r.StateAction();
    if (!IsBelow(sa, boundaries[r.stage() - 1])) continue;
    const int j = scheme.state_action.Nearest(sa);
    const int k = scheme.state.Nearest(r.next_state());
    StageCounts& st = tables.stages[r.stage() - 1];
    st.joint[static_cast<size_t>(j) * num_s + k] += 1.0;
    st.marginal[j] += 1.0;
  }
  return tables;
}

CountTables PrivatizeCounts(const CountTables& raw, double sigma_sq,
                            double e_rho, uint64_t noise_seed) {
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("sigma_sq must be >= 0");
  const double sigma = std::sqrt(sigma_sq);
  CountTables out;
  out.stages.resize(raw.stages.size());
  std::vector<double> row;
  for (size_t h = 0; h < raw.stages.size(); ++h) {
    const StageCounts& in = raw.stages[h];
    StageCounts& st = out.stages[h];
    st.num_sa = in.num_sa;
    st.num_s = in.num_s;
    st.joint.assign(in.joint.size(), 0.0);
    st.marginal.assign(in.num_sa, 0.0);
    row.resize(in.num_s);
    const uint64_t stage_key = h + 1;
    for (int j = 0; j < in.num_sa; ++j) {
      for (int k = 0; k < in.num_s; ++k) {
        double v = in.Joint(j, k);
        if (sigma > 0.0) {
          v += sigma * KeyedStandardNormal(DeriveSeed(
                           noise_seed, {kJointTag, stage_key,
                                        static_cast<uint64_t>(j),
                                        static_cast<uint64_t>(k)}));
        }
        row[k] = std::max(v, 0.0);
      }
      double m = in.marginal[j];
      if (sigma > 0.0) {
        m += sigma * KeyedStandardNormal(DeriveSeed(
                         noise_seed,
                         {kMarginalTag, stage_key, static_cast<uint64_t>(j)}));
      }
      m = std::max(m, 0.0);
      ProjectedCounts p = ConsistencyProject(row, m, e_rho);
      std::copy(p.joint.begin(), p.joint.end(),
                st.joint.begin() + static_cast<size_t>(j) * in.num_s);
      st.marginal[j] = p.marginal;
    }
  }
  return out;
}

CountTables TabulatePrivateCounts(const Dataset& dataset,
                                  const ZoneScheme& scheme,
                                  const std::vector<Vector>& boundaries,
                                  double sigma_sq, double e_rho,
                                  uint64_t noise_seed) {
  return PrivatizeCounts(TabulateCounts(dataset, scheme, boundaries), sigma_sq,
                         e_rho, noise_seed);
}

StageKernel BuildPrivateKernel(const StageCounts& counts, double e_rho) {
  if (counts.num_s < 1) throw std::invalid_argument("kernel: no state anchors");
  StageKernel k;
  k.num_sa = counts.num_sa;
  k.num_s = counts.num_s;
  k.p.assign(static_cast<size_t>(k.num_sa) * k.num_s, 0.0);
  k.fallback.assign(k.num_sa, 0);
  const double uniform = 1.0 / k.num_s;
  for (int j = 0; j < k.num_sa; ++j) {
    double* row = k.p.data() + static_cast<size_t>(j) * k.num_s;
    const double n = counts.marginal[j];
    if (n > e_rho && n > 0.0) {
      for (int s = 0; s < k.num_s; ++s) row[s] = counts.Joint(j, s) / n;
    } else {
      std::fill(row, row + k.num_s, uniform);
      k.fallback[j] = 1;
    }
  }
  return k;
}

double Iota(int horizon, int zones, int state_action_dim, double delta) {
  if (horizon < 1 || zones < 1 || state_action_dim < 1) {
    throw std::invalid_argument("Iota: sizes must be >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("Iota: delta must lie in (0, 1)");
  }
  return std::log(static_cast<double>(horizon) * zones * state_action_dim /
                  delta);
}

double PessimismPenalty(const PenaltyInputs& in, const PessimismConfig& config) {
  if (config.custom) return config.custom(in);
  if (in.n_tilde < 0.0) throw std::invalid_argument("n_tilde must be >= 0");
  if (in.n_tilde <= in.e_rho || in.n_tilde == 0.0) {
    return config.c_fallback * in.horizon;
  }
  double mean = 0.0;
  for (size_t k = 0; k < in.kernel_row.size(); ++k) {
    mean += in.kernel_row[k] * in.v_next[k];
  }
  double var = 0.0;
  for (size_t k = 0; k < in.kernel_row.size(); ++k) {
    const double dv = in.v_next[k] - mean;
    var += in.kernel_row[k] * dv * dv;
  }
  return config.c1 * std::sqrt(var * in.iota / in.n_tilde) +
         config.c2 * in.horizon * in.iota * (1.0 + in.e_rho) / in.n_tilde;
}

double BoundaryValue(const StageTable& stage, const ZoneGrid& grid) {
  const int top = ZoneOf(stage.lambda, grid.zones());
  for (int m = top; m >= 1; --m) {
    if (!grid.usable(m)) continue;
    double total = 0.0;
    double acc = 0.0;
    for (const AnchorWeight& c : grid.Coefficients(stage.lambda, m)) {
      if (!stage.below[c.index] || c.weight <= 0.0) continue;
      total += c.weight;
      acc += c.weight * stage.q_bar[c.index];
    }
    if (total > 1e-12) return acc / total;
  }
  // No positive weight anywhere: average the Below anchors of the highest
  // zone that has any.
  for (int m = top; m >= 1; --m) {
    if (!grid.usable(m)) continue;
    const int first = grid.first_anchor(m);
    double acc = 0.0;
    int count = 0;
    for (int j = first; j < first + grid.dim(); ++j) {
      if (!stage.below[j]) continue;
      acc += stage.q_bar[j];
      ++count;
    }
    if (count > 0) return acc / count;
  }
  throw std::runtime_error("no anchor lies below the observable boundary");
}

double EvaluateQ(std::span<const double> state_action, int stage,
                 const AnchorValueTables& tables, const ZoneScheme& scheme) {
  if (stage < 1 || stage > tables.horizon()) {
    throw std::out_of_range("EvaluateQ: stage");
  }
  const StageTable& st = tables.stages[stage - 1];
  if (!IsBelow(state_action, st.lambda)) return st.boundary_value;
  const ZoneGrid& grid = scheme.state_action;
  thread_local std::vector<AnchorWeight> weights;
  weights.resize(grid.dim());
  grid.WeightsInto(state_action, weights);
  // Anchors past the boundary only hold the boundary placeholder, so they
  // are left out of interpolation at observable points.
  double q = 0.0;
  double total = 0.0;
  for (const AnchorWeight& w : weights) {
    if (!st.below[w.index] || w.weight <= 0.0) continue;
    q += w.weight * st.q_bar[w.index];
    total += w.weight;
  }
  if (total > 0.0) return q / total;
  const int first = grid.first_anchor(grid.anchor_zone(weights[0].index));
  int count = 0;
  for (int j = first; j < first + grid.dim(); ++j) {
    if (!st.below[j]) continue;
    q += st.q_bar[j];
    ++count;
  }
  return count > 0 ? q / count : st.boundary_value;
}

GreedyResult GreedyAction(std::span<const double> state, int stage,
                          const AnchorValueTables& tables,
                          const ZoneScheme& scheme, const PoolConfig& config) {
  const int w = scheme.state_dim;
  const int d = scheme.action_dim;
  if (static_cast<int>(state.size()) != w) {
    throw std::invalid_argument("GreedyAction: state dimension mismatch");
  }
  Vector floor = config.action_floor ? config.action_floor(state) : Vector(d, 0.0);
  if (static_cast<int>(floor.size()) != d) {
    throw std::invalid_argument("GreedyAction: action floor dimension mismatch");
  }
  for (double& f : floor) f = std::clamp(f, 0.0, 1.0);
  auto clamp_action = [&](Vector& a) {
    for (int i = 0; i < d; ++i) a[i] = std::clamp(a[i], floor[i], 1.0);
  };

  std::vector<Vector> candidates;
  const ZoneGrid& grid = scheme.state_action;
  candidates.reserve(grid.num_anchors() + std::max(config.grid_points, 1));
  for (int j = 0; j < grid.num_anchors(); ++j) {
    const Vector& anchor = grid.anchor(j);
    Vector a(anchor.begin() + w, anchor.end());
    clamp_action(a);
    candidates.push_back(std::move(a));
  }
  const int g = config.grid_points;
  auto grid_value = [&](int i, int t) {
    return g >= 2 ? floor[i] + (1.0 - floor[i]) * t / (g - 1) : floor[i];
  };
  for (int t = 0; t < std::max(g, 1); ++t) {
    if (g < 1) break;
    Vector a(d);
    for (int i = 0; i < d; ++i) a[i] = grid_value(i, t);
    candidates.push_back(std::move(a));
  }
  if (candidates.empty()) candidates.push_back(floor);
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  Vector point(state.begin(), state.end());
  point.resize(w + d);
  auto evaluate = [&](const Vector& a) {
    std::copy(a.begin(), a.end(), point.begin() + w);
    return EvaluateQ(point, stage, tables, scheme);
  };

  std::vector<double> values(candidates.size());
  double vmax = -std::numeric_limits<double>::infinity();
  for (size_t c = 0; c < candidates.size(); ++c) {
    values[c] = evaluate(candidates[c]);
    vmax = std::max(vmax, values[c]);
  }
  size_t pick = 0;
  while (values[pick] < vmax - TieTolerance(vmax)) ++pick;
  Vector best = candidates[pick];
  double best_value = values[pick];

  auto try_move = [&](const Vector& a) {
    const double v = evaluate(a);
    if (v > best_value + TieTolerance(best_value)) {
      best = a;
      best_value = v;
    }
  };

  if (d > 1 && g >= 2) {
    for (int i = 0; i < d; ++i) {
      const Vector start = best;
      for (int t = 0; t < g; ++t) {
        Vector a = start;
        a[i] = grid_value(i, t);
        try_move(a);
      }
    }
  }

  double step = g >= 2 ? 0.5 / (g - 1) : 0.25;
  for (int it = 0; it < config.refine_iterations; ++it) {
    for (int i = 0; i < d; ++i) {
      for (double sign : {-1.0, 1.0}) {
        Vector a = best;
        a[i] += sign * step;
        clamp_action(a);
        if (a != best) try_move(a);
      }
    }
    step *= 0.5;
  }
  return {std::move(best), best_value};
}

namespace {

void FillDerived(StageTable& st, int stage, const AnchorValueTables& tables,
                 const ZoneScheme& scheme, const PoolConfig& config) {
  st.boundary_value = BoundaryValue(st, scheme.state_action);
  for (size_t j = 0; j < st.q_bar.size(); ++j) {
    if (!st.below[j]) st.q_bar[j] = st.boundary_value;
  }
  const ZoneGrid& sgrid = scheme.state;
  st.v_tilde.assign(sgrid.num_anchors(), 0.0);
  for (int k = 0; k < sgrid.num_anchors(); ++k) {
    st.v_tilde[k] =
        GreedyAction(sgrid.anchor(k), stage, tables, scheme, config).value;
  }
}

}  // namespace

AnchorValueTables BackwardInduction(const CountTables& counts, double e_rho,
                                    const ZoneScheme& scheme,
                                    const PoolConfig& config,
                                    const std::vector<Vector>& boundaries,
                                    const RewardModel& reward) {
  const int horizon = static_cast<int>(counts.stages.size());
  const int n_sa = scheme.state_dim + scheme.action_dim;
  ValidateBoundaries(boundaries, horizon, n_sa);
  const ZoneGrid& sa_grid = scheme.state_action;
  const ZoneGrid& s_grid = scheme.state;
  const int num_sa = sa_grid.num_anchors();
  const int num_s = s_grid.num_anchors();
  const double iota = Iota(horizon, scheme.zones, n_sa, config.delta);

  AnchorValueTables tables;
  tables.stages.resize(horizon);
  std::vector<double> v_next(num_s, 0.0);
  for (int h = horizon; h >= 1; --h) {
    const StageCounts& c = counts.stages[h - 1];
    if (c.num_sa != num_sa || c.num_s != num_s) {
      throw std::invalid_argument("BackwardInduction: counts/scheme mismatch");
    }
    const StageKernel kernel = BuildPrivateKernel(c, e_rho);
    StageTable& st = tables.stages[h - 1];
    st.lambda = boundaries[h - 1];
    st.q_bar.assign(num_sa, 0.0);
    st.q_tilde.assign(num_sa, 0.0);
    st.gamma.assign(num_sa, 0.0);
    st.below.assign(num_sa, 0);
    const double cap = horizon - h + 1;
    for (int j = 0; j < num_sa; ++j) {
      const Vector& b = sa_grid.anchor(j);
      if (!IsBelow(b, st.lambda)) continue;
      st.below[j] = 1;
      const std::span<const double> row = kernel.Row(j);
      double q = 0.0;
      for (int k = 0; k < num_s; ++k) {
        if (row[k] == 0.0) continue;
        q += row[k] * (reward(h, b, s_grid.anchor(k)) + v_next[k]);
      }
      double gamma = 0.0;
      if (!config.zero_penalty) {
        gamma = PessimismPenalty(
            {j, h, horizon, row, v_next, c.marginal[j], e_rho, iota},
            config.pessimism);
      }
      st.q_tilde[j] = q;
      st.gamma[j] = gamma;
      st.q_bar[j] = std::clamp(q - gamma, 0.0, cap);
    }
    FillDerived(st, h, tables, scheme, config);
    v_next = st.v_tilde;
  }
  return tables;
}

void RefreshDerivedValues(AnchorValueTables& tables, const ZoneScheme& scheme,
                          const PoolConfig& config) {
  for (int h = 1; h <= tables.horizon(); ++h) {
    FillDerived(tables.stages[h - 1], h, tables, scheme, config);
  }
}

PoolPolicy::PoolPolicy(std::shared_ptr<const ZoneScheme> scheme,
                       AnchorValueTables tables, PoolConfig config)
    : scheme_(std::move(scheme)),
      tables_(std::move(tables)),
      config_(std::move(config)) {
  if (!scheme_) throw std::invalid_argument("PoolPolicy: null scheme");
}

Vector PoolPolicy::Act(int stage, std::span<const double> state,
                       Rng& /*rng*/) const {
  return GreedyAction(state, stage, tables_, *scheme_, config_).action;
}

void ValidateBoundaries(const std::vector<Vector>& boundaries, int horizon,
                        int dim) {
  if (static_cast<int>(boundaries.size()) != horizon) {
    throw std::invalid_argument("need one boundary per stage");
  }
  for (const Vector& lambda : boundaries) {
    if (static_cast<int>(lambda.size()) != dim) {
      throw std::invalid_argument("boundary dimension mismatch");
    }
    for (double v : lambda) {
      if (!(v > 0.0 && v <= 1.0)) {
        throw std::invalid_argument("boundary coordinates must lie in (0, 1]");
      }
    }
  }
}

PoolRun TrainPool(const Dataset& dataset,
                  std::shared_ptr<const ZoneScheme> scheme,
                  const PrivacyBudget& budget, const PoolConfig& config,
                  const std::vector<Vector>& boundaries,
                  const RewardModel& reward, uint64_t noise_seed) {
  ValidateBudget(budget);
  const int horizon = dataset.horizon();
  const double sigma_sq = CountNoiseScale(horizon, budget.rho);
  const double e_rho =
      UniformNoiseBound(horizon, scheme->zones, scheme->state_dim,
                        scheme->action_dim, config.delta, budget.rho);
  const CountTables counts = TabulatePrivateCounts(
      dataset, *scheme, boundaries, sigma_sq, e_rho, noise_seed);
  PrivacyAccountant accountant;
  accountant.Spend("marginal counts", budget.rho / 2.0);
  accountant.Spend("joint counts", budget.rho / 2.0);
  AnchorValueTables tables =
      BackwardInduction(counts, e_rho, *scheme, config, boundaries, reward);
  return PoolRun{PoolPolicy(std::move(scheme), std::move(tables), config),
                 std::move(accountant), sigma_sq, e_rho};
}

void WritePolicyCsv(const AnchorValueTables& tables, std::ostream& out) {
  out << "stage,anchor_index,q_bar,gamma\n";
  for (int h = 1; h <= tables.horizon(); ++h) {
    const StageTable& st = tables.stages[h - 1];
    for (size_t j = 0; j < st.q_bar.size(); ++j) {
      out << h << ',' << j << ',' << FormatDouble(st.q_bar[j]) << ','
          << FormatDouble(st.gamma[j]) << '\n';
    }
  }
}

}  // namespace pool
