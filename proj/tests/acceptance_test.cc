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


// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Sweep results are also written next to the
// binary as acceptance_<axis>.csv.

#include <openssl/sha.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "anchor_dp_oracle.h"
#include "pool/baselines.h"
#include "pool/discretization.h"
#include "pool/harness.h"
#include "pool/inventory.h"
#include "pool/mdp_core.h"
#include "pool/pool.h"
#include "pool/privacy.h"
#include "pool/rng.h"

#ifndef POOL_SOURCE_DIR
#define POOL_SOURCE_DIR "."
#endif

namespace pool {
namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string Fmt(double v, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

// ---------------------------------------------------------------- 1

Verdict PrivacyAccounting() {
  // Two releases charged rho / 2 each by the trainer.
  auto scheme = std::make_shared<const ZoneScheme>(BuildZoneScheme(1, 1, 5, 1));
  Dataset data(1, 1, 2);
  for (int e = 0; e < 20; ++e) {
    data.AddEpisode({TransitionRecord::Observed(1, {0.2}, {0.3}, 0.0, {0.4}),
                     TransitionRecord::Observed(2, {0.4}, {0.1}, 0.0, {0.5})});
  }
  auto reward = [](int, std::span<const double> b, std::span<const double>) {
    return 0.5 * b[0];
  };
  const std::vector<Vector> bounds(2, Vector{1.0, 1.0});
  int exact = 0;
  int total = 0;
  Rng rng = MakeRng(1);
  std::vector<double> rhos = {0.1, 1, 5, 10, 20, 40};
  for (int i = 0; i < 20; ++i) rhos.push_back(UniformRange(rng, 1e-3, 100.0));
  for (double rho : rhos) {
    const PoolRun run =
        TrainPool(data, scheme, {rho, 0.05}, PoolConfig(), bounds, reward, 1);
    ++total;
    const auto& ch = run.accountant.charges();
    exact += ch.size() == 2 && ch[0].rho == rho / 2 && ch[1].rho == rho / 2 &&
             run.accountant.TotalRho() == rho &&
             ComposeBudgets(ch[0].rho, ch[1].rho) == rho &&
             run.sigma_sq == 2.0 * 2 / rho;
  }
  double worst = 0.0;
  for (double rho : {1e-3, 0.1, 0.5, 1.0, 5.0, 10.0, 40.0, 100.0}) {
    for (double delta : {1e-10, 1e-5, 0.01, 0.05, 0.5, 0.99}) {
      const long double ref =
          static_cast<long double>(rho) +
          2.0L * std::sqrt(static_cast<long double>(rho) *
                           std::log(1.0L / static_cast<long double>(delta)));
      worst = std::max(
          worst, static_cast<double>(std::fabs(ZcdpToDp(rho, delta) - ref)));
    }
  }
  return {exact == total && worst <= 1e-12,
          std::to_string(exact) + "/" + std::to_string(total) +
              " budgets exact; max |eps - ref| = " + Fmt(worst, 3)};
}

// ---------------------------------------------------------------- 2

Verdict NoiseCalibration() {
  bool pass = true;
  std::string detail;
  for (auto [horizon, rho] : {std::pair{7, 10.0}, std::pair{7, 0.1},
                              std::pair{10, 5.0}}) {
    const double sigma_sq = CountNoiseScale(horizon, rho);
    const double centre = 100.0 * std::sqrt(sigma_sq);
    const std::vector<double> values(100000, centre);
    Rng rng = MakeRng(DeriveSeed(2, {static_cast<uint64_t>(horizon)}));
    const std::vector<double> out = GaussianPerturb(values, sigma_sq, rng);
    double mean = 0.0;
    for (double x : out) mean += x - centre;
    mean /= out.size();
    double var = 0.0;
    for (double x : out) var += (x - centre - mean) * (x - centre - mean);
    var /= out.size() - 1;
    const double ratio = var / sigma_sq;
    pass = pass && ratio >= 0.95 && ratio <= 1.05;
    detail += "H=" + std::to_string(horizon) + ",rho=" + Fmt(rho) +
              ": var/sigma^2=" + Fmt(ratio) + "  ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 3

double BisectionDeviation(const std::vector<double>& n, double marginal,
                          double e_rho) {
  const double lo_target = marginal - e_rho / 2;
  const double hi_target = marginal + e_rho / 2;
  auto feasible = [&](double t) {
    double lo = 0.0, hi = 0.0;
    for (double x : n) {
      lo += std::max(0.0, x - t);
      hi += x + t;
    }
    return lo <= hi_target && hi >= lo_target;
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!feasible(hi)) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

Verdict ProjectionOptimality() {
  Rng rng = MakeRng(3);
  double worst_t = 0.0;
  double worst_c = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int k = 1 + static_cast<int>(Uniform01(rng) * 6);
    std::vector<double> n(k);
    for (double& x : n) x = Uniform01(rng) < 0.2 ? 0.0 : Uniform01(rng) * 30;
    const double marginal = Uniform01(rng) * 80;
    const double e_rho = Uniform01(rng) < 0.1 ? 0.0 : Uniform01(rng) * 15;
    const ProjectedCounts p = ConsistencyProject(n, marginal, e_rho);
    worst_t = std::max(worst_t, std::fabs(p.max_deviation -
                                          BisectionDeviation(n, marginal, e_rho)));
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
      worst_c = std::max(worst_c, -p.joint[i]);
      worst_c = std::max(worst_c,
                         std::fabs(p.joint[i] - n[i]) - p.max_deviation);
      sum += p.joint[i];
    }
    worst_c = std::max(worst_c, std::fabs(sum - marginal) - e_rho / 2);
    worst_c = std::max(worst_c, std::fabs(sum - p.marginal));
  }
  return {worst_t <= 1e-6 && worst_c <= 1e-9,
          "max |t* - oracle| = " + Fmt(worst_t, 3) +
              ", max constraint violation = " + Fmt(worst_c, 3)};
}

// ---------------------------------------------------------------- 4

Verdict KernelValidity() {
  Rng rng = MakeRng(4);
  double worst_sum = 0.0;
  double worst_neg = 0.0;
  int fallback_rows = 0;
  int fallback_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int zones = 1 + static_cast<int>(Uniform01(rng) * 20);
    const int w = 1 + static_cast<int>(Uniform01(rng) * 4);
    const double e_rho = Uniform01(rng) * 20;
    StageCounts c;
    c.num_sa = 1 + static_cast<int>(Uniform01(rng) * 30);
    c.num_s = zones * w;
    c.joint.resize(static_cast<size_t>(c.num_sa) * c.num_s);
    for (double& x : c.joint) {
      x = Uniform01(rng) < 0.6 ? 0.0 : std::max(0.0, UniformRange(rng, -2, 8));
    }
    c.marginal.resize(c.num_sa);
    for (int j = 0; j < c.num_sa; ++j) {
      // Release, clip and project as the trainer does.
      std::vector<double> row(c.joint.begin() + j * c.num_s,
                              c.joint.begin() + (j + 1) * c.num_s);
      double noisy_marginal = 0.0;
      for (double x : row) noisy_marginal += x;
      noisy_marginal = std::max(0.0, noisy_marginal + UniformRange(rng, -5, 5));
      const ProjectedCounts p = ConsistencyProject(row, noisy_marginal, e_rho);
      std::copy(p.joint.begin(), p.joint.end(), c.joint.begin() + j * c.num_s);
      c.marginal[j] = p.marginal;
    }
    const StageKernel k = BuildPrivateKernel(c, e_rho);
    const double uniform = 1.0 / (zones * w);
    for (int j = 0; j < c.num_sa; ++j) {
      double sum = 0.0;
      for (double p : k.Row(j)) {
        worst_neg = std::max(worst_neg, -p);
        sum += p;
      }
      worst_sum = std::max(worst_sum, std::fabs(sum - 1.0));
      if (k.fallback[j]) {
        ++fallback_rows;
        for (double p : k.Row(j)) fallback_bad += p != uniform;
      }
    }
  }
  return {worst_sum <= 1e-9 && worst_neg <= 0.0 && fallback_bad == 0 &&
              fallback_rows > 0,
          "max |row sum - 1| = " + Fmt(worst_sum, 3) + ", " +
              std::to_string(fallback_rows) + " fallback rows, " +
              std::to_string(fallback_bad) + " entries != 1/(Mw)"};
}

// ---------------------------------------------------------------- 5

struct TestFunction {
  std::function<double(double)> g;  // of the l2 norm
  double lipschitz;
};

TestFunction RandomNormFunction(int kind, Rng& rng) {
  const double l = UniformRange(rng, 0.2, 2.0);
  const double c = UniformRange(rng, 0.2, 1.8);
  const double omega = UniformRange(rng, 1.0, 8.0);
  const double phase = UniformRange(rng, 0.0, 6.0);
  switch (kind % 4) {
    case 0:
      return {[l](double r) { return l * r; }, l};
    case 1:
      return {[l, c](double r) { return l * std::fabs(r - c); }, l};
    case 2:
      return {[l, omega, phase](double r) {
                return l / omega * std::sin(omega * r + phase);
              },
              l};
    default:
      return {[l, c](double r) { return l * std::min(r, c); }, l};
  }
}

Verdict ApproximationBound() {
  constexpr int kHorizon = 3;
  constexpr int kPoints = 10000;
  Rng rng = MakeRng(5);
  double worst_in = 0.0;   // error / bound, points Below lambda
  double worst_out = 0.0;  // error / bound, points NotBelow lambda
  int violations = 0;
  const int zone_choices[] = {10, 20, 40};
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + t % 3;
    const int w = 1 + (t / 3) % (n - 1);
    const int zones = zone_choices[t % 3 == 0 ? (t / 3) % 3 : (t + 1) % 3];
    const TestFunction f = RandomNormFunction(t, rng);
    const double c = UniformRange(rng, 0.6, 1.0);
    const Vector lambda(n, c);
    const ZoneScheme scheme = BuildZoneScheme(w, n - w, zones, 500 + t, lambda);
    const ZoneGrid& grid = scheme.state_action;
    double lambda_norm = 0.0;
    for (double x : lambda) lambda_norm += x * x;
    lambda_norm = std::sqrt(lambda_norm);

    AnchorValueTables tables;
    tables.stages.resize(kHorizon);
    for (int h = 1; h <= kHorizon; ++h) {
      StageTable& st = tables.stages[h - 1];
      const double scale = kHorizon - h + 1;
      st.lambda = lambda;
      st.q_bar.assign(grid.num_anchors(), 0.0);
      st.below.assign(grid.num_anchors(), 0);
      for (int j = 0; j < grid.num_anchors(); ++j) {
        const Vector& b = grid.anchor(j);
        st.below[j] = IsBelow(b, lambda);
        double r = 0.0;
        for (double x : b) r += x * x;
        st.q_bar[j] = scale * f.g(std::sqrt(r));
      }
      st.boundary_value = BoundaryValue(st, grid);
      for (int j = 0; j < grid.num_anchors(); ++j) {
        if (!st.below[j]) st.q_bar[j] = st.boundary_value;
      }
    }

    for (int h = 1; h <= kHorizon; ++h) {
      const double lh = (kHorizon - h + 1) * f.lipschitz;
      const double bound_in = lh * std::sqrt(n) / zones;
      const double bound_out = lh * std::fabs(n - lambda_norm);
      Vector b(n);
      for (int i = 0; i < kPoints; ++i) {
        for (double& x : b) x = Uniform01(rng) * c;
        double r = 0.0;
        for (double x : b) r += x * x;
        const double err = std::fabs(EvaluateQ(b, h, tables, scheme) -
                                     (kHorizon - h + 1) * f.g(std::sqrt(r)));
        worst_in = std::max(worst_in, err / bound_in);
        violations += err > bound_in + 1e-6;
      }
      for (int i = 0; i < kPoints; ++i) {
        do {
          for (double& x : b) x = Uniform01(rng);
        } while (IsBelow(b, lambda));
        double r = 0.0;
        for (double x : b) r += x * x;
        const double err = std::fabs(EvaluateQ(b, h, tables, scheme) -
                                     (kHorizon - h + 1) * f.g(std::sqrt(r)));
        worst_out = std::max(worst_out, err / bound_out);
        violations += err > bound_out + 1e-6;
      }
    }
  }
  return {violations == 0,
          std::to_string(violations) + " violations; max error/bound below " +
              Fmt(worst_in) + ", beyond " + Fmt(worst_out)};
}

// ---------------------------------------------------------------- 6

Verdict OracleEquivalence() {
  double worst = 0.0;
  int cases = 0;
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    for (int zones : {4, 6}) {
      const ZoneScheme scheme = BuildZoneScheme(1, 1, zones, seed);
      Dataset data(1, 1, 2);
      Rng rng = MakeRng(DeriveSeed(6, {seed, static_cast<uint64_t>(zones)}));
      for (int e = 0; e < 400; ++e) {
        std::vector<TransitionRecord> ep;
        double s = Uniform01(rng);
        for (int h = 1; h <= 2; ++h) {
          const double a = Uniform01(rng);
          const double next = std::clamp(
              0.6 * s + 0.3 * a + UniformRange(rng, -0.25, 0.25), 0.0, 1.0);
          ep.push_back(TransitionRecord::Observed(h, {s}, {a}, 0.0, {next}));
          s = next;
        }
        data.AddEpisode(std::move(ep));
      }
      auto reward = [](int h, std::span<const double> b,
                       std::span<const double> sn) {
        return 0.1 + 0.4 * b[0] * (1.0 - b[1]) + 0.3 * b[1] * sn[0] + 0.05 * h;
      };
      PoolConfig config;
      config.zero_penalty = true;
      config.grid_points = 0;
      config.refine_iterations = 0;
      const std::vector<Vector> bounds(2, Vector{1.0, 1.0});
      const CountTables counts =
          TabulatePrivateCounts(data, scheme, bounds, 0.0, 0.0, seed);
      const AnchorValueTables t =
          BackwardInduction(counts, 0.0, scheme, config, bounds, reward);
      const testing::OracleTables ref = testing::AnchorDynamicProgram(
          data, scheme, {1.0, 1.0},
          [&](int h, const Vector& b, const Vector& sn) {
            return reward(h, b, sn);
          });
      for (int h = 0; h < 2; ++h) {
        for (size_t j = 0; j < ref.q[h].size(); ++j) {
          worst = std::max(worst, std::fabs(t.stages[h].q_bar[j] - ref.q[h][j]));
        }
        for (size_t k = 0; k < ref.v[h].size(); ++k) {
          worst = std::max(worst,
                           std::fabs(t.stages[h].v_tilde[k] - ref.v[h][k]));
        }
      }
      ++cases;
    }
  }
  return {worst <= 1e-8, std::to_string(cases) +
                             " anchor MDPs; max |POOL - exact DP| = " +
                             Fmt(worst, 3)};
}

// ---------------------------------------------------------------- 7

// s_1 = 0, s' ~ U[0,1] regardless of (s, a), r = |(s, a)| / sqrt(2).
// v* = (1 + E sqrt(1 + U^2)) / sqrt(2), with E sqrt(1 + U^2) =
// (sqrt(2) + asinh(1)) / 2.
double NormRewardOptimum() {
  return (1.0 + (std::sqrt(2.0) + std::asinh(1.0)) / 2.0) / std::sqrt(2.0);
}

Verdict PessimismCoverage() {
  constexpr int kRuns = 100;
  constexpr int kZones = 20;
  constexpr int kEpisodes = 100000;
  const double v_star = NormRewardOptimum();
  const double lipschitz_1 = 2.0 / std::sqrt(2.0);  // H * L
  const double slack = lipschitz_1 * std::sqrt(2.0) / kZones;
  auto reward = [](int, std::span<const double> b, std::span<const double>) {
    return std::hypot(b[0], b[1]) / std::sqrt(2.0);
  };
  const std::vector<Vector> bounds(2, Vector{1.0, 1.0});
  int covered = 0;
  int covered_tuned = 0;
  double worst_excess = -1e300;
  for (int run = 0; run < kRuns; ++run) {
    auto scheme = std::make_shared<const ZoneScheme>(
        BuildZoneScheme(1, 1, kZones, DeriveSeed(7, {1, static_cast<uint64_t>(run)})));
    Dataset data(1, 1, 2);
    Rng rng = MakeRng(DeriveSeed(7, {2, static_cast<uint64_t>(run)}));
    for (int e = 0; e < kEpisodes; ++e) {
      const double a1 = Uniform01(rng);
      const double s2 = Uniform01(rng);
      const double a2 = Uniform01(rng);
      const double s3 = Uniform01(rng);
      data.AddEpisode(
          {TransitionRecord::Observed(1, {0.0}, {a1}, reward(1, Vector{0.0, a1}, {}),
                                      {s2}),
           TransitionRecord::Observed(2, {s2}, {a2}, reward(2, Vector{s2, a2}, {}),
                                      {s3})});
    }
    const uint64_t noise = DeriveSeed(7, {3, static_cast<uint64_t>(run)});
    PoolConfig config;
    const PoolRun pr =
        TrainPool(data, scheme, {10.0, 0.05}, config, bounds, reward, noise);
    const double v1 =
        GreedyAction(Vector{0.0}, 1, pr.policy.tables(), *scheme, config).value;
    covered += v1 <= v_star + slack;
    worst_excess = std::max(worst_excess, v1 - v_star);

    PoolConfig tuned;
    tuned.pessimism.c1 = 0.1;
    tuned.pessimism.c2 = 0.001;
    const PoolRun tr =
        TrainPool(data, scheme, {10.0, 0.05}, tuned, bounds, reward, noise);
    covered_tuned +=
        GreedyAction(Vector{0.0}, 1, tr.policy.tables(), *scheme, tuned).value <=
        v_star + slack;
  }
  return {covered >= 95,
          std::to_string(covered) + "/100 runs with V_1(s_1) <= v* + slack (v*=" +
              Fmt(v_star, 6) + ", slack=" + Fmt(slack) +
              ", max V_1 - v* = " + Fmt(worst_excess) +
              "); experiment constants c1=0.1,c2=0.001: " +
              std::to_string(covered_tuned) + "/100"};
}

// ---------------------------------------------------------------- 8, 9

struct Point {
  double x;
  double mean;
  double se;
};

std::vector<Point> Series(const std::vector<SummaryRow>& summary,
                          const std::string& method,
                          const std::function<double(const SummaryRow&)>& axis) {
  std::vector<Point> out;
  for (const SummaryRow& r : summary) {
    if (r.method != method) continue;
    out.push_back({axis(r), r.mean_gap, r.sd_gap / std::sqrt(r.count)});
  }
  std::sort(out.begin(), out.end(),
            [](const Point& a, const Point& b) { return a.x < b.x; });
  return out;
}

// direction +1: non-decreasing, -1: non-increasing. At most one adjacent
// step may go the wrong way, and only by at most one standard error (the
// larger of the two points' standard errors).
bool MonotoneWithTolerance(const std::vector<Point>& s, int direction,
                           std::string* why) {
  int inversions = 0;
  bool ok = true;
  for (size_t i = 0; i + 1 < s.size(); ++i) {
    const double step = direction * (s[i + 1].mean - s[i].mean);
    if (step >= 0.0) continue;
    ++inversions;
    const double se = std::max(s[i].se, s[i + 1].se);
    if (-step > se) {
      ok = false;
      *why += " step " + Fmt(s[i].x) + "->" + Fmt(s[i + 1].x) + " moves " +
              Fmt(-step) + " > SE " + Fmt(se) + ";";
    }
  }
  if (inversions > 1) {
    ok = false;
    *why += " " + std::to_string(inversions) + " inversions;";
  }
  return ok;
}

std::string Describe(const std::vector<Point>& s) {
  std::string out;
  for (const Point& p : s) {
    out += Fmt(p.x) + ":" + Fmt(p.mean) + "±" + Fmt(p.se, 2) + " ";
  }
  return out;
}

std::vector<SummaryRow> RunSweep(const std::string& name,
                                 const std::vector<std::string>& methods) {
  ExperimentConfig config =
      LoadConfigFile(std::string(POOL_SOURCE_DIR) + "/configs/" + name + ".conf");
  config.methods = methods;
  ValidateConfig(config);
  const std::vector<ResultRow> rows = RunExperiment(config);
  std::ofstream csv("acceptance_" + name + ".csv");
  WriteResultsCsv(rows, csv);
  for (const ResultRow& r : rows) {
    if (!r.ok) throw std::runtime_error(name + ": a run failed");
  }
  return Summarize(rows);
}

Verdict PrivacyTrend() {
  const std::vector<SummaryRow> summary =
      RunSweep("rho_sweep", {"pool", "ip", "op"});
  auto by_rho = [](const SummaryRow& r) { return r.rho; };
  const std::vector<Point> pool = Series(summary, "pool", by_rho);
  const std::vector<Point> ip = Series(summary, "ip", by_rho);
  const std::vector<Point> op = Series(summary, "op", by_rho);
  bool dominates = pool.size() == ip.size() && pool.size() == op.size();
  std::string why;
  for (size_t i = 0; dominates && i < pool.size(); ++i) {
    if (!(pool[i].mean < ip[i].mean && pool[i].mean < op[i].mean)) {
      dominates = false;
      why += " POOL not best at rho=" + Fmt(pool[i].x) + ";";
    }
  }
  const bool endpoints = pool.back().mean <= pool.front().mean;
  if (!endpoints) why += " gap at largest rho exceeds gap at smallest;";
  const bool trend = MonotoneWithTolerance(pool, -1, &why);
  return {dominates && endpoints && trend,
          "POOL " + Describe(pool) + "| IP " + Describe(ip) + "| OP " +
              Describe(op) + (why.empty() ? "" : "|" + why)};
}

Verdict SweepTrends() {
  struct Axis {
    std::string name;
    int direction;
    std::function<double(const SummaryRow&)> key;
  };
  const std::vector<Axis> axes = {
      {"M_sweep", -1, [](const SummaryRow& r) { return 1.0 * r.zones; }},
      {"H_sweep", +1, [](const SummaryRow& r) { return 1.0 * r.horizon; }},
      {"dims_sweep", +1, [](const SummaryRow& r) { return 1.0 * r.dims; }},
      {"lambda_sweep", -1, [](const SummaryRow& r) { return r.lambda; }},
  };
  bool pass = true;
  std::string detail;
  for (const Axis& axis : axes) {
    const std::vector<Point> s =
        Series(RunSweep(axis.name, {"pool"}), "pool", axis.key);
    std::string why;
    const bool ok = MonotoneWithTolerance(s, axis.direction, &why);
    pass = pass && ok;
    detail += axis.name + (ok ? " ok " : " FAIL ") + Describe(s) + why + " | ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------- 10

Verdict NewsvendorSanity() {
  const ExperimentConfig base;
  const double step = base.demand_bound / (kSaaGridPoints - 1);
  double worst = 0.0;
  int checks = 0;
  int misses = 0;
  double sq_off = 0.0;
  double sq_sd = 0.0;
  for (uint64_t k = 0; k < 5; ++k) {
    const InventoryParams params = MakeInventoryParams(
        1, base.horizon, base.demand_bound, base.holding_seed + 100 * k,
        base.backorder_seed + 100 * k, DemandModel::Uniform());
    const std::vector<Vector> levels =
        SaaLevels(params, base.saa_samples, DeriveSeed(10, {k}));
    for (int h = 0; h < base.horizon; ++h) {
      const double hc = params.holding[h][0];
      const double bc = params.backorder[h][0];
      const double target = base.demand_bound * bc / (bc + hc);
      const double off = std::fabs(levels[h][0] - target) / step;
      const double frac = bc / (bc + hc);
      // Standard deviation of the empirical quantile, in grid steps.
      sq_sd += frac * (1.0 - frac) / base.saa_samples *
               base.demand_bound * base.demand_bound / (step * step);
      sq_off += off * off;
      worst = std::max(worst, off);
      misses += off > 2.0;
      ++checks;
    }
  }
  return {misses == 0, std::to_string(checks - misses) + "/" +
                           std::to_string(checks) +
                           " stage levels within 2 grid steps; worst " +
                           Fmt(worst, 3) + " steps; rms " +
                           Fmt(std::sqrt(sq_off / checks), 3) +
                           " vs quantile sd " +
                           Fmt(std::sqrt(sq_sd / checks), 3)};
}

// ---------------------------------------------------------------- 11

std::string Sha256Hex(const std::string& bytes) {
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
         digest);
  std::ostringstream out;
  for (unsigned char c : digest) {
    out << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(c);
  }
  return out.str();
}

Verdict Determinism() {
  ExperimentConfig config = LoadConfigFile(std::string(POOL_SOURCE_DIR) +
                                           "/configs/rho_sweep.conf");
  config.seeds = 2;
  config.episodes = 2000;
  config.eval_episodes = 1000;
  config.saa_samples = 2000;
  std::vector<std::string> hashes;
  for (int threads : {1, 2, 1}) {
    config.threads = threads;
    std::ostringstream csv;
    WriteResultsCsv(RunExperiment(config), csv);
    hashes.push_back(Sha256Hex(csv.str()));
  }
  const bool same = hashes[0] == hashes[1] && hashes[1] == hashes[2];
  return {same, "sha256 " + hashes[0].substr(0, 16) + " / " +
                    hashes[1].substr(0, 16) + " / " + hashes[2].substr(0, 16) +
                    " (threads 1, 2, 1)"};
}

}  // namespace
}  // namespace pool

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  using Clock = std::chrono::steady_clock;
  struct Criterion {
    int id;
    const char* name;
    pool::Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "privacy accounting", pool::PrivacyAccounting},
      {2, "noise calibration", pool::NoiseCalibration},
      {3, "consistency projection optimality", pool::ProjectionOptimality},
      {4, "kernel validity", pool::KernelValidity},
      {5, "interpolation error bound", pool::ApproximationBound},
      {6, "oracle equivalence", pool::OracleEquivalence},
      {7, "pessimism coverage", pool::PessimismCoverage},
      {8, "privacy budget trend", pool::PrivacyTrend},
      {9, "sweep trends", pool::SweepTrends},
      {10, "newsvendor sanity", pool::NewsvendorSanity},
      {11, "determinism", pool::Determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failed = 0;
  int ran = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    ++ran;
    const auto start = Clock::now();
    pool::Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(Clock::now() - start).count();
    failed += !v.pass;
    std::printf("criterion %2d %-34s %s  [%.1fs]  %s\n", c.id, c.name,
                v.pass ? "PASS" : "FAIL", secs, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
