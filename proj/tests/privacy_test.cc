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


#include "pool/privacy.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

namespace pool {
namespace {

TEST(CountNoiseScaleTest, Examples) {
  EXPECT_DOUBLE_EQ(CountNoiseScale(10, 5.0), 4.0);
  EXPECT_DOUBLE_EQ(CountNoiseScale(1, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(CountNoiseScale(7, 0.1), 140.0);
  EXPECT_THROW(CountNoiseScale(7, 0.0), std::invalid_argument);
  EXPECT_THROW(CountNoiseScale(7, -1.0), std::invalid_argument);
}

TEST(GaussianPerturbTest, ZeroNoiseIsIdentity) {
  Rng rng = MakeRng(1);
  const std::vector<double> v = {3.0, 0.0, 5.0};
  EXPECT_EQ(GaussianPerturb(v, 0.0, rng), v);
}

TEST(GaussianPerturbTest, ClipsAtZero) {
  Rng rng = MakeRng(2);
  const std::vector<double> zeros(1000, 0.0);
  for (double x : GaussianPerturb(zeros, 1.0, rng)) EXPECT_GE(x, 0.0);
}

TEST(GaussianPerturbTest, NegativeScaleThrows) {
  Rng rng = MakeRng(3);
  EXPECT_THROW(GaussianPerturb(std::vector<double>{1.0}, -1.0, rng),
               std::invalid_argument);
}

TEST(GaussianPerturbTest, VarianceMatchesScale) {
  Rng rng = MakeRng(4);
  const double sigma_sq = CountNoiseScale(7, 10.0);
  const std::vector<double> v(100000, 1000.0);
  const std::vector<double> out = GaussianPerturb(v, sigma_sq, rng);
  double mean = 0.0;
  for (double x : out) mean += x - 1000.0;
  mean /= out.size();
  double var = 0.0;
  for (double x : out) var += (x - 1000.0 - mean) * (x - 1000.0 - mean);
  var /= out.size() - 1;
  EXPECT_GT(var, 0.97 * sigma_sq);
  EXPECT_LT(var, 1.03 * sigma_sq);
  EXPECT_LT(std::abs(mean), 0.05);
}

long double NoiseBoundOracle(long double h, long double m, long double w,
                             long double d, long double delta,
                             long double rho) {
  return 4.0L * std::sqrt(h * std::log(4.0L * h * m * m * w * (w + d) / delta) /
                          rho);
}

TEST(UniformNoiseBoundTest, Examples) {
  const double e = UniformNoiseBound(7, 100, 1, 1, 0.05, 10.0);
  EXPECT_NEAR(e, 13.48, 0.005);
  EXPECT_NEAR(e, static_cast<double>(NoiseBoundOracle(7, 100, 1, 1, 0.05, 10)),
              1e-12);
  EXPECT_NEAR(UniformNoiseBound(1, 1, 1, 1, 0.5, 1.0),
              4.0 * std::sqrt(std::log(16.0)), 1e-12);
  EXPECT_NEAR(UniformNoiseBound(1, 1, 1, 1, 0.5, 1.0), 6.66, 0.005);
}

TEST(UniformNoiseBoundTest, QuadrupledBudgetHalvesBound) {
  for (double rho : {0.1, 1.0, 5.0, 40.0}) {
    EXPECT_NEAR(UniformNoiseBound(7, 100, 2, 2, 0.05, 4.0 * rho),
                0.5 * UniformNoiseBound(7, 100, 2, 2, 0.05, rho), 1e-12);
  }
}

TEST(UniformNoiseBoundTest, InvalidArgumentsThrow) {
  EXPECT_THROW(UniformNoiseBound(7, 100, 1, 1, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(UniformNoiseBound(7, 100, 1, 1, 1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(UniformNoiseBound(7, 100, 1, 1, 0.05, 0.0),
               std::invalid_argument);
}

TEST(ComposeBudgetsTest, Examples) {
  EXPECT_EQ(ComposeBudgets(2.5, 2.5), 5.0);
  EXPECT_EQ(ComposeBudgets(0.0, 3.0), 3.0);
  EXPECT_DOUBLE_EQ(ComposeBudgets(0.3, 0.7), 1.0);
}

TEST(ComposeBudgetsTest, AssociativeAndCommutative) {
  // Dyadic budgets keep the sums exact.
  Rng rng = MakeRng(5);
  for (int i = 0; i < 1000; ++i) {
    const double a = std::floor(Uniform01(rng) * 4096) / 1024;
    const double b = std::floor(Uniform01(rng) * 4096) / 1024;
    const double c = std::floor(Uniform01(rng) * 4096) / 1024;
    EXPECT_EQ(ComposeBudgets(a, b), ComposeBudgets(b, a));
    EXPECT_EQ(ComposeBudgets(ComposeBudgets(a, b), c),
              ComposeBudgets(a, ComposeBudgets(b, c)));
  }
}

TEST(ZcdpToDpTest, Examples) {
  const long double ref = 1.0L + 2.0L * std::sqrt(std::log(1.0e5L));
  EXPECT_NEAR(ZcdpToDp(1.0, 1e-5), static_cast<double>(ref), 1e-12);
  EXPECT_NEAR(ZcdpToDp(1.0, 1e-5), 7.786, 0.0005);
  EXPECT_NEAR(ZcdpToDp(0.5, 0.01), 0.5 + 2.0 * std::sqrt(0.5 * std::log(100.0)),
              1e-12);
  EXPECT_NEAR(ZcdpToDp(0.5, 0.01), 3.535, 0.0005);
  EXPECT_NEAR(ZcdpToDp(2.0, std::nextafter(1.0, 0.0)), 2.0, 1e-6);
}

TEST(ZcdpToDpTest, MonotoneInRho) {
  double prev = 0.0;
  for (double rho = 0.1; rho < 50.0; rho *= 1.5) {
    const double eps = ZcdpToDp(rho, 0.05);
    EXPECT_GT(eps, prev);
    prev = eps;
  }
}

TEST(PrivacyAccountantTest, TwoHalfReleasesSumToBudget) {
  PrivacyAccountant acct;
  acct.Spend("marginal counts", 2.5);
  acct.Spend("joint counts", 2.5);
  EXPECT_EQ(acct.TotalRho(), 5.0);
  EXPECT_EQ(acct.charges().size(), 2u);
  EXPECT_DOUBLE_EQ(acct.Epsilon(0.05), ZcdpToDp(5.0, 0.05));
}

TEST(ConsistencyProjectTest, Examples) {
  ProjectedCounts a = ConsistencyProject(std::vector<double>{2, 2}, 4.5, 2.0);
  EXPECT_EQ(a.max_deviation, 0.0);
  EXPECT_EQ(a.joint, (std::vector<double>{2, 2}));
  EXPECT_EQ(a.marginal, 4.0);

  ProjectedCounts b = ConsistencyProject(std::vector<double>{2, 2}, 10.0, 2.0);
  EXPECT_NEAR(b.max_deviation, 2.5, 1e-12);
  EXPECT_NEAR(b.joint[0], 4.5, 1e-12);
  EXPECT_NEAR(b.joint[1], 4.5, 1e-12);

  ProjectedCounts c = ConsistencyProject(std::vector<double>{0}, 0.0, 0.0);
  EXPECT_EQ(c.joint, std::vector<double>{0});
  EXPECT_EQ(c.max_deviation, 0.0);
}

TEST(ConsistencyProjectTest, RejectsInvalidInput) {
  EXPECT_THROW(ConsistencyProject(std::vector<double>{1, 2}, 1.0, -1.0),
               std::invalid_argument);
  EXPECT_THROW(ConsistencyProject(std::vector<double>{-1, 2}, 1.0, 1.0),
               std::invalid_argument);
  EXPECT_THROW(ConsistencyProject(std::vector<double>{1, 2}, -3.0, 1.0),
               std::invalid_argument);
}

// Bisection on the deviation t: feasible iff the achievable sum interval
// [sum max(0, n - t), sum (n + t)] meets [marginal - e/2, marginal + e/2].
double BisectionOracle(const std::vector<double>& n, double marginal,
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
  double lo = 0.0;
  double hi = 1.0;
  while (!feasible(hi)) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

TEST(ConsistencyProjectTest, MatchesBisectionOracle) {
  Rng rng = MakeRng(6);
  for (int trial = 0; trial < 2000; ++trial) {
    const int k = 1 + static_cast<int>(Uniform01(rng) * 6);
    std::vector<double> n(k);
    for (double& x : n) x = Uniform01(rng) < 0.2 ? 0.0 : Uniform01(rng) * 20;
    const double marginal = UniformRange(rng, 0.0, 60.0);
    const double e_rho = Uniform01(rng) < 0.1 ? 0.0 : Uniform01(rng) * 10;
    const ProjectedCounts p = ConsistencyProject(n, marginal, e_rho);
    const double t_ref = BisectionOracle(n, marginal, e_rho);
    EXPECT_NEAR(p.max_deviation, t_ref, 1e-6);
    double sum = 0.0;
    double dev = 0.0;
    for (int i = 0; i < k; ++i) {
      EXPECT_GE(p.joint[i], 0.0);
      sum += p.joint[i];
      dev = std::max(dev, std::abs(p.joint[i] - n[i]));
    }
    EXPECT_LE(dev, p.max_deviation + 1e-9);
    EXPECT_EQ(p.marginal, sum);
    EXPECT_LE(std::abs(sum - marginal), e_rho / 2 + 1e-9);
  }
}

}  // namespace
}  // namespace pool
