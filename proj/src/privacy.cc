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
#include <functional>
#include <numeric>
#include <stdexcept>

namespace pool {

void ValidateBudget(const PrivacyBudget& budget) {
  if (!(budget.rho > 0.0)) throw std::invalid_argument("rho must be > 0");
  if (!(budget.delta > 0.0 && budget.delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
}

double CountNoiseScale(int horizon, double rho) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be > 0");
  return 2.0 * horizon / rho;
}

std::vector<double> GaussianPerturb(std::span<const double> values,
                                    double sigma_sq, Rng& rng) {
  if (!(sigma_sq >= 0.0)) throw std::invalid_argument("sigma_sq must be >= 0");
  const double sigma = std::sqrt(sigma_sq);
  std::vector<double> out(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    const double z = StandardNormal(rng);
    out[i] = std::max(values[i] + sigma * z, 0.0);
  }
  return out;
}

double UniformNoiseBound(int horizon, int zones, int state_dim,
                         int action_dim, double delta, double rho) {
  if (horizon < 1 || zones < 1 || state_dim < 1 || action_dim < 1) {
    throw std::invalid_argument("UniformNoiseBound: sizes must be >= 1");
  }
  ValidateBudget({rho, delta});
  const double m = zones;
  const double arg = 4.0 * horizon * m * m * state_dim *
                     (state_dim + action_dim) / delta;
  return 4.0 * std::sqrt(horizon * std::log(arg) / rho);
}

double ComposeBudgets(double rho_1, double rho_2) {
  if (rho_1 < 0.0 || rho_2 < 0.0) {
    throw std::invalid_argument("budgets must be >= 0");
  }
  return rho_1 + rho_2;
}

double ZcdpToDp(double rho, double delta) {
  ValidateBudget({rho, delta});
  return rho + 2.0 * std::sqrt(rho * std::log(1.0 / delta));
}

ProjectedCounts ConsistencyProject(std::span<const double> joint_noisy,
                                   double marginal_noisy, double e_rho) {
  if (joint_noisy.empty()) {
    throw std::invalid_argument("ConsistencyProject: no cells");
  }
  if (!(e_rho >= 0.0)) throw std::invalid_argument("e_rho must be >= 0");
  for (double v : joint_noisy) {
    if (!(v >= 0.0)) {
      throw std::invalid_argument("ConsistencyProject: joint must be >= 0");
    }
  }
  const double lo = marginal_noisy - e_rho / 2.0;
  const double hi = marginal_noisy + e_rho / 2.0;
  if (hi < 0.0) {
    throw std::invalid_argument(
        "ConsistencyProject: no nonnegative point meets the marginal");
  }

  const size_t k = joint_noisy.size();
  const double sum = std::accumulate(joint_noisy.begin(), joint_noisy.end(), 0.0);
  ProjectedCounts out;
  out.joint.assign(joint_noisy.begin(), joint_noisy.end());

  if (sum < lo) {
    // Raising cells is never blocked, so every cell moves up by the same t.
    const double t = (lo - sum) / k;
    for (double& x : out.joint) x += t;
    out.max_deviation = t;
  } else if (sum > hi) {
    // Lowering is blocked at zero: sum_i max(0, n_i - t) is piecewise linear
    // and decreasing; walk the sorted breakpoints to hit `hi`.
    std::vector<double> sorted(joint_noisy.begin(), joint_noisy.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double prefix = 0.0;
    double t = sorted[0];
    for (size_t j = 0; j < k; ++j) {
      prefix += sorted[j];
      const double next = j + 1 < k ? sorted[j + 1] : 0.0;
      const double candidate = (prefix - hi) / static_cast<double>(j + 1);
      if (candidate >= next) {
        t = candidate;
        break;
      }
    }
    for (double& x : out.joint) x = std::max(0.0, x - t);
    out.max_deviation = t;
  }
  out.marginal = std::accumulate(out.joint.begin(), out.joint.end(), 0.0);
  return out;
}

void PrivacyAccountant::Spend(std::string label, double rho) {
  if (rho < 0.0) throw std::invalid_argument("cannot spend a negative budget");
  charges_.push_back({std::move(label), rho});
}

double PrivacyAccountant::TotalRho() const {
  double total = 0.0;
  for (const Charge& c : charges_) total = ComposeBudgets(total, c.rho);
  return total;
}

}  // namespace pool
