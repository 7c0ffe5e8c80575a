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

// Gaussian mechanism for count release, zCDP budget accounting, the uniform
// noise bound used as a low-count threshold, and the post-processing step
// that makes noisy joint counts consistent with a noisy marginal.

#ifndef POOL_PRIVACY_H_
#define POOL_PRIVACY_H_

#include <span>
#include <string>
#include <vector>

#include "pool/rng.h"

namespace pool {

struct PrivacyBudget {
  double rho;
  double delta;
};

void ValidateBudget(const PrivacyBudget& budget);

// sigma^2 = 2H / rho for the count releases.
double CountNoiseScale(int horizon, double rho);

// max(v + N(0, sigma_sq), 0) entrywise.
std::vector<double> GaussianPerturb(std::span<const double> values,
                                    double sigma_sq, Rng& rng);

// 4 * sqrt(H * log(4 H M^2 w (w+d) / delta) / rho).
double UniformNoiseBound(int horizon, int zones, int state_dim,
                         int action_dim, double delta, double rho);

double ComposeBudgets(double rho_1, double rho_2);

// epsilon = rho + 2 sqrt(rho log(1/delta)).
double ZcdpToDp(double rho, double delta);

struct ProjectedCounts {
  std::vector<double> joint;
  double marginal = 0.0;       // always the sum of joint
  double max_deviation = 0.0;  // t* = max_i |joint_i - joint_noisy_i|
};

// Solves
//   min_x max_i |x_i - n'_i|  s.t.  |sum(x) - marginal_noisy| <= e_rho / 2,
//                                   x >= 0.
// The optimal t* is found in closed form from the sorted breakpoints. Among
// optimal points the one returned shifts every cell by a common signed
// amount toward the nearest feasible sum, clipped to [max(0, n'-t*), n'+t*].
ProjectedCounts ConsistencyProject(std::span<const double> joint_noisy,
                                   double marginal_noisy, double e_rho);

// Records each mechanism invocation; downstream post-processing is free.
class PrivacyAccountant {
 public:
  struct Charge {
    std::string label;
    double rho;
  };

  void Spend(std::string label, double rho);
  double TotalRho() const;
  double Epsilon(double delta) const { return ZcdpToDp(TotalRho(), delta); }
  const std::vector<Charge>& charges() const { return charges_; }

 private:
  std::vector<Charge> charges_;
};

}  // namespace pool

#endif  // POOL_PRIVACY_H_
