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

// l2-norm zone partition of [0,1]^n, per-zone anchor bases, and the
// coefficients used to interpolate values stored at anchors.

#ifndef POOL_DISCRETIZATION_H_
#define POOL_DISCRETIZATION_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pool/mdp_core.h"

namespace pool {

class EmptyZoneError : public std::runtime_error {
 public:
  explicit EmptyZoneError(int zone);
  int zone() const { return zone_; }

 private:
  int zone_;
};

class SamplingExhaustedError : public std::runtime_error {
 public:
  explicit SamplingExhaustedError(int zone);
};

// Number of candidate draws allowed per zone before giving up.
inline constexpr int kAnchorRetryCap = 100000;

// Minimum residual norm of a normalised candidate after projecting out the
// anchors accepted so far.
inline constexpr double kRankTolerance = 1e-6;

// Shell m covers n(m-1)/M <= |b| < nm/M.
double ZoneLowerEdge(int zone, int zones, int dim);
double ZoneUpperEdge(int zone, int zones, int dim);

// 1-based zone of b. Norms at or past the last edge map to zone M.
int ZoneOf(std::span<const double> b, int zones);

// False when the shell does not reach into the cube far enough to hold
// `dim` independent points.
bool ZoneIntersectsCube(int zone, int zones, int dim);

struct GramSchmidtResult {
  std::vector<Vector> ortho;
  // Upper triangular, row-major: input_j = sum_i r[i*n + j] * ortho_i.
  std::vector<double> r;
};

// Modified Gram-Schmidt with one re-orthogonalisation pass. Throws
// std::invalid_argument on (numerically) dependent input.
GramSchmidtResult GramSchmidt(const std::vector<Vector>& vectors);

struct ZoneBasis {
  int zone = 0;
  std::vector<Vector> anchors;
  std::vector<Vector> ortho;
  // Row-major n x n inverse of the anchor matrix, computed as R^{-1} Q^T.
  std::vector<double> inverse;
};

ZoneBasis BasisFromAnchors(int zone, std::vector<Vector> anchors);

// Samples `dim` independent anchors on the sphere of radius
// (lo + min(hi, |u|)) / 2 intersected with the box [0, u), where u is
// `upper` or the all-ones vector when `upper` is empty. Throws
// EmptyZoneError when the shell starts at or past |u|.
ZoneBasis BuildBasis(int zone, int zones, int dim, uint64_t seed,
                     std::span<const double> upper = {});

// Coefficients m with sum_j m_j anchors_j = b.
Vector ProjectCoefficients(std::span<const double> b, const ZoneBasis& basis);

// Convex weights derived from the projection coefficients: negative parts
// are dropped and the rest renormalised; uniform if nothing is left.
Vector InterpolationWeights(std::span<const double> b, const ZoneBasis& basis);

// Index of the Euclidean-nearest anchor; lowest index wins ties.
int NearestAnchor(std::span<const double> b, const std::vector<Vector>& anchors);

struct AnchorWeight {
  int index;  // global anchor index
  double weight;
};

// All usable zones of one space, with anchors numbered zone-major.
class ZoneGrid {
 public:
  // Anchors are sampled inside [0, upper); empty means the unit cube.
  ZoneGrid(int dim, int zones, uint64_t seed,
           std::span<const double> upper = {});
  // Hand-built grid; zones missing from `bases` are treated as empty.
  ZoneGrid(int dim, int zones, std::map<int, ZoneBasis> bases);

  int dim() const { return dim_; }
  int zones() const { return zones_; }
  bool usable(int zone) const;
  const ZoneBasis& basis(int zone) const;

  int num_anchors() const { return static_cast<int>(anchors_.size()); }
  const std::vector<Vector>& anchors() const { return anchors_; }
  const Vector& anchor(int index) const { return anchors_[index]; }
  int first_anchor(int zone) const { return first_anchor_[zone - 1]; }
  int anchor_zone(int index) const { return anchor_zone_[index]; }

  // Zone of b, or the nearest usable zone below it.
  int UsableZoneFor(std::span<const double> b) const;
  int Nearest(std::span<const double> b) const;
  std::vector<AnchorWeight> Weights(std::span<const double> b) const;
  // Allocation-free form of Weights; `out` must hold dim() entries.
  void WeightsInto(std::span<const double> b, std::span<AnchorWeight> out) const;
  // Projection coefficients of b in zone `zone`, against global indices.
  std::vector<AnchorWeight> Coefficients(std::span<const double> b,
                                         int zone) const;

 private:
  void Index();

  int dim_;
  int zones_;
  std::vector<std::optional<ZoneBasis>> bases_;
  std::vector<Vector> anchors_;
  std::vector<int> first_anchor_;
  std::vector<int> anchor_zone_;
};

// State-action grid over [0,1]^(w+d) and state grid over [0,1]^w.
struct ZoneScheme {
  int state_dim;
  int action_dim;
  int zones;
  ZoneGrid state_action;
  ZoneGrid state;
};

// `upper` bounds the state-action anchors, normally the observable
// boundary; the state grid always covers the unit cube.
ZoneScheme BuildZoneScheme(int state_dim, int action_dim, int zones,
                           uint64_t seed, std::span<const double> upper = {});

// zone,anchor_index,coord_0..coord_{n-1}
void WriteBasisCsv(const ZoneGrid& grid, std::ostream& out);

}  // namespace pool

#endif  // POOL_DISCRETIZATION_H_
