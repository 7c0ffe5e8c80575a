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

#include "pool/discretization.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "pool/csv.h"
#include "pool/rng.h"

namespace pool {
namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

// Removes the components of v along each (unit) vector in `ortho`, twice.
void Orthogonalize(Vector& v, const std::vector<Vector>& ortho,
                   std::vector<double>* coeffs) {
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t i = 0; i < ortho.size(); ++i) {
      const double c = Dot(v, ortho[i]);
      for (size_t k = 0; k < v.size(); ++k) v[k] -= c * ortho[i][k];
      if (coeffs != nullptr) (*coeffs)[i] += c;
    }
  }
}

// Draws one point on the sphere |x| = radius inside the box [0, upper), or
// nothing.
std::optional<Vector> SampleOnSphere(double radius, const Vector& upper,
                                     Rng& rng) {
  const int dim = static_cast<int>(upper.size());
  Vector u(dim);
  double norm = 0.0;
  while (norm < 1e-12) {
    for (double& x : u) x = std::fabs(StandardNormal(rng));
    norm = Norm(u);
  }
  for (double& x : u) x /= norm;

  Vector x(dim);
  bool inside = true;
  for (int i = 0; i < dim; ++i) {
    x[i] = radius * u[i];
    if (!(x[i] < upper[i])) inside = false;
  }
  if (inside) return x;

  // Walk in from the far corner along -u until the norm drops to radius.
  const double along = Dot(upper, u);
  const double disc = along * along - (Dot(upper, upper) - radius * radius);
  if (disc < 0.0) return std::nullopt;
  const double s = along - std::sqrt(disc);
  for (int i = 0; i < dim; ++i) {
    x[i] = upper[i] - s * u[i];
    if (x[i] < 0.0 || !(x[i] < upper[i])) return std::nullopt;
  }
  return x;
}

Vector BoxOrCube(std::span<const double> upper, int dim) {
  if (upper.empty()) return Vector(dim, 1.0);
  if (static_cast<int>(upper.size()) != dim) {
    throw std::invalid_argument("sampling box dimension mismatch");
  }
  for (double v : upper) {
    if (!(v > 0.0 && v <= 1.0)) {
      throw std::invalid_argument("sampling box must lie in (0, 1]");
    }
  }
  return Vector(upper.begin(), upper.end());
}

}  // namespace

EmptyZoneError::EmptyZoneError(int zone)
    : std::runtime_error("zone " + std::to_string(zone) +
                         " does not intersect the sampling box"),
      zone_(zone) {}

SamplingExhaustedError::SamplingExhaustedError(int zone)
    : std::runtime_error("anchor sampling exhausted in zone " +
                         std::to_string(zone)) {}

double ZoneLowerEdge(int zone, int zones, int dim) {
  return static_cast<double>(dim) * (zone - 1) / zones;
}

double ZoneUpperEdge(int zone, int zones, int dim) {
  return static_cast<double>(dim) * zone / zones;
}

int ZoneOf(std::span<const double> b, int zones) {
  if (zones < 1) throw std::invalid_argument("zones must be >= 1");
  const int n = static_cast<int>(b.size());
  if (n < 1) throw std::invalid_argument("ZoneOf: empty vector");
  const double norm = Norm(b);
  int m = static_cast<int>(std::floor(norm * zones / n)) + 1;
  m = std::clamp(m, 1, zones);
  // The floor can be off by one at shell edges; settle on the exact test.
  while (m > 1 && norm < ZoneLowerEdge(m, zones, n)) --m;
  while (m < zones && norm >= ZoneUpperEdge(m, zones, n)) ++m;
  return m;
}

bool ZoneIntersectsCube(int zone, int zones, int dim) {
  if (zone < 1 || zone > zones) return false;
  if (dim == 1) return true;
  return ZoneLowerEdge(zone, zones, dim) < std::sqrt(static_cast<double>(dim));
}

GramSchmidtResult GramSchmidt(const std::vector<Vector>& vectors) {
  const size_t n = vectors.size();
  GramSchmidtResult out;
  out.r.assign(n * n, 0.0);
  for (size_t j = 0; j < n; ++j) {
    Vector v = vectors[j];
    const double scale = Norm(v);
    std::vector<double> coeffs(out.ortho.size(), 0.0);
    Orthogonalize(v, out.ortho, &coeffs);
    const double residual = Norm(v);
    if (!(scale > 0.0) || residual <= 1e-12 * scale) {
      throw std::invalid_argument("GramSchmidt: vectors are dependent");
    }
    for (size_t i = 0; i < coeffs.size(); ++i) out.r[i * n + j] = coeffs[i];
    out.r[j * n + j] = residual;
    for (double& x : v) x /= residual;
    out.ortho.push_back(std::move(v));
  }
  return out;
}

ZoneBasis BasisFromAnchors(int zone, std::vector<Vector> anchors) {
  const size_t n = anchors.size();
  for (const Vector& a : anchors) {
    if (a.size() != n) {
      throw std::invalid_argument("BasisFromAnchors: need n anchors in R^n");
    }
  }
  GramSchmidtResult gs = GramSchmidt(anchors);
  // inverse = R^{-1} Q^T, where column j of Q is ortho_j.
  std::vector<double> rinv(n * n, 0.0);
  for (size_t c = 0; c < n; ++c) {
    for (size_t i = n; i-- > 0;) {
      double s = (i == c) ? 1.0 : 0.0;
      for (size_t k = i + 1; k < n; ++k) s -= gs.r[i * n + k] * rinv[k * n + c];
      rinv[i * n + c] = s / gs.r[i * n + i];
    }
  }
  ZoneBasis basis;
  basis.zone = zone;
  basis.inverse.assign(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (size_t k = 0; k < n; ++k) s += rinv[i * n + k] * gs.ortho[k][j];
      basis.inverse[i * n + j] = s;
    }
  }
  basis.anchors = std::move(anchors);
  basis.ortho = std::move(gs.ortho);
  return basis;
}

ZoneBasis BuildBasis(int zone, int zones, int dim, uint64_t seed,
                     std::span<const double> upper) {
  if (dim < 1) throw std::invalid_argument("BuildBasis: dim must be >= 1");
  const Vector box = BoxOrCube(upper, dim);
  const double reach = Norm(box);
  if (zone < 1 || zone > zones ||
      (dim > 1 && !(ZoneLowerEdge(zone, zones, dim) < reach))) {
    throw EmptyZoneError(zone);
  }
  const double lo = ZoneLowerEdge(zone, zones, dim);
  const double hi = std::min(ZoneUpperEdge(zone, zones, dim), reach);
  const double radius = 0.5 * (lo + hi);

  Rng rng = MakeRng(seed);
  std::vector<Vector> anchors;
  std::vector<Vector> ortho;
  for (int attempt = 0; attempt < kAnchorRetryCap; ++attempt) {
    std::optional<Vector> x = SampleOnSphere(radius, box, rng);
    if (!x) continue;
    const double norm = Norm(*x);
    if (!(norm > 0.0)) continue;
    Vector v = *x;
    for (double& c : v) c /= norm;
    Orthogonalize(v, ortho, nullptr);
    const double residual = Norm(v);
    if (residual < kRankTolerance) continue;
    for (double& c : v) c /= residual;
    ortho.push_back(std::move(v));
    anchors.push_back(std::move(*x));
    if (static_cast<int>(anchors.size()) == dim) {
      return BasisFromAnchors(zone, std::move(anchors));
    }
  }
  throw SamplingExhaustedError(zone);
}

Vector ProjectCoefficients(std::span<const double> b, const ZoneBasis& basis) {
  const size_t n = basis.anchors.size();
  if (b.size() != n) {
    throw std::invalid_argument("ProjectCoefficients: dimension mismatch");
  }
  Vector m(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) s += basis.inverse[i * n + j] * b[j];
    m[i] = s;
  }
  return m;
}

namespace {

void ConvexFromCoefficients(Vector& m) {
  double total = 0.0;
  for (double& x : m) {
    x = std::max(x, 0.0);
    total += x;
  }
  if (total > 1e-300) {
    for (double& x : m) x /= total;
  } else {
    for (double& x : m) x = 1.0 / m.size();
  }
}

}  // namespace

Vector InterpolationWeights(std::span<const double> b, const ZoneBasis& basis) {
  Vector m = ProjectCoefficients(b, basis);
  ConvexFromCoefficients(m);
  return m;
}

int NearestAnchor(std::span<const double> b, const std::vector<Vector>& anchors) {
  if (anchors.empty()) throw std::invalid_argument("NearestAnchor: no anchors");
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < anchors.size(); ++a) {
    const Vector& v = anchors[a];
    if (v.size() != b.size()) {
      throw std::invalid_argument("NearestAnchor: dimension mismatch");
    }
    double d = 0.0;
    for (size_t i = 0; i < b.size() && d < best_d; ++i) {
      const double diff = v[i] - b[i];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(a);
    }
  }
  return best;
}

ZoneGrid::ZoneGrid(int dim, int zones, uint64_t seed,
                   std::span<const double> upper)
    : dim_(dim), zones_(zones), bases_(zones) {
  if (dim < 1 || zones < 1) {
    throw std::invalid_argument("ZoneGrid: dim and zones must be >= 1");
  }
  const Vector box = BoxOrCube(upper, dim);
  for (int m = 1; m <= zones; ++m) {
    try {
      bases_[m - 1] = BuildBasis(
          m, zones, dim,
          DeriveSeed(seed, {static_cast<uint64_t>(dim), static_cast<uint64_t>(m)}),
          box);
    } catch (const EmptyZoneError&) {
      // Shell entirely past the box.
    } catch (const SamplingExhaustedError&) {
      // A sliver of the shell near the far corner; points there fall back
      // to the zone below.
    }
  }
  Index();
}

ZoneGrid::ZoneGrid(int dim, int zones, std::map<int, ZoneBasis> bases)
    : dim_(dim), zones_(zones), bases_(zones) {
  if (dim < 1 || zones < 1) {
    throw std::invalid_argument("ZoneGrid: dim and zones must be >= 1");
  }
  for (auto& [m, basis] : bases) {
    if (m < 1 || m > zones) throw std::invalid_argument("ZoneGrid: bad zone");
    if (static_cast<int>(basis.anchors.size()) != dim) {
      throw std::invalid_argument("ZoneGrid: basis dimension mismatch");
    }
    basis.zone = m;
    bases_[m - 1] = std::move(basis);
  }
  Index();
}

void ZoneGrid::Index() {
  first_anchor_.assign(zones_, -1);
  for (int m = 1; m <= zones_; ++m) {
    if (!bases_[m - 1]) continue;
    first_anchor_[m - 1] = static_cast<int>(anchors_.size());
    for (const Vector& a : bases_[m - 1]->anchors) {
      anchors_.push_back(a);
      anchor_zone_.push_back(m);
    }
  }
  if (anchors_.empty()) throw EmptyZoneError(1);
}

bool ZoneGrid::usable(int zone) const {
  return zone >= 1 && zone <= zones_ && bases_[zone - 1].has_value();
}

const ZoneBasis& ZoneGrid::basis(int zone) const {
  if (!usable(zone)) throw EmptyZoneError(zone);
  return *bases_[zone - 1];
}

int ZoneGrid::UsableZoneFor(std::span<const double> b) const {
  const int zone = ZoneOf(b, zones_);
  for (int m = zone; m >= 1; --m) {
    if (usable(m)) return m;
  }
  for (int m = zone + 1; m <= zones_; ++m) {
    if (usable(m)) return m;
  }
  throw EmptyZoneError(zone);
}

int ZoneGrid::Nearest(std::span<const double> b) const {
  return NearestAnchor(b, anchors_);
}

std::vector<AnchorWeight> ZoneGrid::Coefficients(std::span<const double> b,
                                                 int zone) const {
  const ZoneBasis& zb = basis(zone);
  const Vector m = ProjectCoefficients(b, zb);
  std::vector<AnchorWeight> out(m.size());
  const int first = first_anchor(zone);
  for (size_t j = 0; j < m.size(); ++j) {
    out[j] = {first + static_cast<int>(j), m[j]};
  }
  return out;
}

std::vector<AnchorWeight> ZoneGrid::Weights(std::span<const double> b) const {
  std::vector<AnchorWeight> out(dim_);
  WeightsInto(b, out);
  return out;
}

void ZoneGrid::WeightsInto(std::span<const double> b,
                           std::span<AnchorWeight> out) const {
  if (static_cast<int>(b.size()) != dim_ ||
      static_cast<int>(out.size()) < dim_) {
    throw std::invalid_argument("ZoneGrid::WeightsInto: dimension mismatch");
  }
  const int zone = UsableZoneFor(b);
  const ZoneBasis& zb = *bases_[zone - 1];
  const int first = first_anchor(zone);
  const size_t n = dim_;
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (size_t j = 0; j < n; ++j) s += zb.inverse[i * n + j] * b[j];
    s = std::max(s, 0.0);
    out[i] = {first + static_cast<int>(i), s};
    total += s;
  }
  if (total > 1e-300) {
    for (size_t i = 0; i < n; ++i) out[i].weight /= total;
  } else {
    for (size_t i = 0; i < n; ++i) out[i].weight = 1.0 / n;
  }
}

ZoneScheme BuildZoneScheme(int state_dim, int action_dim, int zones,
                           uint64_t seed, std::span<const double> upper) {
  return ZoneScheme{
      state_dim, action_dim, zones,
      ZoneGrid(state_dim + action_dim, zones, DeriveSeed(seed, {1}), upper),
      ZoneGrid(state_dim, zones, DeriveSeed(seed, {2}))};
}

void WriteBasisCsv(const ZoneGrid& grid, std::ostream& out) {
  out << "zone,anchor_index";
  for (int i = 0; i < grid.dim(); ++i) out << ",coord_" << i;
  out << '\n';
  for (int a = 0; a < grid.num_anchors(); ++a) {
    out << grid.anchor_zone(a) << ',' << a - grid.first_anchor(grid.anchor_zone(a));
    for (double v : grid.anchor(a)) out << ',' << FormatDouble(v);
    out << '\n';
  }
}

}  // namespace pool
