// Copyright 2026 The taldp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Inscribed centered radius of the empirical convex hull for n <= 3.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <utility>
#include <vector>

#include "taldp/error.h"
#include "taldp/whitening.h"

namespace taldp {
namespace {

struct Vec2 {
  double x, y;
};

double Cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double Radius1d(const Matrix& points) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    lo = std::min(lo, points(r, 0));
    hi = std::max(hi, points(r, 0));
  }
  return std::max(0.0, std::min(hi, -lo));
}

double Radius2d(const Matrix& points) {
  std::vector<Vec2> pts(points.rows());
  for (std::size_t r = 0; r < points.rows(); ++r) pts[r] = {points(r, 0), points(r, 1)};
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  // Andrew's monotone chain, counter-clockwise, collinear points dropped.
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && Cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && Cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  if (k < 4) return 0.0;  // fewer than 3 distinct vertices
  hull.resize(k - 1);

  double radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    // Outward normal of a counter-clockwise edge.
    const double offset = (dy * a.x - dx * a.y) / len;
    radius = std::min(radius, offset);
  }
  return std::max(0.0, radius);
}

using Vec3 = std::array<double, 3>;

Vec3 Sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 Cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
double Dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double Len3(const Vec3& a) { return std::sqrt(Dot3(a, a)); }

struct Face {
  std::array<int, 3> v;
  Vec3 normal;  // unit, outward
  double offset;
};

double Radius3d(const Matrix& points) {
  const int count = static_cast<int>(points.rows());
  std::vector<Vec3> p(count);
  double scale = 0.0;
  for (int i = 0; i < count; ++i) {
    p[i] = {points(i, 0), points(i, 1), points(i, 2)};
    scale = std::max(scale, Len3(p[i]));
  }
  if (count < 4 || scale == 0.0) return 0.0;
  const double eps = 1e-10 * scale;

  // Initial tetrahedron from well-separated points.
  int i0 = 0, i1 = -1, i2 = -1, i3 = -1;
  double best = 0.0;
  for (int i = 0; i < count; ++i) {
    const double d = Len3(Sub(p[i], p[i0]));
    if (d > best) best = d, i1 = i;
  }
  if (best <= eps) return 0.0;
  best = 0.0;
  const Vec3 axis = Sub(p[i1], p[i0]);
  for (int i = 0; i < count; ++i) {
    const double d = Len3(Cross3(axis, Sub(p[i], p[i0]))) / Len3(axis);
    if (d > best) best = d, i2 = i;
  }
  if (best <= eps) return 0.0;
  best = 0.0;
  Vec3 plane = Cross3(axis, Sub(p[i2], p[i0]));
  const double plane_len = Len3(plane);
  for (int i = 0; i < count; ++i) {
    const double d = std::abs(Dot3(plane, Sub(p[i], p[i0]))) / plane_len;
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) return 0.0;

  Vec3 interior{};
  for (int idx : {i0, i1, i2, i3}) {
    for (int k = 0; k < 3; ++k) interior[k] += 0.25 * p[idx][k];
  }

  std::vector<Face> faces;
  auto make_face = [&](int a, int b, int c) {
    Vec3 n = Cross3(Sub(p[b], p[a]), Sub(p[c], p[a]));
    if (Dot3(n, Sub(interior, p[a])) > 0) {
      std::swap(b, c);
      n = {-n[0], -n[1], -n[2]};
    }
    const double len = Len3(n);
    for (double& x : n) x /= len;
    faces.push_back({{a, b, c}, n, Dot3(n, p[a])});
  };
  make_face(i0, i1, i2);
  make_face(i0, i1, i3);
  make_face(i0, i2, i3);
  make_face(i1, i2, i3);

  for (int i = 0; i < count; ++i) {
    if (i == i0 || i == i1 || i == i2 || i == i3) continue;
    std::vector<char> visible(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (Dot3(faces[f].normal, p[i]) - faces[f].offset > eps) {
        visible[f] = 1;
        any = true;
      }
    }
    if (!any) continue;
    std::set<std::pair<int, int>> edges;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) continue;
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) edges.insert({v[e], v[(e + 1) % 3]});
    }
    std::vector<Face> kept;
    kept.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!visible[f]) kept.push_back(faces[f]);
    }
    faces = std::move(kept);
    for (const auto& [a, b] : edges) {
      if (!edges.contains({b, a})) make_face(a, b, i);
    }
  }

  double radius = std::numeric_limits<double>::infinity();
  for (const Face& f : faces) radius = std::min(radius, f.offset);
  return std::max(0.0, radius);
}

}  // namespace

double InscribedCenteredRadius(const Matrix& points) {
  if (points.rows() == 0) {
    throw Error(ErrorCode::kEmptyData, "inscribed radius needs samples");
  }
  switch (points.cols()) {
    case 1: return Radius1d(points);
    case 2: return Radius2d(points);
    case 3: return Radius3d(points);
    default:
      throw Error(ErrorCode::kInvalidArgument,
                  "exact inscribed radius is only available for n <= 3");
  }
}

}  // namespace taldp
