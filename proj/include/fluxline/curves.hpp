#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fluxline/errors.hpp"
#include "fluxline/parallel.hpp"
#include "fluxline/vec3.hpp"

namespace fluxline {

inline constexpr int kDefaultSamples = 1024;

/// Oriented closed polyline. The segment points[N-1] -> points[0] closes the
/// curve; orientation is the list order.
///
/// Construction checks N >= 3, finiteness and nonzero segment lengths.
/// Self-intersection is only checked by the built-in generators; for
/// user-supplied data see min_self_distance().
///
/// Line integrals use one node per segment: the parameter midpoint of the
/// segment and the tangent there. For N >= 8 both come from the cubic
/// through the four surrounding vertices, so the rule is fourth order in
/// the sample spacing on smooth curves; the chord midpoint would put every
/// node inside the curve and leave an O(N^-2) error. Coarser curves are
/// taken as the literal polygon.
class ClosedCurve {
 public:
  explicit ClosedCurve(std::vector<Point3> points) : points_(std::move(points)) {
    if (points_.size() < 3) {
      throw InvalidArgument("closed curve needs at least 3 points, got " +
                            std::to_string(points_.size()));
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!is_finite(points_[i])) {
        throw InvalidArgument("curve point " + std::to_string(i) + " is not finite");
      }
    }
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (norm2(delta(i)) == 0.0) {
        throw InvalidArgument("curve segment " + std::to_string(i) + " has zero length");
      }
    }
    build_nodes();
  }

  std::size_t size() const { return points_.size(); }
  std::span<const Point3> points() const { return points_; }
  const Point3& operator[](std::size_t i) const { return points_[i]; }

  const Point3& seg_start(std::size_t i) const { return points_[i]; }
  const Point3& seg_end(std::size_t i) const { return points_[(i + 1) % points_.size()]; }
  Vec3 delta(std::size_t i) const { return seg_end(i) - seg_start(i); }
  Point3 midpoint(std::size_t i) const { return 0.5 * (seg_start(i) + seg_end(i)); }

  /// Quadrature node of segment i and its weighted tangent (see above).
  const Point3& node(std::size_t i) const { return nodes_[i]; }
  const Vec3& node_delta(std::size_t i) const { return node_deltas_[i]; }

  double perimeter() const {
    std::vector<double> len(size());
    for (std::size_t i = 0; i < size(); ++i) len[i] = norm(delta(i));
    return pairwise_sum(len);
  }

  /// Mean of the vertices.
  Point3 centroid() const {
    Vec3 s;
    for (const auto& p : points_) s += p;
    return s / static_cast<double>(size());
  }

  /// Diagonal of the axis-aligned bounding box; a cheap length scale.
  double diameter() const {
    Vec3 lo = points_[0], hi = points_[0];
    for (const auto& p : points_) {
      for (int k = 0; k < 3; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    }
    return norm(hi - lo);
  }

  ClosedCurve reversed() const {
    std::vector<Point3> r(points_.rbegin(), points_.rend());
    return ClosedCurve(std::move(r));
  }

  ClosedCurve translated(const Vec3& offset) const {
    std::vector<Point3> r(points_);
    for (auto& p : r) p += offset;
    return ClosedCurve(std::move(r));
  }

  friend bool operator==(const ClosedCurve& a, const ClosedCurve& b) {
    return a.points_ == b.points_;
  }

 private:
  void build_nodes() {
    const std::size_t n = points_.size();
    nodes_.resize(n);
    node_deltas_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (n < 8) {
        nodes_[i] = midpoint(i);
        node_deltas_[i] = delta(i);
        continue;
      }
      const Point3& a = points_[(i + n - 1) % n];
      const Point3& b = points_[i];
      const Point3& c = points_[(i + 1) % n];
      const Point3& d = points_[(i + 2) % n];
      nodes_[i] = (9.0 * (b + c) - (a + d)) / 16.0;
      node_deltas_[i] = (27.0 * (c - b) - (d - a)) / 24.0;
    }
  }

  std::vector<Point3> points_;
  std::vector<Point3> nodes_;
  std::vector<Vec3> node_deltas_;
};

// ---------------------------------------------------------------------------
// Distances

/// Euclidean distance between segments [p0,p1] and [q0,q1] (clamped
/// closest-point computation, handles parallel and degenerate segments).
inline double segment_distance(const Point3& p0, const Point3& p1, const Point3& q0,
                               const Point3& q1) {
  const Vec3 d1 = p1 - p0;
  const Vec3 d2 = q1 - q0;
  const Vec3 r = p0 - q0;
  const double a = dot(d1, d1);
  const double e = dot(d2, d2);
  const double f = dot(d2, r);
  constexpr double tiny = 1e-300;
  double s = 0.0, t = 0.0;
  if (a <= tiny && e <= tiny) return norm(r);
  if (a <= tiny) {
    t = std::clamp(f / e, 0.0, 1.0);
  } else {
    const double c = dot(d1, r);
    if (e <= tiny) {
      s = std::clamp(-c / a, 0.0, 1.0);
    } else {
      const double b = dot(d1, d2);
      const double denom = a * e - b * b;
      s = denom > 0.0 ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
      t = (b * s + f) / e;
      if (t < 0.0) {
        t = 0.0;
        s = std::clamp(-c / a, 0.0, 1.0);
      } else if (t > 1.0) {
        t = 1.0;
        s = std::clamp((b - c) / a, 0.0, 1.0);
      }
    }
  }
  return norm((p0 + d1 * s) - (q0 + d2 * t));
}

inline double point_segment_distance(const Point3& x, const Point3& a, const Point3& b) {
  const Vec3 ab = b - a;
  const double len2 = norm2(ab);
  const double t = len2 > 0.0 ? std::clamp(dot(x - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm(x - (a + ab * t));
}

inline double point_curve_distance(const Point3& x, const ClosedCurve& c) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < c.size(); ++i) {
    best = std::min(best, point_segment_distance(x, c.seg_start(i), c.seg_end(i)));
  }
  return best;
}

/// Minimum segment-segment distance over all pairs. Zero for a curve
/// against itself.
inline double min_distance(const ClosedCurve& a, const ClosedCurve& b) {
  std::vector<double> row(a.size());
  parallel_for(a.size(), [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, segment_distance(a.seg_start(i), a.seg_end(i), b.seg_start(j),
                                             b.seg_end(j)));
    }
    row[i] = best;
  });
  return *std::min_element(row.begin(), row.end());
}

/// Minimum distance between non-adjacent segments of one curve. A value of
/// (numerically) zero means the polyline self-intersects.
inline double min_self_distance(const ClosedCurve& c) {
  const std::size_t n = c.size();
  std::vector<double> row(n, std::numeric_limits<double>::infinity());
  parallel_for(n, [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      best = std::min(best, segment_distance(c.seg_start(i), c.seg_end(i), c.seg_start(j),
                                             c.seg_end(j)));
    }
    row[i] = best;
  });
  return *std::min_element(row.begin(), row.end());
}

// ---------------------------------------------------------------------------
// Generators

/// n points uniformly spaced on a circle, right-handed about `normal`.
inline ClosedCurve make_circle(const Point3& center, double radius, const Vec3& normal,
                               int n = kDefaultSamples) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidArgument("circle radius must be positive and finite");
  }
  if (!(norm(normal) > 0.0) || !is_finite(normal)) {
    throw InvalidArgument("circle normal must be a nonzero vector");
  }
  if (n < 3) throw InvalidArgument("circle needs n >= 3 samples");
  const Vec3 w = normalized(normal);
  // u x v = w so that increasing angle is counter-clockwise seen from +w.
  Vec3 u = std::abs(w.z) > 0.9 ? Vec3{1, 0, 0} : Vec3{0, 0, 1};
  u = normalized(u - w * dot(u, w));
  const Vec3 v = cross(w, u);
  std::vector<Point3> pts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * k / n;
    pts[static_cast<std::size_t>(k)] = center + radius * (std::cos(t) * u + std::sin(t) * v);
  }
  return ClosedCurve(std::move(pts));
}

/// Closed polygon through `corners`, each side split into `per_side`
/// equal segments.
inline ClosedCurve make_polygon(std::span<const Point3> corners, int per_side = 1) {
  if (corners.size() < 3) throw InvalidArgument("polygon needs at least 3 corners");
  if (per_side < 1) throw InvalidArgument("per_side must be >= 1");
  std::vector<Point3> pts;
  pts.reserve(corners.size() * static_cast<std::size_t>(per_side));
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Point3& a = corners[i];
    const Point3& b = corners[(i + 1) % corners.size()];
    for (int k = 0; k < per_side; ++k) pts.push_back(a + (b - a) * (double(k) / per_side));
  }
  return ClosedCurve(std::move(pts));
}

/// (p,q) torus curve on the torus with major radius R and minor radius r:
///   rho(t) = R - r sin(q t),  (x, y) = rho (cos p t, sin p t),  z = r cos(q t).
/// It winds p times around the z axis and q times around the core circle.
/// (1,0) is the circle of radius R at height r.
inline ClosedCurve make_torus_knot(int p, int q, double R, double r, int n = kDefaultSamples) {
  if (std::gcd(p, q) != 1) {
    throw InvalidArgument("torus knot requires gcd(p, q) = 1");
  }
  if (!(r > 0.0) || !(R > r)) throw InvalidArgument("torus knot requires R > r > 0");
  const int needed = 16 * std::max(std::abs(p), std::abs(q));
  if (n < std::max(3, needed)) {
    throw InvalidArgument("torus knot needs n >= 16 * max(|p|, |q|) samples");
  }
  std::vector<Point3> pts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double t = kTwoPi * k / n;
    const double rho = R - r * std::sin(q * t);
    pts[static_cast<std::size_t>(k)] = {rho * std::cos(p * t), rho * std::sin(p * t),
                                        r * std::cos(q * t)};
  }
  ClosedCurve c(std::move(pts));
  if (!(min_self_distance(c) > 1e-9 * c.diameter())) {
    throw DegenerateGeometry("torus knot sampling self-intersects");
  }
  return c;
}

/// n points at uniform arc-length spacing along the polygon, starting at
/// points[0], orientation preserved.
inline ClosedCurve resample(const ClosedCurve& c, int n) {
  if (n < 3) throw InvalidArgument("resample needs n >= 3");
  const std::size_t m = c.size();
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + norm(c.delta(i));
  const double total = cum[m];
  std::vector<Point3> pts(static_cast<std::size_t>(n));
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double s = total * k / n;
    while (seg + 1 < m && cum[seg + 1] <= s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = std::clamp((s - cum[seg]) / len, 0.0, 1.0);
    pts[static_cast<std::size_t>(k)] = c.seg_start(seg) + c.delta(seg) * t;
  }
  return ClosedCurve(std::move(pts));
}

// ---------------------------------------------------------------------------
// Homotopic deformation

struct DeformationSpec {
  double amplitude = 0.2;  ///< bound on the total displacement
  int n_modes = 4;         ///< Fourier modes of each perturbation
  std::uint64_t seed = 1;
  int steps = 20;
  double clearance = 0.05;  ///< minimum distance kept to the obstacle
  int max_rejections = 1000;
};

namespace detail {

inline double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

/// Band-limited displacement field sampled at the curve's vertices (curve
/// parameter = vertex index), scaled so its largest vertex displacement is
/// exactly `size`.
inline std::vector<Vec3> fourier_field(std::size_t n, int n_modes, double size,
                                       std::mt19937_64& rng) {
  std::vector<Vec3> a(static_cast<std::size_t>(n_modes)), b(static_cast<std::size_t>(n_modes));
  for (int k = 0; k < n_modes; ++k) {
    const double w = 1.0 / (k + 1);
    a[k] = Vec3{uniform_pm1(rng), uniform_pm1(rng), uniform_pm1(rng)} * w;
    b[k] = Vec3{uniform_pm1(rng), uniform_pm1(rng), uniform_pm1(rng)} * w;
  }
  std::vector<Vec3> d(n);
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = kTwoPi * static_cast<double>(i) / static_cast<double>(n);
    Vec3 s;
    for (int k = 0; k < n_modes; ++k) {
      s += a[k] * std::cos((k + 1) * t) + b[k] * std::sin((k + 1) * t);
    }
    d[i] = s;
    largest = std::max(largest, norm(s));
  }
  const double scale = largest > 0.0 ? size / largest : 0.0;
  for (auto& v : d) v *= scale;
  return d;
}

}  // namespace detail

inline void validate(const DeformationSpec& spec) {
  if (!(spec.amplitude >= 0.0) || !std::isfinite(spec.amplitude)) {
    throw InvalidArgument("deformation amplitude must be finite and >= 0");
  }
  if (!(spec.clearance > 0.0) || !std::isfinite(spec.clearance)) {
    throw InvalidArgument("deformation clearance must be finite and > 0");
  }
  if (spec.n_modes < 1) throw InvalidArgument("deformation needs n_modes >= 1");
  if (spec.steps < 1) throw InvalidArgument("deformation needs steps >= 1");
  // Each step is a straight-line homotopy; it cannot pass through the
  // obstacle if no vertex moves further than the clearance.
  if (!(spec.amplitude / spec.steps < spec.clearance)) {
    throw InvalidArgument("deformation step amplitude/steps must be below the clearance");
  }
}

/// One random step of size amplitude/steps that keeps the clearance.
/// Candidates violating it are re-drawn from `rng`.
inline ClosedCurve deform_step(const ClosedCurve& c, const ClosedCurve& obstacle,
                               const DeformationSpec& spec, std::mt19937_64& rng) {
  const double step = spec.amplitude / spec.steps;
  if (step == 0.0) return c;
  for (int attempt = 0; attempt < spec.max_rejections; ++attempt) {
    const auto d = detail::fourier_field(c.size(), spec.n_modes, step, rng);
    std::vector<Point3> pts(c.points().begin(), c.points().end());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] += d[i];
    bool valid = true;
    for (std::size_t i = 0; i < pts.size() && valid; ++i) {
      valid = norm2(pts[(i + 1) % pts.size()] - pts[i]) > 0.0;
    }
    if (!valid) continue;
    ClosedCurve next(std::move(pts));
    if (min_distance(next, obstacle) > spec.clearance) return next;
  }
  throw ClearanceError("deformation: no step keeping the clearance after " +
                       std::to_string(spec.max_rejections) + " attempts");
}

/// Sequence c = c_0, c_1, ..., c_steps of curves, each a small random
/// Fourier perturbation of the previous one, all at distance > clearance
/// from `obstacle`. Deterministic for a fixed seed.
inline std::vector<ClosedCurve> deform_homotopy(const ClosedCurve& c, const ClosedCurve& obstacle,
                                                const DeformationSpec& spec) {
  validate(spec);
  if (!(min_distance(c, obstacle) > spec.clearance)) {
    throw ClearanceError("deformation: initial curve violates the clearance");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<ClosedCurve> out;
  out.reserve(static_cast<std::size_t>(spec.steps) + 1);
  out.push_back(c);
  for (int s = 0; s < spec.steps; ++s) out.push_back(deform_step(out.back(), obstacle, spec, rng));
  return out;
}

}  // namespace fluxline
