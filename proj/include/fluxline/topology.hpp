#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fluxline/curves.hpp"
#include "fluxline/errors.hpp"
#include "fluxline/parallel.hpp"
#include "fluxline/vec3.hpp"

namespace fluxline {

/// Distance below which curves, or a point and a curve/surface, are treated
/// as touching. The integrals are undefined there, so we refuse instead of
/// regularizing.
inline constexpr double kSingularGuard = 1e-9;

inline constexpr double kDefaultLinkingTol = 1e-3;

/// Oriented triangulated surface. Triangle (a, b, c) has normal
/// (b - a) x (c - a); for a surface spanning a curve this is tied to the
/// boundary orientation by the right-hand rule.
struct TriangulatedSurface {
  std::vector<Point3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::optional<ClosedCurve> boundary;  ///< set when built by span_surface

  std::size_t size() const { return triangles.size(); }

  std::array<Point3, 3> triangle(std::size_t t) const {
    const auto& tri = triangles[t];
    return {vertices[static_cast<std::size_t>(tri[0])], vertices[static_cast<std::size_t>(tri[1])],
            vertices[static_cast<std::size_t>(tri[2])]};
  }

  /// Vector area of triangle t (normal direction, length = area).
  Vec3 vector_area(std::size_t t) const {
    const auto [a, b, c] = triangle(t);
    return 0.5 * cross(b - a, c - a);
  }

  double area() const {
    std::vector<double> a(size());
    for (std::size_t t = 0; t < size(); ++t) a[t] = norm(vector_area(t));
    return pairwise_sum(a);
  }
};

/// Throws InvalidArgument when an index is out of range.
inline void validate(const TriangulatedSurface& s) {
  if (s.triangles.empty()) throw InvalidArgument("surface has no triangles");
  const auto nv = static_cast<int>(s.vertices.size());
  for (std::size_t t = 0; t < s.triangles.size(); ++t) {
    for (int k : s.triangles[t]) {
      if (k < 0 || k >= nv) {
        throw InvalidArgument("surface triangle " + std::to_string(t) +
                              " references vertex " + std::to_string(k) + " out of range");
      }
    }
  }
  for (std::size_t i = 0; i < s.vertices.size(); ++i) {
    if (!is_finite(s.vertices[i])) {
      throw InvalidArgument("surface vertex " + std::to_string(i) + " is not finite");
    }
  }
}

// ---------------------------------------------------------------------------
// Point/triangle helpers

/// Closest point on triangle abc to x (Ericson, Real-Time Collision
/// Detection, 5.1.5).
inline Point3 closest_point_on_triangle(const Point3& p, const Point3& a, const Point3& b,
                                        const Point3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

inline double point_surface_distance(const Point3& x, const TriangulatedSurface& s) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < s.size(); ++t) {
    const auto [a, b, c] = s.triangle(t);
    best = std::min(best, distance(x, closest_point_on_triangle(x, a, b, c)));
  }
  return best;
}

/// Signed solid angle of triangle abc seen from x (Van Oosterom-Strackee).
/// Positive when the triangle normal points away from x, i.e. the sign of
/// the integrand (x' - x) . dS'.
inline double triangle_solid_angle(const Point3& x, const Point3& a, const Point3& b,
                                   const Point3& c) {
  const Vec3 r1 = a - x, r2 = b - x, r3 = c - x;
  const double l1 = norm(r1), l2 = norm(r2), l3 = norm(r3);
  const double num = dot(r1, cross(r2, r3));
  const double den = l1 * l2 * l3 + dot(r1, r2) * l3 + dot(r1, r3) * l2 + dot(r2, r3) * l1;
  return 2.0 * std::atan2(num, den);
}

// ---------------------------------------------------------------------------
// Gauss linking integral

struct LinkingResult {
  double raw = 0.0;  ///< double integral / 4 pi
  long rounded = 0;
  double residual = 0.0;  ///< |raw - rounded|
};

inline void require_clearance(const ClosedCurve& c, const ClosedCurve& k, const char* what) {
  if (!(min_distance(c, k) > kSingularGuard)) {
    throw ClearanceError(std::string(what) + ": curves touch (distance below guard)");
  }
}

/// (1/4pi) sum_i sum_j (x_i - x'_j) . (dx_i x dx'_j) / |x_i - x'_j|^3 over
/// quadrature nodes. No guard and no integer check.
inline double gauss_linking_integral(const ClosedCurve& c, const ClosedCurve& k) {
  const double sum = parallel_sum(c.size(), [&](std::size_t i) {
    const Point3 xi = c.node(i);
    const Vec3& dxi = c.node_delta(i);
    double row = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) {
      const Vec3 r = xi - k.node(j);
      const double d2 = norm2(r);
      row += dot(r, cross(dxi, k.node_delta(j))) / (d2 * std::sqrt(d2));
    }
    return row;
  });
  return sum / kFourPi;
}

/// Gauss linking number of c and k. Throws ClearanceError when the curves
/// touch and ResolutionError when the integral is not within `tol` of an
/// integer.
inline LinkingResult gauss_linking(const ClosedCurve& c, const ClosedCurve& k,
                                   double tol = kDefaultLinkingTol) {
  if (!(tol > 0.0)) throw InvalidArgument("gauss_linking: tol must be > 0");
  require_clearance(c, k, "gauss_linking");
  LinkingResult r;
  r.raw = gauss_linking_integral(c, k);
  r.rounded = std::lround(r.raw);
  r.residual = std::abs(r.raw - static_cast<double>(r.rounded));
  if (!(r.residual < tol)) {
    throw ResolutionError("gauss_linking: residual " + std::to_string(r.residual) +
                          " exceeds tolerance; resample with more points");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Spanning surface

/// Fan triangulation (centroid, p_i, p_{i+1}) of the curve. Fails on
/// degenerate or inverted fan triangles, i.e. curves that are not
/// star-shaped about their vertex centroid.
inline TriangulatedSurface span_surface(const ClosedCurve& c) {
  const std::size_t n = c.size();
  TriangulatedSurface s;
  s.vertices.reserve(n + 1);
  s.vertices.push_back(c.centroid());
  for (const auto& p : c.points()) s.vertices.push_back(p);
  s.triangles.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.triangles.push_back({0, static_cast<int>(i + 1), static_cast<int>((i + 1) % n + 1)});
  }
  Vec3 total;
  for (std::size_t t = 0; t < n; ++t) total += s.vector_area(t);
  for (std::size_t t = 0; t < n; ++t) {
    const Vec3 va = s.vector_area(t);
    if (!(norm(va) >= 1e-12)) {
      throw DegenerateGeometry("span_surface: degenerate fan triangle " + std::to_string(t));
    }
    if (!(dot(va, total) > 0.0)) {
      throw DegenerateGeometry("span_surface: inverted fan triangle " + std::to_string(t) +
                               " (curve is not star-shaped about its centroid)");
    }
  }
  s.boundary = c;
  return s;
}

// ---------------------------------------------------------------------------
// Signed crossing count

namespace detail {

enum class Hit { none, plus, minus, degenerate };

/// Segment p0->p1 against triangle abc. Hits within `eps` of an edge, a
/// vertex, or a segment endpoint are reported as degenerate.
inline Hit segment_triangle(const Point3& p0, const Point3& p1, const Point3& a, const Point3& b,
                            const Point3& c, double coplanar_tol) {
  constexpr double eps = 1e-12;
  const Vec3 dir = p1 - p0;
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 normal = cross(e1, e2);
  const double h0 = dot(p0 - a, normal);
  const double h1 = dot(p1 - a, normal);
  if ((h0 > 0.0 && h1 > 0.0) || (h0 < 0.0 && h1 < 0.0)) return Hit::none;
  const Vec3 pvec = cross(dir, e2);
  const double det = dot(e1, pvec);
  const double scale = norm(dir) * norm(normal);
  if (std::abs(det) <= 1e-14 * scale) {
    // Segment parallel to the plane: only a problem if it lies in it and
    // touches the triangle.
    const double nn = norm(normal);
    if (std::abs(h0) / nn > coplanar_tol) return Hit::none;
    const bool touches = distance(p0, closest_point_on_triangle(p0, a, b, c)) <= coplanar_tol ||
                         distance(p1, closest_point_on_triangle(p1, a, b, c)) <= coplanar_tol ||
                         segment_distance(p0, p1, a, b) <= coplanar_tol ||
                         segment_distance(p0, p1, b, c) <= coplanar_tol ||
                         segment_distance(p0, p1, c, a) <= coplanar_tol;
    return touches ? Hit::degenerate : Hit::none;
  }
  const double inv = 1.0 / det;
  const Vec3 svec = p0 - a;
  const double u = dot(svec, pvec) * inv;
  const Vec3 qvec = cross(svec, e1);
  const double v = dot(dir, qvec) * inv;
  const double w = 1.0 - u - v;
  const double t = dot(e2, qvec) * inv;
  if (u < -eps || v < -eps || w < -eps || t < -eps || t > 1.0 + eps) return Hit::none;
  if (u <= eps || v <= eps || w <= eps || t <= eps || t >= 1.0 - eps) return Hit::degenerate;
  return dot(dir, normal) > 0.0 ? Hit::plus : Hit::minus;
}

/// Signed count of segments pts[i] -> pts[i+1] (plus the closing segment
/// when `closed`) shifted by `offset`; nullopt on degeneracy.
inline std::optional<long> crossing_count_shifted(std::span<const Point3> pts, bool closed,
                                                  const TriangulatedSurface& surf,
                                                  const Vec3& offset, double coplanar_tol) {
  const std::size_t nseg = closed ? pts.size() : pts.size() - 1;
  std::vector<double> row(nseg);
  std::vector<char> bad(nseg, 0);
  parallel_for(nseg, [&](std::size_t i) {
    const Point3 p0 = pts[i] + offset;
    const Point3 p1 = pts[(i + 1) % pts.size()] + offset;
    long count = 0;
    for (std::size_t t = 0; t < surf.size(); ++t) {
      const auto [a, b, c] = surf.triangle(t);
      switch (segment_triangle(p0, p1, a, b, c, coplanar_tol)) {
        case Hit::plus: ++count; break;
        case Hit::minus: --count; break;
        case Hit::degenerate: bad[i] = 1; return;
        case Hit::none: break;
      }
    }
    row[i] = static_cast<double>(count);
  });
  for (char b : bad) {
    if (b) return std::nullopt;
  }
  return std::lround(pairwise_sum(row));
}

inline long crossing_count(std::span<const Point3> pts, bool closed,
                           const TriangulatedSurface& surf) {
  validate(surf);
  if (pts.size() < 2) throw InvalidArgument("crossing count needs at least 2 points");
  double scale = 0.0;
  for (const auto& v : surf.vertices) scale = std::max(scale, norm(v - surf.vertices[0]));
  scale = std::max(scale, 1.0);
  const double coplanar_tol = 1e-12 * scale;
  static constexpr std::array<Vec3, 4> kDirs = {Vec3{0.5773502691896258, 0.5773502691896258,
                                                     0.5773502691896258},
                                                Vec3{0.2672612419124244, -0.5345224838248488,
                                                     0.8017837257372732},
                                                Vec3{-0.8164965809277261, 0.4082482904638631,
                                                     0.4082482904638631},
                                                Vec3{0.4472135954999579, 0.8944271909999159, 0.0}};
  if (auto n = crossing_count_shifted(pts, closed, surf, Vec3{}, coplanar_tol)) return *n;
  for (double mag = 1e-9; mag <= 1.0001e-6; mag *= 10.0) {
    for (const auto& d : kDirs) {
      if (auto n = crossing_count_shifted(pts, closed, surf, d * (mag * scale), coplanar_tol)) {
        return *n;
      }
    }
  }
  throw DegenerateGeometry("crossing count: unresolvable degeneracy (path coplanar with surface)");
}

}  // namespace detail

/// Signed number of times `path` crosses `surf`: +1 for each segment
/// crossing along the triangle normal, -1 against it. Equals the linking
/// number of path with the surface boundary.
///
/// When a path vertex lies on the surface, or a crossing falls on a
/// triangle edge, the path is shifted by a tiny generic offset (at most
/// 1e-6 of the surface size) and counted again. The caller must keep the
/// path much further than that from the surface boundary.
inline long crossing_linking(const ClosedCurve& path, const TriangulatedSurface& surf) {
  return detail::crossing_count(path.points(), true, surf);
}

/// Signed crossings of an open polyline with the surface (same conventions
/// as crossing_linking).
inline long open_path_crossings(std::span<const Point3> polyline, const TriangulatedSurface& surf) {
  return detail::crossing_count(polyline, false, surf);
}

// ---------------------------------------------------------------------------
// Solid angle

/// Single-valued solid angle of the surface seen from x: the sum of exact
/// per-triangle solid angles, signed like (x' - x) . dS'. Jumps by 4 pi
/// across the surface.
inline double solid_angle(const Point3& x, const TriangulatedSurface& surf) {
  validate(surf);
  if (!(point_surface_distance(x, surf) > kSingularGuard)) {
    throw ClearanceError("solid_angle: point lies on the surface");
  }
  return parallel_sum(surf.size(), [&](std::size_t t) {
    const auto [a, b, c] = surf.triangle(t);
    return triangle_solid_angle(x, a, b, c);
  });
}

/// Off-surface gradient of the solid angle subtended by c:
/// sum_j (x'_j - x) x dx'_j / |x - x'_j|^3 over quadrature nodes. This is
/// continuous across any spanning surface.
inline Vec3 grad_solid_angle(const Point3& x, const ClosedCurve& c) {
  if (!(point_curve_distance(x, c) > kSingularGuard)) {
    throw ClearanceError("grad_solid_angle: point lies on the curve");
  }
  std::array<std::vector<double>, 3> parts;
  for (auto& p : parts) p.resize(c.size());
  parallel_for(c.size(), [&](std::size_t j) {
    const Vec3 r = c.node(j) - x;
    const double d2 = norm2(r);
    const Vec3 term = cross(r, c.node_delta(j)) / (d2 * std::sqrt(d2));
    parts[0][j] = term.x;
    parts[1][j] = term.y;
    parts[2][j] = term.z;
  });
  return {pairwise_sum(parts[0]), pairwise_sum(parts[1]), pairwise_sum(parts[2])};
}

}  // namespace fluxline
