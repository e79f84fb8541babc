#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "fluxline/curves.hpp"
#include "fluxline/errors.hpp"
#include "fluxline/parallel.hpp"
#include "fluxline/topology.hpp"
#include "fluxline/vec3.hpp"

namespace fluxline {

/// Closed line of magnetic flux: the field is confined to `curve` and the
/// flux through any surface it pierces once is `flux`. Natural units
/// (hbar = c = 1); the dipole moment per unit length is flux / 4pi.
struct FluxLine {
  ClosedCurve curve;
  double flux = 1.0;

  FluxLine(ClosedCurve c, double phi) : curve(std::move(c)), flux(phi) {
    if (!std::isfinite(flux)) throw InvalidArgument("flux must be finite");
  }

  double dipole_density() const { return flux / kFourPi; }
};

/// Relative guard: field points closer than this times the curve diameter
/// are rejected.
inline constexpr double kPotentialGuardRel = 1e-6;
inline constexpr double kDefaultFdStep = 1e-3;

namespace detail {

/// sum_j (x'_j - x) x dx'_j / |x - x'_j|^3 over the curve's quadrature
/// nodes, sequential so that callers can
/// parallelize over field points.
inline Vec3 line_kernel(const ClosedCurve& c, const Point3& x) {
  Vec3 s;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const Vec3 r = c.node(j) - x;
    const double d2 = norm2(r);
    s += cross(r, c.node_delta(j)) / (d2 * std::sqrt(d2));
  }
  return s;
}

inline void require_off_curve(const FluxLine& f, const Point3& x, const char* what) {
  if (!(point_curve_distance(x, f.curve) > kPotentialGuardRel * f.curve.diameter())) {
    throw ClearanceError(std::string(what) + ": point too close to the flux line");
  }
}

}  // namespace detail

/// Coulomb-gauge vector potential (flux/4pi) * sum_j (x'_j - x) x dx'_j / |x - x'_j|^3.
inline Vec3 vector_potential(const FluxLine& f, const Point3& x) {
  detail::require_off_curve(f, x, "vector_potential");
  return detail::line_kernel(f.curve, x) * (f.flux / kFourPi);
}

/// Midpoint quadrature of the closed line integral of A along `path`.
/// Equals linking number * flux.
inline double circulation(const FluxLine& f, const ClosedCurve& path) {
  require_clearance(path, f.curve, "circulation");
  const double sum = parallel_sum(path.size(), [&](std::size_t i) {
    return dot(detail::line_kernel(f.curve, path.node(i)), path.node_delta(i));
  });
  return sum * (f.flux / kFourPi);
}

/// Flux of the confined field through `surf`: flux times the signed number
/// of times the flux line pierces the surface.
inline double flux_through(const FluxLine& f, const TriangulatedSurface& surf) {
  return f.flux * static_cast<double>(crossing_linking(f.curve, surf));
}

namespace detail {

inline void require_fd_room(const FluxLine& f, const Point3& x, double h, const char* what) {
  if (!(h > 0.0)) throw InvalidArgument(std::string(what) + ": h must be > 0");
  const double d = point_curve_distance(x, f.curve);
  if (!(d > 10.0 * h)) {
    throw InvalidArgument(std::string(what) + ": step h too large for the distance to the curve");
  }
}

inline std::array<std::array<Vec3, 2>, 3> fd_stencil(const FluxLine& f, const Point3& x, double h) {
  std::array<std::array<Vec3, 2>, 3> a;
  for (int k = 0; k < 3; ++k) {
    Vec3 e;
    e[k] = h;
    a[k][0] = detail::line_kernel(f.curve, x + e) * (f.flux / kFourPi);
    a[k][1] = detail::line_kernel(f.curve, x - e) * (f.flux / kFourPi);
  }
  return a;
}

}  // namespace detail

/// Central-difference divergence of A at x (second order in h).
inline double divergence_check(const FluxLine& f, const Point3& x, double h = kDefaultFdStep) {
  detail::require_fd_room(f, x, h, "divergence_check");
  const auto a = detail::fd_stencil(f, x, h);
  double div = 0.0;
  for (int k = 0; k < 3; ++k) div += (a[k][0][k] - a[k][1][k]) / (2.0 * h);
  return div;
}

/// Central-difference curl of A at x. Off the curve B = 0, so this should
/// vanish to O(h^2).
inline Vec3 curl_check(const FluxLine& f, const Point3& x, double h = kDefaultFdStep) {
  detail::require_fd_room(f, x, h, "curl_check");
  const auto a = detail::fd_stencil(f, x, h);
  // d_i A_j
  auto d = [&](int i, int j) { return (a[i][0][j] - a[i][1][j]) / (2.0 * h); };
  return {d(1, 2) - d(2, 1), d(2, 0) - d(0, 2), d(0, 1) - d(1, 0)};
}

/// Relative residual |A - (flux/4pi) grad Omega0| / |A| with the gradient
/// taken from its closed line-integral form. x must be off the spanned
/// surface, where the surface delta term vanishes.
inline double potential_gradient_identity(const FluxLine& f, const Point3& x) {
  const Vec3 a = vector_potential(f, x);
  const Vec3 g = grad_solid_angle(x, f.curve) * (f.flux / kFourPi);
  return norm(a - g) / std::max(norm(a), 1e-300);
}

/// Same residual with grad Omega0 from central differences of the
/// triangle-sum solid angle over `surf`. The stencil must not straddle the
/// surface (Omega0 jumps by 4pi there), so points within 10 h of it are
/// rejected.
inline double potential_gradient_identity_fd(const FluxLine& f, const TriangulatedSurface& surf,
                                             const Point3& x, double h = 1e-4) {
  if (!(h > 0.0)) throw InvalidArgument("potential_gradient_identity_fd: h must be > 0");
  if (!(point_surface_distance(x, surf) > 10.0 * h)) {
    throw ClearanceError("potential_gradient_identity_fd: point too close to the surface");
  }
  const Vec3 a = vector_potential(f, x);
  Vec3 g;
  for (int k = 0; k < 3; ++k) {
    Vec3 e;
    e[k] = h;
    g[k] = (solid_angle(x + e, surf) - solid_angle(x - e, surf)) / (2.0 * h);
  }
  return norm(a - g * (f.flux / kFourPi)) / std::max(norm(a), 1e-300);
}

}  // namespace fluxline
