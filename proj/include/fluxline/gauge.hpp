#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fluxline/curves.hpp"
#include "fluxline/errors.hpp"
#include "fluxline/field.hpp"
#include "fluxline/parallel.hpp"
#include "fluxline/topology.hpp"
#include "fluxline/vec3.hpp"

namespace fluxline {

// ---------------------------------------------------------------------------
// Surface gauge: A' = A + grad(Lambda) with Lambda = -(flux/4pi) Omega0.
// A' is flux times the surface delta of the spanning surface. It is never
// sampled pointwise; its line integrals are crossing counts.

/// Circulation of the surface-gauge potential along `path`: flux times the
/// signed number of crossings of `surf`. No line quadrature involved.
inline double surface_gauge_circulation(const FluxLine& f, const TriangulatedSurface& surf,
                                        const ClosedCurve& path) {
  if (surf.boundary) require_clearance(path, *surf.boundary, "surface_gauge_circulation");
  return f.flux * static_cast<double>(crossing_linking(path, surf));
}

/// The surface-gauge function Lambda(x) = -(flux/4pi) Omega0(x).
inline double surface_gauge_function(const FluxLine& f, const TriangulatedSurface& surf,
                                     const Point3& x) {
  return -(f.flux / kFourPi) * solid_angle(x, surf);
}

struct OpenPathShift {
  double plain = 0.0;        ///< line integral of the Coulomb-gauge A
  double transformed = 0.0;  ///< same integral after the surface-gauge transformation
};

/// Midpoint quadrature of the Coulomb-gauge A along an open polyline.
inline double open_path_integral(const FluxLine& f, std::span<const Point3> gamma) {
  if (gamma.size() < 2) throw InvalidArgument("open path needs at least 2 points");
  for (std::size_t i = 0; i + 1 < gamma.size(); ++i) {
    for (std::size_t j = 0; j < f.curve.size(); ++j) {
      if (!(segment_distance(gamma[i], gamma[i + 1], f.curve.seg_start(j), f.curve.seg_end(j)) >
            kSingularGuard)) {
        throw ClearanceError("open path touches the flux line");
      }
    }
  }
  const double sum = parallel_sum(gamma.size() - 1, [&](std::size_t i) {
    const Point3 mid = 0.5 * (gamma[i] + gamma[i + 1]);
    return dot(detail::line_kernel(f.curve, mid), gamma[i + 1] - gamma[i]);
  });
  return sum * (f.flux / kFourPi);
}

/// Integral of A along the open path gamma (from gamma.front() = O to
/// gamma.back() = x) in the Coulomb gauge and in the surface gauge. They
/// differ by Lambda(x) - Lambda(O), which is nonzero whenever the solid
/// angle differs at the two endpoints.
inline OpenPathShift open_path_gauge_shift(const FluxLine& f, const TriangulatedSurface& surf,
                                           std::span<const Point3> gamma) {
  OpenPathShift r;
  r.plain = open_path_integral(f, gamma);
  const double lam_end = surface_gauge_function(f, surf, gamma.back());
  const double lam_start = surface_gauge_function(f, surf, gamma.front());
  r.transformed = r.plain + (lam_end - lam_start);
  return r;
}

inline OpenPathShift open_path_gauge_shift(const FluxLine& f, std::span<const Point3> gamma) {
  return open_path_gauge_shift(f, span_surface(f.curve), gamma);
}

// ---------------------------------------------------------------------------
// Infinite solenoid along the z axis

struct SolenoidConfig {
  double R = 1.0;     ///< solenoid radius
  double flux = 1.0;  ///< total flux inside

  void validate() const {
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("solenoid radius must be > 0");
    if (!std::isfinite(flux)) throw InvalidArgument("solenoid flux must be finite");
  }
};

/// Azimuthal component of the Coulomb-gauge potential at distance rho from
/// the axis: flux/(2 pi rho) outside, flux rho/(2 pi R^2) inside.
inline double solenoid_potential(const SolenoidConfig& s, double rho) {
  s.validate();
  if (!(rho >= 0.0)) throw InvalidArgument("solenoid_potential: rho must be >= 0");
  if (rho > s.R) return s.flux / (kTwoPi * rho);
  return s.flux * rho / (kTwoPi * s.R * s.R);
}

/// Azimuthal component after the singular transformation with
/// chi = -flux * phi / (2 pi). Identically zero outside the solenoid.
inline double solenoid_singular_potential(const SolenoidConfig& s, double rho) {
  s.validate();
  if (!(rho > 0.0)) throw InvalidArgument("solenoid_singular_potential: rho must be > 0");
  const double step_out = rho > s.R ? 1.0 : 0.0;
  const double step_in = rho > s.R ? 0.0 : 1.0;
  return s.flux / (kTwoPi * rho) * (step_out - 1.0) + s.flux * rho * step_in / (kTwoPi * s.R * s.R);
}

struct SolenoidDemo {
  double circ_A = 0.0;       ///< loop integral of the Coulomb-gauge potential
  double circ_Aprime = 0.0;  ///< loop integral after the singular transformation
  double string_flux = 0.0;  ///< loop integral of grad chi: the flux of the removed string
  long winding = 0;          ///< number of turns around the axis
};

/// Integrates both potentials around a loop outside the solenoid. For
/// n_turns != 0 the loop is the circle of radius rho0 about the axis,
/// traversed n_turns times (clockwise when negative); for n_turns == 0 it is
/// a circle of radius rho0 centred at (3 rho0, 0) that does not enclose the
/// axis.
inline SolenoidDemo solenoid_singular_gauge_demo(const SolenoidConfig& s, double rho0, int n_turns,
                                                 int samples_per_turn = kDefaultSamples) {
  s.validate();
  if (!(rho0 > s.R)) throw InvalidArgument("solenoid demo requires rho0 > R");
  if (samples_per_turn < 8) throw InvalidArgument("solenoid demo needs >= 8 samples per turn");
  const double cx = n_turns == 0 ? 3.0 * rho0 : 0.0;
  const int turns = std::max(1, std::abs(n_turns));
  const double dir = n_turns < 0 ? -1.0 : 1.0;
  const int m = samples_per_turn * turns;
  const double dt = kTwoPi * turns / m;

  // Trapezoid rule in the loop parameter: spectrally accurate for these
  // smooth periodic integrands.
  std::vector<double> ca(static_cast<std::size_t>(m)), cp(static_cast<std::size_t>(m)),
      dphi(static_cast<std::size_t>(m));
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t k) {
    const double t = dir * dt * static_cast<double>(k);
    const double x = cx + rho0 * std::cos(t), y = rho0 * std::sin(t);
    const double vx = -dir * rho0 * std::sin(t), vy = dir * rho0 * std::cos(t);
    const double rho = std::hypot(x, y);
    const double phx = -y / rho, phy = x / rho;  // azimuthal unit vector
    const double tangential = (phx * vx + phy * vy) * dt;
    ca[k] = solenoid_potential(s, rho) * tangential;
    cp[k] = solenoid_singular_potential(s, rho) * tangential;
    const double tn = dir * dt * static_cast<double>(k + 1);
    const double xn = cx + rho0 * std::cos(tn), yn = rho0 * std::sin(tn);
    dphi[k] = std::remainder(std::atan2(yn, xn) - std::atan2(y, x), kTwoPi);
  });
  SolenoidDemo d;
  d.circ_A = pairwise_sum(ca);
  d.circ_Aprime = pairwise_sum(cp);
  const double total_angle = pairwise_sum(dphi);
  d.winding = std::lround(total_angle / kTwoPi);
  // chi = -flux phi / (2 pi) is multi-valued; its loop integral is the
  // accumulated angle.
  d.string_flux = -s.flux * total_angle / kTwoPi;
  return d;
}

// ---------------------------------------------------------------------------
// Singular transformation of the closed flux line

struct ClosedLineDemo {
  double before = 0.0;  ///< circulation of the Coulomb-gauge A
  double after = 0.0;   ///< circulation after chi = -flux Omega / 4pi (A' = 0)
  double flux_before = 0.0;
  double flux_after = 0.0;
  long crossings_before = 0;
  long crossings_after = 0;
};

/// With the multi-valued chi = -(flux/4pi) Omega the transformed potential
/// vanishes everywhere, so the circulation drops from l*flux to 0. So does
/// the flux through any surface the line pierces: the transformation
/// removed the field itself and is not a gauge symmetry.
inline ClosedLineDemo singular_gauge_closed_line_demo(const FluxLine& f, const ClosedCurve& path) {
  ClosedLineDemo d;
  d.before = circulation(f, path);
  d.after = 0.0;
  long l = 0;
  try {
    l = crossing_linking(f.curve, span_surface(path));
  } catch (const DegenerateGeometry&) {
    l = crossing_linking(path, span_surface(f.curve));
  }
  d.crossings_before = l;
  d.crossings_after = 0;
  d.flux_before = f.flux * static_cast<double>(l);
  d.flux_after = 0.0;
  return d;
}

}  // namespace fluxline
