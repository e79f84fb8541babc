#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "fluxline/curves.hpp"
#include "fluxline/errors.hpp"
#include "fluxline/field.hpp"
#include "fluxline/parallel.hpp"
#include "fluxline/topology.hpp"

namespace fluxline {

/// alpha = q flux / (hbar c), the phase picked up per unit of linking.
struct PhaseParams {
  double alpha = 1.0;

  void validate() const {
    if (!std::isfinite(alpha)) throw InvalidArgument("alpha must be finite");
  }
};

inline double ab_phase_topological(const PhaseParams& p, long l) {
  p.validate();
  return static_cast<double>(l) * p.alpha;
}

namespace detail {
inline void require_nonzero_flux(const FluxLine& f, const char* what) {
  if (f.flux == 0.0) throw InvalidArgument(std::string(what) + ": flux must be nonzero");
}
}  // namespace detail

/// (alpha/flux) times the line integral of A around the path.
inline double ab_phase_circulation(const PhaseParams& p, const FluxLine& f, const ClosedCurve& path) {
  p.validate();
  detail::require_nonzero_flux(f, "ab_phase_circulation");
  return p.alpha / f.flux * circulation(f, path);
}

/// (alpha/flux) times the flux through a surface bounded by the path.
inline double ab_phase_flux(const PhaseParams& p, const FluxLine& f, const ClosedCurve& path) {
  p.validate();
  detail::require_nonzero_flux(f, "ab_phase_flux");
  require_clearance(path, f.curve, "ab_phase_flux");
  return p.alpha / f.flux * flux_through(f, span_surface(path));
}

struct SolidAnglePhase {
  double gradient_term = 0.0;  ///< integral of grad Omega0 with the surface jumps removed
  long crossings = 0;          ///< signed crossings of the flux line's spanning surface
  double phase = 0.0;
};

/// The solid-angle form: (alpha/4pi) times the integral of grad Omega along
/// the path, split into the single-valued part and 4 pi per surface
/// crossing. The single-valued part integrates to zero around any closed
/// path and is reported so that callers can check it.
inline SolidAnglePhase ab_phase_solid_angle(const PhaseParams& p, const ClosedCurve& path,
                                            const FluxLine& f) {
  p.validate();
  require_clearance(path, f.curve, "ab_phase_solid_angle");
  const auto surf = span_surface(f.curve);
  const double smooth = parallel_sum(path.size(), [&](std::size_t i) {
    return dot(detail::line_kernel(f.curve, path.node(i)), path.node_delta(i));
  });
  SolidAnglePhase r;
  r.crossings = crossing_linking(path, surf);
  r.gradient_term = smooth - kFourPi * static_cast<double>(r.crossings);
  r.phase = p.alpha / kFourPi * (r.gradient_term + kFourPi * static_cast<double>(r.crossings));
  return r;
}

/// alpha times the signed number of crossings of the path through the flux
/// line's spanning surface.
inline double ab_phase_crossing(const PhaseParams& p, const FluxLine& f, const ClosedCurve& path) {
  p.validate();
  return p.alpha * static_cast<double>(crossing_linking(path, span_surface(f.curve)));
}

// ---------------------------------------------------------------------------
// Invariance under deformations

inline constexpr double kInvarianceTol = 1e-3;

struct SuiteResult {
  std::string name;
  double initial = 0.0;
  double max_deviation = 0.0;
  int worst_step = 0;  ///< step with the largest deviation (0 = none)
  bool passed = true;
  std::vector<double> phases;  ///< phase after each step, index 0 = initial
};

struct InvarianceReport {
  std::array<SuiteResult, 4> suites;  ///< path, flux, both, swap
  double tol = kInvarianceTol;
  double shift_scale = 1.0;  ///< L lambda_bar / d used for the shift chain
  double shift_max_deviation = 0.0;
  bool passed = true;
};

namespace detail {

inline void finish_suite(SuiteResult& s, double tol) {
  s.initial = s.phases.front();
  for (std::size_t k = 1; k < s.phases.size(); ++k) {
    const double dev = std::abs(s.phases[k] - s.initial);
    if (dev > s.max_deviation) {
      s.max_deviation = dev;
      s.worst_step = static_cast<int>(k);
    }
  }
  s.passed = s.max_deviation < tol;
}

}  // namespace detail

/// Re-evaluates the circulation phase along four deformation families:
/// the path alone, the flux curve alone, both (alternating steps from one
/// random stream) and, on that joint family, with the roles of path and
/// flux curve exchanged. Violations are reported, not thrown.
inline InvarianceReport invariance_suite(const PhaseParams& p, const FluxLine& f,
                                         const ClosedCurve& path, const DeformationSpec& spec,
                                         double tol = kInvarianceTol, double shift_scale = 1.0) {
  p.validate();
  validate(spec);
  detail::require_nonzero_flux(f, "invariance_suite");
  if (!(min_distance(path, f.curve) > spec.clearance)) {
    throw ClearanceError("invariance_suite: initial configuration violates the clearance");
  }
  auto phase = [&](const ClosedCurve& flux_curve, const ClosedCurve& q) {
    return ab_phase_circulation(p, FluxLine(flux_curve, f.flux), q);
  };

  InvarianceReport rep;
  rep.tol = tol;
  rep.shift_scale = shift_scale;
  auto& a = rep.suites[0];
  auto& b = rep.suites[1];
  auto& c = rep.suites[2];
  auto& d = rep.suites[3];
  a.name = "path";
  b.name = "flux";
  c.name = "both";
  d.name = "swap";

  DeformationSpec sa = spec;
  for (const auto& q : deform_homotopy(path, f.curve, sa)) a.phases.push_back(phase(f.curve, q));

  DeformationSpec sb = spec;
  sb.seed = spec.seed + 1;
  for (const auto& k : deform_homotopy(f.curve, path, sb)) b.phases.push_back(phase(k, path));

  std::mt19937_64 rng(spec.seed + 2);
  ClosedCurve q = path;
  ClosedCurve k = f.curve;
  c.phases.push_back(phase(k, q));
  d.phases.push_back(ab_phase_circulation(p, FluxLine(q, f.flux), k));
  for (int s = 0; s < spec.steps; ++s) {
    q = deform_step(q, k, spec, rng);
    k = deform_step(k, q, spec, rng);
    c.phases.push_back(phase(k, q));
    d.phases.push_back(ab_phase_circulation(p, FluxLine(q, f.flux), k));
  }

  for (auto& s : rep.suites) {
    detail::finish_suite(s, tol);
    rep.passed = rep.passed && s.passed;
  }
  // The swap must also agree with the unswapped phase step by step.
  for (std::size_t i = 0; i < d.phases.size(); ++i) {
    const double dev = std::abs(d.phases[i] - c.phases[i]);
    if (dev > d.max_deviation) {
      d.max_deviation = dev;
      d.worst_step = static_cast<int>(i);
    }
  }
  d.passed = d.max_deviation < tol;
  rep.passed = rep.passed && d.passed;

  const double reference = shift_scale * a.initial;
  for (const auto& s : rep.suites) {
    for (double ph : s.phases) {
      rep.shift_max_deviation = std::max(rep.shift_max_deviation, std::abs(shift_scale * ph - reference));
    }
  }
  return rep;
}

}  // namespace fluxline
