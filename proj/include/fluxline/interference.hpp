#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "fluxline/errors.hpp"
#include "fluxline/parallel.hpp"
#include "fluxline/vec3.hpp"

namespace fluxline {

/// Two Gaussian slits at +-x0, first screen reached at t_a, second at t_b.
/// Units with hbar = 1. `v` is the constant velocity along the beam axis; it
/// only converts times into screen distances.
struct TwoSlitConfig {
  double x0 = 0.5;
  double b = 0.1;
  double t_a = 1.0;
  double t_b = 3.0;
  double m = 1.0;
  double v = 1.0;
  static constexpr double hbar = 1.0;

  void validate() const {
    auto pos = [](double a) { return std::isfinite(a) && a > 0.0; };
    if (!pos(x0)) throw InvalidArgument("x0 must be > 0");
    if (!pos(b)) throw InvalidArgument("b must be > 0");
    if (!pos(t_a)) throw InvalidArgument("t_a must be > 0");
    if (!(std::isfinite(t_b) && t_b > t_a)) throw InvalidArgument("t_b must be > t_a");
    if (!pos(m)) throw InvalidArgument("m must be > 0");
    if (!pos(v)) throw InvalidArgument("v must be > 0");
  }

  double v0() const { return x0 / t_a; }
  double alpha_broad() const { return hbar / (m * b * b); }
  double beta() const { return m / (2.0 * hbar); }
  double classical_broadening() const { return b * t_b / t_a; }
  double quantum_broadening() const { return hbar * (t_b - t_a) / (m * b); }
  double delta_x() const { return std::hypot(classical_broadening(), quantum_broadening()); }
  double chi_broad() const { return classical_broadening() / quantum_broadening(); }

  /// Distance between the screens, v (t_b - t_a).
  double L() const { return v * (t_b - t_a); }
  double lambda_bar() const { return hbar / (m * v); }
  double d() const { return 2.0 * x0; }
};

/// One-slit wave function on the second screen. slit_sign = -1 gives the
/// partial wave through the slit at -x0 (x0 -> -x0, v0 -> -v0).
inline std::complex<double> psi_one_slit(const TwoSlitConfig& cfg, double x_b, int slit_sign) {
  cfg.validate();
  if (slit_sign != 1 && slit_sign != -1) throw InvalidArgument("slit_sign must be +1 or -1");
  using namespace std::complex_literals;
  const double s = slit_sign;
  const double x0 = s * cfg.x0;
  const double v0 = s * cfg.v0();
  const double tba = cfg.t_b - cfg.t_a;
  const double dx2 = cfg.delta_x() * cfg.delta_x();
  const std::complex<double> denom =
      2.0 * kPi * 1i * cfg.hbar * (cfg.t_b + 1i * cfg.alpha_broad() * cfg.t_a * tba);
  const std::complex<double> pref = std::sqrt(cfg.m / denom);
  const double u = x_b - v0 * cfg.t_b;
  const std::complex<double> expo = -(1.0 - 1i * cfg.chi_broad()) * (u * u) / (2.0 * dx2) +
                                    1i * cfg.beta() * (x_b - x0) * (x_b - x0) / tba +
                                    1i * cfg.beta() * x0 * x0 / cfg.t_a;
  return pref * std::exp(expo);
}

/// |Psi|^2 of both slits with the AB phase alpha_AB between them, as the
/// sum of the two envelopes and the interference term. alpha_AB = 0 is the
/// flux-free density.
inline double density(const TwoSlitConfig& cfg, double x_b, double alpha_ab) {
  cfg.validate();
  const double v0tb = cfg.v0() * cfg.t_b;
  const double tba = cfg.t_b - cfg.t_a;
  const double dx2 = cfg.delta_x() * cfg.delta_x();
  const double ab = cfg.alpha_broad();
  const double pref =
      cfg.m / (4.0 * kPi * kPi * cfg.hbar * cfg.hbar *
               (cfg.t_b * cfg.t_b + ab * ab * cfg.t_a * cfg.t_a * tba * tba));
  const double um = x_b - v0tb, up = x_b + v0tb;
  const double e1 = std::exp(-um * um / dx2);
  const double e2 = std::exp(-up * up / dx2);
  const double e12 = std::exp(-(um * um + up * up) / (2.0 * dx2));
  // (x - a)^2 - (x + a)^2 written as -4 a x so that the pattern is exactly
  // symmetric on a symmetric grid.
  const double arg = cfg.chi_broad() * (-4.0 * v0tb * x_b) / (2.0 * dx2) +
                     cfg.beta() * (-4.0 * cfg.x0 * x_b) / tba - alpha_ab;
  return pref * (e1 + e2 + 2.0 * e12 * std::cos(arg));
}

/// Reduced density valid when the total broadening dominates: a single
/// Gaussian factor times cos(delta'/2), delta' = 2 m x_b x0/(hbar (t_a - t_b))
/// + alpha_AB. Can be negative; it locates fringes and is not a probability.
inline double density_reduced(const TwoSlitConfig& cfg, double x_b, double alpha_ab) {
  const double tba = cfg.t_b - cfg.t_a;
  const double ab = cfg.alpha_broad();
  const double dx = cfg.delta_x();
  const double pref = cfg.m * std::exp(-cfg.x0 * cfg.x0 / (dx * dx)) /
                      (kPi * kPi * cfg.hbar * cfg.hbar *
                       (cfg.t_b * cfg.t_b + ab * ab * cfg.t_a * cfg.t_a * tba * tba));
  const double delta = 2.0 * cfg.m * x_b * cfg.x0 / (cfg.hbar * (cfg.t_a - cfg.t_b)) + alpha_ab;
  return pref * std::cos(delta / 2.0);
}

struct Pattern {
  std::vector<double> x;
  std::vector<double> values;
  TwoSlitConfig config;
  double alpha = 0.0;

  std::size_t size() const { return x.size(); }
  double spacing() const { return x.size() > 1 ? x[1] - x[0] : 0.0; }
};

inline constexpr int kDefaultGrid = 4096;
inline constexpr double kDefaultHalfWidthInDeltaX = 20.0;

/// Samples density() on x_i = W (2i - (n-1)) / (n-1), i = 0..n-1. The grid
/// is exactly symmetric about 0.
inline Pattern pattern(const TwoSlitConfig& cfg, double alpha_ab, double half_width,
                       int n_grid = kDefaultGrid) {
  cfg.validate();
  if (!std::isfinite(alpha_ab)) throw InvalidArgument("alpha_AB must be finite");
  if (n_grid < 64) throw InvalidArgument("pattern needs n_grid >= 64");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw InvalidArgument("pattern half width must be > 0");
  }
  Pattern p;
  p.config = cfg;
  p.alpha = alpha_ab;
  const auto n = static_cast<std::size_t>(n_grid);
  p.x.resize(n);
  p.values.resize(n);
  const double nm1 = static_cast<double>(n_grid - 1);
  parallel_for(n, [&](std::size_t i) {
    p.x[i] = half_width * (2.0 * static_cast<double>(i) - nm1) / nm1;
    p.values[i] = density(cfg, p.x[i], alpha_ab);
  });
  return p;
}

/// Pattern on the default grid: 4096 points over |x_b| <= 20 delta_x.
inline Pattern pattern(const TwoSlitConfig& cfg, double alpha_ab) {
  cfg.validate();
  return pattern(cfg, alpha_ab, kDefaultHalfWidthInDeltaX * cfg.delta_x(), kDefaultGrid);
}

/// (L lambda_bar / d) alpha_AB.
inline double ab_shift_analytic(double L, double lambda_bar, double d, double alpha_ab) {
  if (!(d > 0.0)) throw InvalidArgument("ab_shift_analytic: d must be > 0");
  return L * lambda_bar / d * alpha_ab;
}

/// Same shift from the dipole line density lambda = flux/4pi and the charge
/// ratio q/(hbar c).
inline double ab_shift_from_dipole_density(double L, double lambda_bar, double d,
                                           double q_over_hbar_c, double lambda) {
  return ab_shift_analytic(L, lambda_bar, d, kFourPi * q_over_hbar_c * lambda);
}

inline double ab_shift_analytic(const TwoSlitConfig& cfg, double alpha_ab) {
  cfg.validate();
  return ab_shift_analytic(cfg.L(), cfg.lambda_bar(), cfg.d(), alpha_ab);
}

namespace detail {

inline double parabolic_offset(double ym, double y0, double yp) {
  const double den = ym - 2.0 * y0 + yp;
  if (den == 0.0) return 0.0;
  return 0.5 * (ym - yp) / den;
}

/// Slowly varying part of v: the Fourier series of v over the grid window
/// truncated to wavenumbers below half the fringe wavenumber. The pattern
/// vanishes at the window edges, so the implied periodic extension is
/// harmless.
inline std::vector<double> envelope_trend(const std::vector<double>& x,
                                          const std::vector<double>& v, double period) {
  const std::size_t n = v.size();
  const double span = (x.back() - x.front()) * static_cast<double>(n) / static_cast<double>(n - 1);
  const auto bins = static_cast<int>(std::floor(0.5 * span / period));
  std::vector<double> out(n, 0.0);
  for (int j = 0; j <= bins; ++j) {
    const double om = kTwoPi * j / span;
    double c = 0.0, s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      c += v[i] * std::cos(om * x[i]);
      s += v[i] * std::sin(om * x[i]);
    }
    const double w = (j == 0 ? 1.0 : 2.0) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] += w * (c * std::cos(om * x[i]) + s * std::sin(om * x[i]));
  }
  return out;
}

/// Fringe signal with the envelope divided out: v / trend - 1.
inline std::vector<double> normalized_fringes(const Pattern& p, double period) {
  const auto trend = envelope_trend(p.x, p.values, period);
  std::vector<double> out(p.values.size(), 0.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (trend[i] > 0.0) out[i] = p.values[i] / trend[i] - 1.0;
  }
  return out;
}

inline void require_same_grid(const Pattern& a, const Pattern& b) {
  if (a.x != b.x) throw InvalidArgument("patterns are sampled on different grids");
  if (a.values.size() != a.x.size() || b.values.size() != b.x.size()) {
    throw InvalidArgument("pattern values do not match the grid");
  }
}

}  // namespace detail

/// Fringe period from the spacing of the density minima inside the region
/// where the pattern exceeds 1e-3 of its maximum. Minima are used because
/// the envelope pulls the maxima towards the centre.
inline double fringe_spacing(const Pattern& p) {
  const auto& y = p.values;
  const std::size_t n = y.size();
  if (n < 3) throw InvalidArgument("fringe_spacing: pattern too short");
  const double top = *std::max_element(y.begin(), y.end());
  std::vector<double> minima;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (y[i] < y[i - 1] && y[i] <= y[i + 1]) {
      const double neighbour = std::max(y[i - 1], y[i + 1]);
      if (neighbour < 1e-3 * top) continue;
      minima.push_back(p.x[i] + detail::parabolic_offset(y[i - 1], y[i], y[i + 1]) * p.spacing());
    }
  }
  if (minima.size() < 3) throw ResolutionError("fringe_spacing: fewer than 3 resolved fringes");
  std::vector<double> gaps;
  for (std::size_t i = 1; i < minima.size(); ++i) gaps.push_back(minima[i] - minima[i - 1]);
  std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
  return gaps[gaps.size() / 2];
}

struct ShiftMeasurement {
  double shift = 0.0;   ///< in (-period/2, period/2]
  double period = 0.0;  ///< fringe period measured on the reference pattern
};

/// Shift Delta with on(x_b) ~ off(x_b + Delta), the displacement of the
/// observation point x_b -> x_b + Delta. Found from the peak of the
/// Hann-weighted cross-correlation of the fringes (envelope divided out)
/// over two periods on either side of the centre, refined by a parabola
/// through the peak and its neighbours, and reduced to the shift of
/// smallest magnitude. The envelope does not move with the fringes, so
/// correlating the raw densities would pull the peak towards zero.
inline ShiftMeasurement measure_shift(const Pattern& off, const Pattern& on) {
  detail::require_same_grid(off, on);
  const std::size_t n = off.size();
  const double dx = off.spacing();
  if (!(dx > 0.0)) throw InvalidArgument("pattern grid must be increasing");
  ShiftMeasurement r;
  r.period = fringe_spacing(off);
  const auto a = detail::normalized_fringes(on, r.period);
  const auto b = detail::normalized_fringes(off, r.period);

  const auto max_lag = static_cast<std::ptrdiff_t>(std::ceil(0.75 * r.period / dx));
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(2.0 * r.period / dx));
  // Region symmetric about the grid centre.
  const auto centre_hi = static_cast<std::ptrdiff_t>(n / 2);
  const auto centre_lo = static_cast<std::ptrdiff_t>((n - 1) / 2);
  const std::ptrdiff_t lo = centre_lo - half;
  const std::ptrdiff_t hi = centre_hi + half;
  if (lo - max_lag < 0 || hi + max_lag >= static_cast<std::ptrdiff_t>(n)) {
    throw ResolutionError("measure_shift: grid too narrow for the fringe period");
  }

  // Hann taper over the region: a partial fringe at either end would
  // otherwise tilt the correlation peak.
  std::vector<double> taper(static_cast<std::size_t>(hi - lo + 1));
  for (std::size_t i = 0; i < taper.size(); ++i) {
    const double t = (static_cast<double>(i) + 1.0) / (static_cast<double>(taper.size()) + 1.0);
    taper[i] = std::sin(kPi * t) * std::sin(kPi * t);
  }
  std::vector<double> corr(static_cast<std::size_t>(2 * max_lag + 1));
  parallel_for(corr.size(), [&](std::size_t k) {
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(k) - max_lag;
    double acc = 0.0;
    for (std::ptrdiff_t i = lo; i <= hi; ++i) {
      acc += taper[static_cast<std::size_t>(i - lo)] * a[static_cast<std::size_t>(i)] *
             b[static_cast<std::size_t>(i + s)];
    }
    corr[k] = acc;
  });
  std::size_t best = 1;
  for (std::size_t k = 1; k + 1 < corr.size(); ++k) {
    if (corr[k] > corr[best]) best = k;
  }
  const double frac = detail::parabolic_offset(corr[best - 1], corr[best], corr[best + 1]);
  const double shift = (static_cast<double>(best) - static_cast<double>(max_lag) + frac) * dx;
  r.shift = shift - r.period * std::ceil(shift / r.period - 0.5);
  return r;
}

inline double ab_shift_measured(const Pattern& off, const Pattern& on) {
  return measure_shift(off, on).shift;
}

/// Difference a - b reduced to (-period/2, period/2].
inline double wrap_to_period(double a, double period) {
  return a - period * std::ceil(a / period - 0.5);
}

struct QuantizationReport {
  std::complex<double> phase_factor{1.0, 0.0};
  bool observable = false;
};

/// Phase factor between the two partial waves for quantized charge
/// q = n_e e and flux. Normal flux: N flux quanta, factor exp(2 pi i n_e N)
/// = 1. Superconducting: N half quanta and q = e, factor exp(i pi N).
inline QuantizationReport quantization_report(long n_e, long N, bool superconducting) {
  QuantizationReport r;
  if (superconducting) {
    const bool odd = (N % 2) != 0;
    r.phase_factor = odd ? std::complex<double>{-1.0, 0.0} : std::complex<double>{1.0, 0.0};
    r.observable = odd;
  } else {
    (void)n_e;
    r.phase_factor = {1.0, 0.0};
    r.observable = false;
  }
  return r;
}

}  // namespace fluxline
