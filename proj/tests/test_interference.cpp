#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "fluxline/interference.hpp"
#include "oracles.hpp"

using namespace fluxline;

namespace {

std::complex<double> psi_ref(const TwoSlitConfig& c, double x, int sign) {
  return oracle::psi(c.x0, c.b, c.t_a, c.t_b, c.m, x, sign);
}

// Wavenumber of the fringes: the x-derivative of the phase difference
// between the two partial waves, from their explicit exponents.
double fringe_wavenumber(const TwoSlitConfig& c) {
  const double cl = c.b * c.t_b / c.t_a, qu = (c.t_b - c.t_a) / (c.m * c.b);
  const double chi = cl / qu, dx2 = cl * cl + qu * qu;
  return 2.0 * chi * (c.x0 / c.t_a) * c.t_b / dx2 + 2.0 * c.m * c.x0 / (c.t_b - c.t_a);
}

double max_value(const Pattern& p) { return *std::max_element(p.values.begin(), p.values.end()); }

std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] >= y[i + 1]) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> local_extrema(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) {
    if ((y[i] > y[i - 1] && y[i] >= y[i + 1]) || (y[i] < y[i - 1] && y[i] <= y[i + 1])) out.push_back(i);
  }
  return out;
}

}  // namespace

TEST(TwoSlitConfig, DerivedQuantities) {
  const TwoSlitConfig c;
  EXPECT_DOUBLE_EQ(c.v0(), 0.5);
  EXPECT_DOUBLE_EQ(c.alpha_broad(), 100.0);
  EXPECT_DOUBLE_EQ(c.beta(), 0.5);
  EXPECT_NEAR(c.delta_x(), std::sqrt(0.3 * 0.3 + 20.0 * 20.0), 1e-12);
  EXPECT_NEAR(c.chi_broad(), 0.3 / 20.0, 1e-15);
  EXPECT_DOUBLE_EQ(c.L(), 2.0);
  EXPECT_DOUBLE_EQ(c.lambda_bar(), 1.0);
  EXPECT_DOUBLE_EQ(c.d(), 1.0);
}

TEST(TwoSlitConfig, Validation) {
  TwoSlitConfig c;
  c.t_b = c.t_a;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = TwoSlitConfig{};
  c.b = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = TwoSlitConfig{};
  c.x0 = -1.0;
  EXPECT_THROW(density(c, 0.0, 0.0), InvalidArgument);
}

TEST(PsiOneSlit, MatchesIndependentEvaluation) {
  const TwoSlitConfig c{0.7, 0.2, 1.5, 4.0, 1.3, 1.0};
  for (double x : {-30.0, -2.5, 0.0, 1.0, 17.0}) {
    for (int s : {1, -1}) {
      const auto a = psi_one_slit(c, x, s), b = psi_ref(c, x, s);
      EXPECT_LT(std::abs(a - b), 1e-12 * std::abs(b)) << x << " " << s;
      EXPECT_GT(std::abs(a), 0.0);
      EXPECT_TRUE(std::isfinite(std::abs(a)));
    }
  }
  EXPECT_THROW(psi_one_slit(c, 0.0, 0), InvalidArgument);
}

TEST(PsiOneSlit, MirrorSymmetry) {
  const TwoSlitConfig c;
  for (double x : {-7.0, 0.3, 12.0}) {
    EXPECT_LT(std::abs(psi_one_slit(c, -x, -1) - psi_one_slit(c, x, 1)), 1e-15 * std::abs(psi_one_slit(c, x, 1)));
  }
}

TEST(PsiOneSlit, PrefactorModulus) {
  const TwoSlitConfig c;
  const double tba = c.t_b - c.t_a;
  const double mod = std::sqrt(c.m / (2 * oracle::pi * std::abs(std::complex<double>(c.t_b, c.alpha_broad() * c.t_a * tba))));
  // at x_b = v0 t_b the Gaussian factor is 1
  EXPECT_NEAR(std::abs(psi_one_slit(c, c.v0() * c.t_b, 1)), mod, 1e-14);
}

TEST(Density, ProportionalToSuperposition) {
  const TwoSlitConfig c;
  for (double alpha : {0.0, 0.7, oracle::pi}) {
    // one constant for all x; at alpha = pi the centre is a node of both
    const double peak = std::norm(2.0 * psi_ref(c, 0.0, 1));
    const double ratio0 = density(c, 0.0, 0.0) / peak;
    for (double x : {-15.0, -3.3, 0.0, 0.9, 8.0, 40.0}) {
      const auto psi = psi_ref(c, x, 1) + std::polar(1.0, alpha) * psi_ref(c, x, -1);
      EXPECT_NEAR(density(c, x, alpha), ratio0 * std::norm(psi), 1e-9 * ratio0 * peak) << alpha << " " << x;
    }
  }
}

TEST(Density, ZeroFluxAndFullPeriod) {
  const TwoSlitConfig c;
  const auto off = pattern(c, 0.0);
  const auto full = pattern(c, 2 * oracle::pi);
  const double top = max_value(off);
  for (std::size_t i = 0; i < off.size(); ++i) {
    EXPECT_EQ(off.values[i], density(c, off.x[i], 0.0));
    EXPECT_NEAR(full.values[i], off.values[i], 1e-12 * top);
  }
}

TEST(Density, PeriodicInAlpha) {
  const TwoSlitConfig c;
  for (double alpha : {0.3, 2.0, -1.1}) {
    for (double x : {-9.0, 0.0, 4.2}) {
      EXPECT_NEAR(density(c, x, alpha + 2 * oracle::pi), density(c, x, alpha), 1e-12 * density(c, 0.0, 0.0));
    }
  }
}

TEST(Density, HalfFluxQuantumFlipsCentralFringe) {
  const TwoSlitConfig c;
  const auto p1 = psi_ref(c, 0.0, 1), p2 = psi_ref(c, 0.0, -1);
  const double envelope = std::norm(p1) + std::norm(p2);
  const double cross = 2.0 * std::real(p1 * std::conj(p2));
  ASSERT_GT(cross, 0.0);
  const double scale = density(c, 0.0, 0.0) / (envelope + cross);
  EXPECT_NEAR(density(c, 0.0, oracle::pi), scale * (envelope - cross), 1e-12 * density(c, 0.0, 0.0));
}

TEST(Pattern, EvenNonNegativeAndGridShape) {
  const TwoSlitConfig c;
  const auto p = pattern(c, 0.0);
  ASSERT_EQ(p.size(), 4096u);
  EXPECT_NEAR(p.x.back(), 20.0 * c.delta_x(), 1e-12);
  const double top = max_value(p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    EXPECT_GE(p.values[i], 0.0);
    EXPECT_NEAR(p.values[i], p.values[p.size() - 1 - i], 1e-12 * top);
    if (i > 0) {
      EXPECT_GT(p.x[i], p.x[i - 1]);
    }
  }
  EXPECT_THROW(pattern(c, 0.0, 10.0, 63), InvalidArgument);
}

TEST(Pattern, FringeSpacing) {
  const TwoSlitConfig c;
  const double expect = 2 * oracle::pi * c.L() * c.lambda_bar() / c.d();
  EXPECT_NEAR(fringe_spacing(pattern(c, 0.0)), expect, 0.03 * expect);
  EXPECT_NEAR(fringe_spacing(pattern(c, 0.0)), 2 * oracle::pi / fringe_wavenumber(c), 1e-3 * expect);
}

TEST(ReducedDensity, ExtremaMatchFullFormUnderBroadEnvelope) {
  // Broad envelope (delta_x ~ 200) so that the envelope barely moves the
  // maxima of the full form; compare the central extrema. The reduced
  // form carries the flux phase with the opposite sign, so it is compared
  // with the full form at -alpha.
  TwoSlitConfig c;
  c.b = 0.01;
  const double w = 60.0;
  const int n = 4096;
  for (double alpha : {0.0, 1.0}) {
    const auto full = pattern(c, -alpha, w, n);
    std::vector<double> reduced(full.x.size());
    for (std::size_t i = 0; i < reduced.size(); ++i) reduced[i] = density_reduced(c, full.x[i], alpha);
    auto near_centre = [&](std::vector<std::size_t> idx) {
      std::vector<std::size_t> out;
      for (auto i : idx) {
        if (std::abs(full.x[i]) < 26.0) out.push_back(i);
      }
      return out;
    };
    // cos(delta'/2) has an extremum at every full-form maximum
    const auto a = near_centre(local_maxima(full.values));
    const auto b = near_centre(local_extrema(reduced));
    ASSERT_EQ(a.size(), b.size()) << alpha;
    ASSERT_GE(a.size(), 4u);
    for (std::size_t k = 0; k < a.size(); ++k) {
      EXPECT_LE(std::abs(static_cast<long>(a[k]) - static_cast<long>(b[k])), 1) << alpha << " " << k;
    }
  }
}

TEST(AnalyticShift, Substitution) {
  EXPECT_NEAR(ab_shift_analytic(1.0, 0.01, 0.1, oracle::pi), 0.1 * oracle::pi, 1e-15);
  EXPECT_EQ(ab_shift_analytic(1.0, 0.01, 0.1, 0.0), 0.0);
  const double lambda = 0.37;  // dipole density, flux = 4 pi lambda
  EXPECT_NEAR(ab_shift_from_dipole_density(1.0, 0.01, 0.1, 1.0, lambda),
              ab_shift_analytic(1.0, 0.01, 0.1, 4 * oracle::pi * lambda), 1e-15);
  EXPECT_THROW(ab_shift_analytic(1.0, 0.01, 0.0, 1.0), InvalidArgument);
  const TwoSlitConfig c;
  EXPECT_DOUBLE_EQ(ab_shift_analytic(c, 1.0), 2.0);
}

TEST(MeasuredShift, IdenticalPatternsGiveZero) {
  const auto p = pattern(TwoSlitConfig{}, 0.0);
  EXPECT_LE(std::abs(ab_shift_measured(p, p)), p.spacing() / 100.0);
}

TEST(MeasuredShift, MatchesFringeTranslation) {
  const TwoSlitConfig c;
  const auto off = pattern(c, 0.0);
  const double k = fringe_wavenumber(c);
  for (double alpha : {0.5, oracle::pi / 2, -2.0}) {
    const auto m = measure_shift(off, pattern(c, alpha));
    EXPECT_NEAR(m.shift, oracle::phase_translation(k, alpha), 2e-3 * std::abs(m.shift)) << alpha;
  }
}

TEST(MeasuredShift, AnalyticValueModuloFringe) {
  const TwoSlitConfig c;
  const auto off = pattern(c, 0.0);
  for (double alpha : {oracle::pi / 2, oracle::pi, 3 * oracle::pi / 2}) {
    const auto m = measure_shift(off, pattern(c, alpha));
    const double analytic = ab_shift_analytic(c, alpha);
    EXPECT_LT(std::abs(wrap_to_period(m.shift - analytic, m.period)), 0.02 * std::abs(analytic)) << alpha;
  }
  const auto m = measure_shift(off, pattern(c, 2 * oracle::pi));
  EXPECT_LT(std::abs(wrap_to_period(m.shift, m.period)), 0.01 * m.period);
}

TEST(MeasuredShift, LinearInAlpha) {
  const TwoSlitConfig c;
  const auto off = pattern(c, 0.0);
  std::vector<double> a, s;
  for (int i = -4; i <= 4; ++i) {
    a.push_back(0.9 * oracle::pi * i / 4.0);
    s.push_back(ab_shift_measured(off, pattern(c, a.back())));
  }
  double saa = 0, sas = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    saa += a[i] * a[i];
    sas += a[i] * s[i];
  }
  const double slope = sas / saa;
  const double expect = c.L() * c.lambda_bar() / c.d();
  EXPECT_NEAR(slope, expect, 0.03 * expect);
}

TEST(MeasuredShift, DifferentGridsAreRejected) {
  const TwoSlitConfig c;
  EXPECT_THROW(ab_shift_measured(pattern(c, 0.0), pattern(c, 1.0, 300.0, 4096)), InvalidArgument);
}

TEST(Quantization, ParityRule) {
  auto r = quantization_report(1, 2, true);
  EXPECT_EQ(r.phase_factor, std::complex<double>(1.0, 0.0));
  EXPECT_FALSE(r.observable);
  r = quantization_report(1, 3, true);
  EXPECT_EQ(r.phase_factor, std::complex<double>(-1.0, 0.0));
  EXPECT_TRUE(r.observable);
  for (long ne : {-2L, 1L, 5L}) {
    for (long n : {-3L, 0L, 1L, 4L}) {
      r = quantization_report(ne, n, false);
      EXPECT_EQ(r.phase_factor, std::complex<double>(1.0, 0.0));
      EXPECT_FALSE(r.observable);
    }
  }
}

TEST(Quantization, FactorMatchesExponential) {
  for (long n = -4; n <= 6; ++n) {
    const auto r = quantization_report(1, n, true);
    const auto e = std::exp(std::complex<double>(0.0, oracle::pi * n));
    EXPECT_NEAR(std::abs(r.phase_factor - e), 0.0, 1e-12) << n;
  }
}
