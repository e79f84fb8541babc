#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fluxline/parallel.hpp"
#include "fluxline/topology.hpp"
#include "oracles.hpp"

using namespace fluxline;

namespace {

ClosedCurve unit_xy(int n = kDefaultSamples) { return make_circle({0, 0, 0}, 1.0, {0, 0, 1}, n); }
ClosedCurve hopf_partner(int n = kDefaultSamples) { return make_circle({1, 0, 0}, 1.0, {0, 1, 0}, n); }

ClosedCurve rectangle_xz(double x0, double x1, double z0, double z1, int per_side = 1) {
  const Point3 c[] = {{x0, 0, z0}, {x0, 0, z1}, {x1, 0, z1}, {x1, 0, z0}};
  return make_polygon(c, per_side);
}

}  // namespace

TEST(GaussLinking, HopfAgreesWithIndependentDiskCount) {
  const auto c = unit_xy(), k = hopf_partner();
  const auto r = gauss_linking(k, c);
  const long oracle_count = oracle::disk_crossings(k, {0, 0, 0}, 1.0);
  EXPECT_EQ(std::abs(oracle_count), 1);
  EXPECT_EQ(r.rounded, oracle_count);
  EXPECT_EQ(crossing_linking(k, span_surface(c)), oracle_count);
  EXPECT_LT(r.residual, 1e-6);
}

TEST(GaussLinking, CoaxialCirclesUnlinked) {
  const auto c = unit_xy();
  const auto r = gauss_linking(c, c.translated({0, 0, 10}));
  EXPECT_EQ(r.rounded, 0);
  EXPECT_LT(std::abs(r.raw), 1e-6);
}

TEST(GaussLinking, ReversalNegatesAndSwapPreserves) {
  const auto c = unit_xy(), k = hopf_partner();
  const double raw = gauss_linking(c, k).raw;
  EXPECT_NEAR(gauss_linking(c.reversed(), k).raw, -raw, 1e-12);
  EXPECT_NEAR(gauss_linking(c, k.reversed()).raw, -raw, 1e-12);
  EXPECT_NEAR(gauss_linking(c.reversed(), k.reversed()).raw, raw, 1e-12);
  EXPECT_NEAR(gauss_linking(k, c).raw, raw, 1e-12);
}

TEST(GaussLinking, TouchingCurvesAreRejected) {
  const auto c = unit_xy(64);
  EXPECT_THROW(gauss_linking(c, c.translated({2, 0, 0})), ClearanceError);
}

TEST(GaussLinking, UnderResolvedIntegralIsReported) {
  EXPECT_THROW(gauss_linking(unit_xy(64), hopf_partner(64), 1e-14), ResolutionError);
  EXPECT_THROW(gauss_linking(unit_xy(64), hopf_partner(64), 0.0), InvalidArgument);
}

TEST(GaussLinking, IndependentOfThreadCount) {
  const auto c = make_torus_knot(1, 2, 1.0, 0.4, 512), k = unit_xy(512);
  set_thread_count(1);
  const double a = gauss_linking_integral(c, k);
  set_thread_count(5);
  const double b = gauss_linking_integral(c, k);
  set_thread_count(0);
  EXPECT_EQ(a, b);
}

TEST(GaussLinking, RandomPairsMatchCrossingCount) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto base = unit_xy(512);
    const Point3 centre{1.0 + 0.6 * u(rng), 0.3 * u(rng), 0.3 * u(rng)};
    const Vec3 normal = normalized(Vec3{0.3 * u(rng), 1.0, 0.3 * u(rng)});
    const auto k = make_circle(centre, 0.8 + 0.3 * u(rng), normal, 512);
    if (!(min_distance(base, k) > 0.05)) continue;
    EXPECT_EQ(gauss_linking(k, base).rounded, crossing_linking(k, span_surface(base))) << trial;
    ++checked;
  }
  EXPECT_GE(checked, 10);
}

TEST(SpanSurface, DiskAreaAndTriangleCount) {
  const auto s = span_surface(unit_xy());
  EXPECT_EQ(s.size(), 1024u);
  EXPECT_NEAR(s.area(), oracle::pi, 1e-4);
  for (std::size_t t = 0; t < s.size(); ++t) EXPECT_GT(s.vector_area(t).z, 0.0);
}

TEST(SpanSurface, TriangleCurve) {
  const ClosedCurve tri({{0, 0, 0}, {2, 0, 0}, {0, 1, 0}});
  const auto s = span_surface(tri);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_NEAR(s.area(), 1.0, 1e-12);
}

TEST(SpanSurface, NonStarShapedCurveFails) {
  // A horseshoe: its vertex centroid lies outside the band.
  std::vector<Point3> pts;
  const int m = 64;
  for (int i = 0; i <= m; ++i) {
    const double a = 0.2 + 5.8 * i / m;
    pts.push_back({std::cos(a), std::sin(a), 0});
  }
  for (int i = m; i >= 0; --i) {
    const double a = 0.2 + 5.8 * i / m;
    pts.push_back({0.9 * std::cos(a), 0.9 * std::sin(a), 0});
  }
  EXPECT_THROW(span_surface(ClosedCurve(pts)), DegenerateGeometry);
}

TEST(CrossingLinking, SinglePiercingAlongNormal) {
  const auto s = span_surface(unit_xy());
  EXPECT_EQ(crossing_linking(rectangle_xz(0.5, 3.0, -1, 1), s), 1);
  EXPECT_EQ(crossing_linking(rectangle_xz(0.5, 3.0, -1, 1).reversed(), s), -1);
}

TEST(CrossingLinking, FarLoopDoesNotCross) {
  const auto s = span_surface(unit_xy());
  EXPECT_EQ(crossing_linking(unit_xy().translated({5, 5, 5}), s), 0);
}

TEST(CrossingLinking, OppositePiercingsCancel) {
  const auto s = span_surface(unit_xy());
  const auto loop = rectangle_xz(-0.5, 0.5, -1, 1);
  EXPECT_EQ(crossing_linking(loop, s), 0);
  const Point3 up[] = {{-0.5, 0, -1}, {-0.5, 0, 1}};
  const Point3 down[] = {{0.5, 0, 1}, {0.5, 0, -1}};
  EXPECT_EQ(open_path_crossings(up, s), 1);
  EXPECT_EQ(open_path_crossings(down, s), -1);
  EXPECT_EQ(oracle::disk_crossings(loop, {0, 0, 0}, 1.0), 0);
}

TEST(CrossingLinking, VertexOnSurfaceIsPerturbed) {
  const auto s = span_surface(unit_xy(256));
  // second vertex lies exactly in the disk
  const ClosedCurve loop({{0.3, 0.1, -1}, {0.3, 0.1, 0}, {0.3, 0.1, 1}, {3, 0.1, 1}, {3, 0.1, -1}});
  EXPECT_EQ(crossing_linking(loop, s), 1);
}

TEST(CrossingLinking, PathInsideTheSurfaceIsShiftedOff) {
  // Coplanar with the disk; the generic shift moves it to one side.
  const auto s = span_surface(unit_xy(64));
  const ClosedCurve flat({{-0.5, -0.5, 0}, {0.5, -0.5, 0}, {0.5, 0.5, 0}, {-0.5, 0.5, 0}});
  EXPECT_EQ(crossing_linking(flat, s), 0);
}

TEST(SolidAngle, AxialValueMatchesClosedFormAndDirectQuadrature) {
  const auto s = span_surface(unit_xy());
  for (double z : {0.5, 2.0}) {
    const double w = solid_angle({0, 0, z}, s);
    EXPECT_NEAR(std::abs(w), oracle::axial_solid_angle(z), 1e-4) << z;
    // the sign follows (x' - x) . dS'
    const auto coarse = span_surface(unit_xy(64));
    const double q = oracle::solid_angle_quadrature({0, 0, z}, coarse, 40);
    EXPECT_NEAR(solid_angle({0, 0, z}, coarse), q, 1e-3 * std::abs(q)) << z;
    EXPECT_LT(w, 0.0);
    EXPECT_GT(solid_angle({0, 0, -z}, s), 0.0);
  }
}

TEST(SolidAngle, FarFieldIsTiny) {
  const auto s = span_surface(unit_xy());
  const double w = solid_angle({0, 0, 1e3}, s);
  EXPECT_LT(std::abs(w), 1e-5);
  EXPECT_NEAR(std::abs(w), oracle::pi / 1e6, 1e-8);
}

TEST(SolidAngle, JumpsByFourPiOnlyInsideTheDisk) {
  const auto s = span_surface(unit_xy());
  const double eps = 1e-7;
  const double inside = solid_angle({0.3, 0.2, -eps}, s) - solid_angle({0.3, 0.2, eps}, s);
  EXPECT_NEAR(inside, 4 * oracle::pi, 1e-3);
  const double outside = solid_angle({2.0, 0.1, -eps}, s) - solid_angle({2.0, 0.1, eps}, s);
  EXPECT_NEAR(outside, 0.0, 1e-3);
  EXPECT_THROW(solid_angle({0.3, 0.2, 0.0}, s), ClearanceError);
}

TEST(GradSolidAngle, MatchesFiniteDifferences) {
  const auto c = unit_xy();
  const auto s = span_surface(c);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const double h = 1e-4;
  int done = 0;
  while (done < 20) {
    const Point3 x{u(rng), u(rng), u(rng)};
    if (point_curve_distance(x, c) < 0.3 || std::abs(x.z) < 0.05) continue;
    Vec3 fd;
    for (int k = 0; k < 3; ++k) {
      Vec3 e;
      e[k] = h;
      fd[k] = (solid_angle(x + e, s) - solid_angle(x - e, s)) / (2 * h);
    }
    const Vec3 g = grad_solid_angle(x, c);
    EXPECT_LT(norm(g - fd), 1e-3 * norm(fd)) << done;
    ++done;
  }
}

TEST(GradSolidAngle, AxialAndFarFieldBehaviour) {
  const auto c = unit_xy();
  const Vec3 g = grad_solid_angle({0, 0, 0.7}, c);
  EXPECT_LT(std::hypot(g.x, g.y), 1e-8);
  EXPECT_GT(std::abs(g.z), 0.1);
  const Vec3 dir = normalized(Vec3{0.3, -0.5, 0.8});
  const double ratio = norm(grad_solid_angle(dir * 50.0, c)) / norm(grad_solid_angle(dir * 100.0, c));
  EXPECT_NEAR(ratio, 8.0, 0.4);
  EXPECT_THROW(grad_solid_angle(c[3], c), ClearanceError);
}

TEST(GradSolidAngle, LoopIntegralVanishesAwayFromSurface) {
  const auto c = unit_xy();
  const auto loop = make_circle({2.0, 0, 0}, 0.8, {0, 1, 0}, 512);
  ASSERT_EQ(crossing_linking(loop, span_surface(c)), 0);
  double sum = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    sum += dot(grad_solid_angle(loop.node(i), c), loop.node_delta(i));
  }
  EXPECT_LT(std::abs(sum), 1e-6);
}
