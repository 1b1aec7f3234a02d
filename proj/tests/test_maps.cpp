#include <cmath>
#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "bykov/fixedpoints.hpp"
#include "bykov/lyapunov.hpp"
#include "bykov/maps.hpp"

using namespace bykov;

namespace {

ModelParams canon(double delta, double K, double lambda) { return ModelParams::from_delta_K(delta, K, lambda); }

/// delta = 2 and K = 1 exactly.
ModelParams unit(double lambda) { return ModelParams(3, 2, 4, 3, lambda); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(ModelParams, DerivedQuantities) {
  const ModelParams p(2.0, 1.0, 3.0, 1.0, 0.0);
  EXPECT_DOUBLE_EQ(p.delta1(), 2.0);
  EXPECT_DOUBLE_EQ(p.delta2(), 3.0);
  EXPECT_DOUBLE_EQ(p.delta(), 6.0);
  EXPECT_DOUBLE_EQ(p.K(), 3.0);
}

TEST(ModelParams, RejectsInvalidEigenvalueData) {
  EXPECT_THROW(ModelParams(1.0, 2.0, 3.0, 1.0, 0.0), Error);
  EXPECT_THROW(ModelParams(2.0, 1.0, 1.0, 1.0, 0.0), Error);
  EXPECT_THROW(ModelParams(2.0, 0.0, 3.0, 1.0, 0.0), Error);
  EXPECT_THROW(ModelParams(2.0, 1.0, 3.0, 1.0, 1.0), Error);
  EXPECT_THROW(ModelParams(2.0, 1.0, 3.0, 1.0, -0.1), Error);
}

TEST(ModelParams, CanonicalSplitRealizesDeltaAndK) {
  for (double delta : {1.5, 2.0, 4.0, 9.0})
    for (double K : {0.2, 1.0, 3.0}) {
      const ModelParams p = canon(delta, K, 0.0);
      EXPECT_LT(rel(p.delta(), delta), 1e-14);
      EXPECT_LT(rel(p.K(), K), 1e-14);
      EXPECT_GT(p.C1(), p.E1());
      EXPECT_GT(p.C2(), p.E2());
    }
}

TEST(SectionPoint, ReducesAngleAndRejectsDegenerateHeights) {
  const SectionPoint q = SectionPoint::make(-0.5, 0.3);
  EXPECT_NEAR(q.x, two_pi - 0.5, 1e-15);
  EXPECT_THROW(SectionPoint::make(0.0, 0.0), Error);
  EXPECT_THROW(SectionPoint::make(0.0, 1.0), Error);
}

// ---------------------------------------------------------------- local maps

TEST(LocalExit, Sigma1AtExponentialInput) {
  const ModelParams p(2.0, 1.0, 3.0, 1.0, 0.0);
  const OutPoint out = local_exit(Node::Sigma1, WallPoint{0.0, std::exp(-1.0)}, p);
  const auto& d = std::get<DiskPoint>(out);
  EXPECT_NEAR(d.r, std::exp(-2.0), 1e-15);
  EXPECT_NEAR(d.phi, 1.0, 1e-15);
  EXPECT_TRUE(d.upper);
}

TEST(LocalExit, Sigma1ContinuousAtSectionEdge) {
  const ModelParams p(2.0, 1.0, 3.0, 1.0, 0.0);
  const DiskPoint d = exit_sigma1(0.0, std::nextafter(1.0, 0.0), p);
  EXPECT_NEAR(d.r, 1.0, 1e-15);
  EXPECT_NEAR(std::min(d.phi, two_pi - d.phi), 0.0, 1e-15);
}

TEST(LocalExit, Sigma2AtExponentialInput) {
  const ModelParams p(2.0, 1.0, 3.0, 1.0, 0.0);
  const OutPoint out = local_exit(Node::Sigma2, DiskPoint{std::exp(-1.0), 0.0, true}, p);
  const auto& w = std::get<WallPoint>(out);
  EXPECT_NEAR(w.x, 1.0, 1e-15);
  EXPECT_NEAR(w.y, std::exp(-3.0), 1e-16);
}

TEST(LocalExit, BottomHalfKeepsSign) {
  const ModelParams p(2.0, 1.0, 3.0, 1.0, 0.0);
  const DiskPoint d = exit_sigma1(0.0, -std::exp(-1.0), p);
  EXPECT_FALSE(d.upper);
  const WallPoint w = exit_sigma2(d, p);
  EXPECT_LT(w.y, 0.0);
}

TEST(LocalExit, ZeroCoordinateIsDegenerate) {
  const ModelParams p(2.0, 1.0, 3.0, 1.0, 0.0);
  try {
    exit_sigma1(0.3, 0.0, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateInput);
  }
  EXPECT_THROW(exit_sigma2(DiskPoint{0.0, 0.1, true}, p), Error);
}

TEST(Transition, OneToTwoIsIdentity) {
  const DiskPoint q{0.3, 1.7, false};
  const DiskPoint r = transition_1to2(q);
  EXPECT_EQ(r.r, q.r);
  EXPECT_EQ(r.phi, q.phi);
  EXPECT_EQ(r.upper, q.upper);
}

TEST(Transition, TwoToOneAddsSineShift) {
  const WallPoint w{1.2, 0.05};
  const WallPoint a = transition_2to1(w, canon(2, 1, 0.0));
  EXPECT_EQ(a.y, 0.05);
  const WallPoint b = transition_2to1(WallPoint{pi / 2, 0.0}, canon(2, 1, 0.01));
  EXPECT_DOUBLE_EQ(b.y, 0.01);
}

// ------------------------------------------------------------------ eta

TEST(FirstHit, EdgeOfSectionIsNearlyIdentity) {
  const ModelParams p = canon(2, 1, 0.0);
  const double y = std::nextafter(1.0, 0.0);
  const WallPoint w = first_hit_eta(SectionPoint{0.7, y}, p);
  EXPECT_NEAR(w.x, 0.7, 1e-15);
  EXPECT_NEAR(w.y, 1.0, 1e-15);
}

TEST(FirstHit, OneFullTurnAtHeightExpMinusTwoPi) {
  const ModelParams p = canon(2, 1, 0.0);
  const WallPoint w = first_hit_eta(SectionPoint{0.0, std::exp(-two_pi)}, p);
  EXPECT_NEAR(angle_diff(w.x, 0.0), 0.0, 1e-13);
  EXPECT_LT(rel(w.y, std::exp(-2 * two_pi)), 1e-13);
}

TEST(FirstHit, SmallKLargeDeltaAgainstExtendedPrecision) {
  using boost::multiprecision::cpp_bin_float_50;
  const ModelParams p = canon(4, 0.2, 0.0);
  const double y = std::exp(-10.0 * pi);
  const WallPoint w = first_hit_eta(SectionPoint{0.0, y}, p);
  const cpp_bin_float_50 yx = cpp_bin_float_50(y);
  const cpp_bin_float_50 expect = yx * yx * yx * yx;
  EXPECT_LT(rel(w.y, static_cast<double>(expect)), 1e-12);
  // angle: -K log y = 0.2 * 10 pi = 2 pi
  EXPECT_NEAR(angle_diff(w.x, 0.0), 0.0, 1e-12);
  const cpp_bin_float_50 e40 = exp(-40 * boost::math::constants::pi<cpp_bin_float_50>());
  EXPECT_LT(rel(w.y, static_cast<double>(e40)), 1e-12);
}

TEST(FirstHit, HeightIndependentOfAngle) {
  const ModelParams p = canon(2, 1, 0.0);
  const double y0 = 0.0123;
  const double ref = first_hit_eta(SectionPoint{0.0, y0}, p).y;
  for (int i = 1; i < 64; ++i) EXPECT_EQ(first_hit_eta(SectionPoint{two_pi * i / 64, y0}, p).y, ref);
}

TEST(FirstHit, OneExtraTurnPerHeightFactor) {
  for (double K : {0.2, 1.0, 2.5}) {
    const ModelParams p = canon(2, K, 0.0);
    for (int n = 1; n <= 3; ++n) {
      const double ytop = std::exp(-two_pi * n / K), ybot = std::exp(-two_pi * (n + 1) / K);
      // walk y downward from ytop to ybot and count wraps of the reduced angle
      const int samples = 4000;
      double prev = first_hit_eta(SectionPoint{0.3, ytop}, p).x;
      int wraps = 0;
      double unwrapped = 0.0;
      for (int i = 1; i <= samples; ++i) {
        const double y = std::exp(std::log(ytop) + (std::log(ybot) - std::log(ytop)) * i / samples);
        const double a = first_hit_eta(SectionPoint{0.3, y}, p).x;
        const double step = angle_diff(a, prev);
        unwrapped += step;
        if (a < prev && step > 0) ++wraps;
        prev = a;
      }
      EXPECT_NEAR(unwrapped, two_pi, 1e-9);
      EXPECT_EQ(wraps, 1);
    }
  }
}

// ------------------------------------------------------------- return map

TEST(ReturnMap, UnperturbedPowerTower) {
  const ModelParams p = canon(2, 1, 0.0);
  SectionPoint q{0.4, 0.5};
  double y = 0.5;
  for (int k = 0; k < 3; ++k) {
    q = return_map(q, p).point();
    y = std::pow(y, 2.0);
    EXPECT_LT(rel(q.y, y), 1e-14);
  }
}

TEST(ReturnMap, ClosedFormFixedPointIsFixed) {
  const ModelParams p = canon(2, 1, 0.01);
  const double y = std::exp(-two_pi);
  const double x = std::asin((y - y * y) / 0.01);
  const ReturnOutcome out = return_map(SectionPoint{x, y}, p);
  EXPECT_LT(std::abs(angle_diff(out.x, x)), 1e-12);
  EXPECT_LT(std::abs(out.y - y), 1e-12);
}

TEST(ReturnMap, VanishingSineAtShiftedAngle) {
  const ModelParams p = canon(2, 1, 0.01);
  const ReturnOutcome out = return_map(SectionPoint{0.0, std::exp(-two_pi)}, p);
  EXPECT_NEAR(angle_diff(out.x, 0.0), 0.0, 1e-13);
  EXPECT_NEAR(out.y, std::exp(-2 * two_pi), 1e-12 * 0.01);
}

TEST(ReturnMap, LowerHalfMirrorsUpperHalf) {
  const ModelParams p = canon(2, 1, 0.01);
  const SectionPoint up{1.1, 0.02}, down{1.1, -0.02};
  const ReturnOutcome a = return_map(up, p), b = return_map(down, p);
  EXPECT_EQ(a.x, b.x);
  const double s = 0.01 * std::sin(1.1 - std::log(0.02));
  EXPECT_NEAR(a.y, 0.0004 + s, 1e-16);
  EXPECT_NEAR(b.y, -0.0004 + s, 1e-16);
}

TEST(ReturnMap, ImageOutsideSectionEscapes) {
  const ModelParams p = canon(2, 1, 0.9);
  const double y = 0.9999;
  const double x = pi / 2 + std::log(y);  // image angle pi/2
  try {
    return_map(SectionPoint{x, y}, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Escaped);
  }
  EXPECT_EQ(advance(SectionPoint{x, y}, p).status, Termination::Escaped);
}

TEST(ReturnMap, ZeroHeightIsDegenerate) {
  EXPECT_THROW(return_map(SectionPoint{0.0, 0.0}, canon(2, 1, 0.01)), Error);
}

TEST(ReturnTime, ClosedForms) {
  const ModelParams p = canon(2, 1.7, 0.01);
  EXPECT_NEAR(return_time(SectionPoint{0.2, std::exp(-1.0)}, p), 1.7, 1e-14);
  EXPECT_NEAR(return_time(SectionPoint{0.2, std::exp(-two_pi / 1.7)}, p), two_pi, 1e-13);
  EXPECT_EQ(return_time(SectionPoint{0.2, 0.3}, p), return_time(SectionPoint{5.1, 0.3}, p));
  EXPECT_EQ(return_time(SectionPoint{0.2, 0.3}, p), return_time(SectionPoint{0.2, -0.3}, p));
  EXPECT_THROW(return_time(SectionPoint{0.2, 0.0}, p), Error);
}

// ------------------------------------------------------------------ Jacobian

namespace {

Mat2 central_difference(const SectionPoint& q, const ModelParams& p, double hx, double hy) {
  const auto f = [&](double x, double y) { return advance(SectionPoint{x, y}, p); };
  const ReturnOutcome xp = f(q.x + hx, q.y), xm = f(q.x - hx, q.y);
  const ReturnOutcome yp = f(q.x, q.y + hy), ym = f(q.x, q.y - hy);
  return Mat2{angle_diff(xp.x, xm.x) / (2 * hx), angle_diff(yp.x, ym.x) / (2 * hy), (xp.y - xm.y) / (2 * hx),
              (yp.y - ym.y) / (2 * hy)};
}

double max_abs(const Mat2& m) {
  return std::max({std::abs(m.a), std::abs(m.b), std::abs(m.c), std::abs(m.d)});
}

}  // namespace

TEST(Jacobian, UnperturbedIsUpperTriangular) {
  const ModelParams p = unit(0.0);
  const Mat2 j = return_map_jacobian(SectionPoint{0.3, 0.01}, p);
  EXPECT_EQ(j.a, 1.0);
  EXPECT_DOUBLE_EQ(j.b, -100.0);
  EXPECT_EQ(j.c, 0.0);
  EXPECT_DOUBLE_EQ(j.d, 0.02);
}

TEST(Jacobian, MatchesFiniteDifferencesAtReferencePoint) {
  const ModelParams p = canon(2, 1, 0.01);
  const SectionPoint q{0.5, 0.001};
  const Mat2 j = return_map_jacobian(q, p);
  const Mat2 fd = central_difference(q, p, 1e-6, 1e-6 * 1e-3);
  EXPECT_LT(rel(fd.a, j.a), 1e-5);
  EXPECT_LT(rel(fd.b, j.b), 1e-5);
  EXPECT_LT(rel(fd.c, j.c), 1e-5);
  EXPECT_LT(rel(fd.d, j.d), 1e-5);
}

TEST(Jacobian, MatchesFiniteDifferencesAtRandomPoints) {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> ux(0.0, two_pi), ulogy(std::log(1e-4), std::log(0.5)), ulam(0.0, 0.3);
  for (int i = 0; i < 100; ++i) {
    const ModelParams p = canon(2.0 + i % 3, 0.5 + 0.25 * (i % 4), ulam(rng));
    double y = std::exp(ulogy(rng));
    if (i % 2) y = -y;
    const SectionPoint q{ux(rng), y};
    const Mat2 j = return_map_jacobian(q, p);
    const Mat2 fd = central_difference(q, p, 1e-6, 1e-6 * std::abs(y));
    const Mat2 diff{fd.a - j.a, fd.b - j.b, fd.c - j.c, fd.d - j.d};
    EXPECT_LT(max_abs(diff) / max_abs(j), 1e-5) << "point " << i;
  }
}

TEST(Jacobian, DeterminantIdentity) {
  using boost::multiprecision::cpp_bin_float_50;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ux(0.0, two_pi), ulogy(std::log(1e-6), std::log(0.9)), ulam(0.0, 0.5);
  for (int i = 0; i < 2000; ++i) {
    const ModelParams p = canon(1.5 + 0.5 * (i % 6), 0.3 + 0.4 * (i % 5), ulam(rng));
    const double y = std::exp(ulogy(rng)) * (i % 2 ? -1.0 : 1.0);
    const SectionPoint q{ux(rng), y};
    const double expect = p.delta() * std::pow(std::abs(y), p.delta() - 1.0);
    const auto jx = return_map_jacobian_as<cpp_bin_float_50>(q, p);
    const double det_x = static_cast<double>(jx.a * jx.d - jx.b * jx.c);
    EXPECT_LT(std::abs(det_x - expect) / expect, 1e-14) << i;
    // in double the identity holds up to the cancellation in the (2,2) entry
    const Mat2 j = return_map_jacobian(q, p);
    const double det = j.a * j.d - j.b * j.c;
    const double bound = 8 * std::numeric_limits<double>::epsilon() * (expect + std::abs(j.b * j.c));
    EXPECT_LE(std::abs(det - expect), bound) << i;
  }
}

TEST(Jacobian, AreaContractionWhereDetBelowOne) {
  const ModelParams p = canon(2, 1, 0.01);
  for (double y : {0.3, 0.1, 0.01}) {
    const double det = p.delta() * std::pow(y, p.delta() - 1.0);
    ASSERT_LT(det, 1.0);
    // image of a tiny square: area ratio approximates det
    const double h = 1e-7 * y;
    const SectionPoint q{1.0, y};
    const ReturnOutcome o = advance(q, p), ex = advance(SectionPoint{1.0 + h, y}, p),
                        ey = advance(SectionPoint{1.0, y + h}, p);
    const double ax = angle_diff(ex.x, o.x), ay = ex.y - o.y, bx = angle_diff(ey.x, o.x), by = ey.y - o.y;
    const double area = std::abs(ax * by - ay * bx) / (h * h);
    EXPECT_LT(area, 1.0);
    EXPECT_LT(rel(area, det), 1e-3);
  }
}

// ------------------------------------------------------------------- orbits

TEST(Orbit, UnperturbedSequence) {
  const ModelParams p = unit(0.0);
  const OrbitRecord r = iterate_orbit(SectionPoint{0.0, 0.5}, p, 3);
  ASSERT_EQ(r.points.size(), 4u);
  ASSERT_EQ(r.times.size(), 3u);
  EXPECT_EQ(r.points[1].y, 0.25);
  EXPECT_EQ(r.points[2].y, 0.0625);
  EXPECT_EQ(r.points[3].y, 0.00390625);
  EXPECT_EQ(r.termination, Termination::Completed);
}

TEST(Orbit, FixedPointOrbitIsConstant) {
  for (int ell = 1; ell <= 2; ++ell) {
    // inside the focus window round-off decays along the orbit
    const auto t = bifurcation_thresholds<double>(2.0, 1.0, ell);
    const ModelParams p = unit(0.5 * (t.b + t.c));
    const FixedPoint fp = principal_fixed_point(p, ell).value();
    const OrbitRecord r = iterate_orbit(fp.point(), p, 10);
    ASSERT_EQ(r.times.size(), 10u);
    for (const auto& q : r.points) {
      EXPECT_LT(std::abs(angle_diff(q.x, fp.x)), 1e-8);
      EXPECT_LT(std::abs(q.y - fp.y) / fp.y, 1e-8);
    }
    EXPECT_NEAR(r.total_time, 20.0 * pi * ell, 1e-9);
  }
}

TEST(Orbit, TimesAreAdditive) {
  const ModelParams p = canon(3, 0.7, 0.05);
  const OrbitRecord r = iterate_orbit(SectionPoint{2.0, 0.3}, p, 25);
  double sum = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    const double t = -p.K() * std::log(std::abs(r.points[i].y));
    EXPECT_EQ(r.times[i], t);
    EXPECT_GT(t, 0.0);
    sum += t;
  }
  EXPECT_LT(std::abs(r.total_time - sum), 1e-12 * std::max(1.0, sum));
}

TEST(Orbit, LandingOnStableManifoldTerminates) {
  // y^2 = lambda and an image angle of 3pi/2 give an image height of exactly 0
  const double y = 0.1;
  const double lambda = std::pow(y, 2.0);
  const ModelParams p = unit(lambda);
  ASSERT_EQ(p.delta(), 2.0);
  const double x = reduce_angle(1.5 * pi + p.K() * std::log(y));
  const SectionPoint q{x, y};
  ASSERT_EQ(std::sin(image_angle(q, p)), -1.0);
  const OrbitRecord r = iterate_orbit(q, p, 5);
  EXPECT_EQ(r.termination, Termination::HitStableManifold);
  EXPECT_EQ(r.times.size(), 1u);
  EXPECT_EQ(r.points.size(), 1u);
  ASSERT_TRUE(r.landing_x.has_value());
  EXPECT_EQ(return_map(q, p).status, Termination::HitStableManifold);
}

TEST(Orbit, EscapeStopsEarly) {
  const ModelParams p = canon(2, 1, 0.9);
  const double y = 0.9999;
  const OrbitRecord r = iterate_orbit(SectionPoint{pi / 2 + std::log(y), y}, p, 5);
  EXPECT_EQ(r.termination, Termination::Escaped);
  EXPECT_TRUE(r.times.empty());
}

// --------------------------------------------------------------------- flow

TEST(Flow, FirstSegmentDuration) {
  const ModelParams p(3.0, 1.5, 4.0, 2.0, 0.01);
  const FlowPath f = flow_trajectory(SectionPoint{0.0, std::exp(-1.0)}, p, 0.01);
  EXPECT_NEAR(f.time_in_v1, 1.0 / 1.5, 1e-15);
}

TEST(Flow, EndpointAndDurationMatchReturnMap) {
  const ModelParams p = canon(2, 1, 0.01);
  for (double y : {0.01, -0.01, 0.3}) {
    const SectionPoint q{1.0, y};
    const FlowPath f = flow_trajectory(q, p, 0.01);
    const ReturnOutcome r = return_map(q, p);
    const WallPoint e = f.endpoint();
    EXPECT_LT(std::abs(angle_diff(e.x, r.x)), 1e-10);
    EXPECT_LT(std::abs(e.y - r.y), 1e-10);
    EXPECT_LT(std::abs(f.duration() - return_time(q, p)), 1e-10);
    EXPECT_LT(std::abs(f.winding() - return_time(q, p)), 1e-10);
  }
}

TEST(Flow, SegmentsFollowTheLinearFlows) {
  const ModelParams p(3.0, 1.5, 4.0, 2.0, 0.02);
  const SectionPoint q{0.5, 0.2};
  const FlowPath f = flow_trajectory(q, p, 0.05);
  for (const FlowSample& s : f.samples) {
    if (s.segment == FlowSegment::InsideV1) {
      EXPECT_NEAR(s.rho, std::exp(-p.C1() * s.t), 1e-14);
      EXPECT_NEAR(s.theta, q.x + s.t, 1e-14);
      EXPECT_LE(std::abs(s.z), 1.0);
    } else if (s.segment == FlowSegment::InsideV2) {
      EXPECT_LE(s.rho, 1.0 + 1e-15);
    }
  }
  EXPECT_THROW(flow_trajectory(SectionPoint{0.0, 0.0}, p, 0.1), Error);
  EXPECT_THROW(flow_trajectory(q, p, 0.0), Error);
}
