#include <cmath>

#include <gtest/gtest.h>

#include "dvz/nets.hpp"
#include "dvz/norms.hpp"

using namespace dvz;

namespace {

double min_pairwise_distance(const Eigen::MatrixXd& p) {
  double best = 1e300;
  for (Index i = 0; i < p.cols(); ++i)
    for (Index j = i + 1; j < p.cols(); ++j) best = std::min(best, (p.col(i) - p.col(j)).norm());
  return best;
}

// m equally spaced points on S^1; covering radius is 2 sin(pi / 2m).
EpsNet circle_net(Index m, double eps) {
  EpsNet net;
  net.k = 2;
  net.eps = eps;
  net.points.resize(2, m);
  const double pi = std::acos(-1.0);
  for (Index i = 0; i < m; ++i) {
    const double a = 2.0 * pi * double(i) / double(m);
    net.points.col(i) << std::cos(a), std::sin(a);
  }
  return net;
}

}  // namespace

TEST(Nets, ZeroSphere) {
  RandomSource rng(1);
  const EpsNet net = build_net(1, 0.5, rng);
  ASSERT_EQ(net.size(), 2);
  EXPECT_EQ(std::abs(net.points(0, 0)), 1.0);
  EXPECT_EQ(net.points(0, 0), -net.points(0, 1));
  EXPECT_LE(double(net.size()), cardinality_bound(1, 0.5));
  const auto rep = verify_covering(net, 1000, rng);
  EXPECT_EQ(rep.max_observed_distance, 0.0);
  EXPECT_EQ(rep.fraction_within_eps, 1.0);
}

TEST(Nets, CircleNetCardinality) {
  RandomSource rng(2);
  const EpsNet net = build_net(2, 0.2, rng);
  EXPECT_LE(double(net.size()), 121.0);
  // Separated points sit at angular gaps >= 2 asin(0.1), so at most
  // pi / asin(0.1) ~ 31.4 fit; covering needs gaps <= 4 asin(0.1), so at
  // least pi / (2 asin(0.1)) ~ 15.7.
  EXPECT_LE(net.size(), 31);
  EXPECT_GE(net.size(), 16);
  EXPECT_GE(min_pairwise_distance(net.points), 0.2 * (1 - 1e-12));
  for (Index j = 0; j < net.size(); ++j) EXPECT_NEAR(net.points.col(j).norm(), 1.0, 1e-12);
}

TEST(Nets, SeparatedAndBounded) {
  RandomSource rng(3);
  // The default 200|N| stopping rule leaves an uncovered set of measure about
  // 1 / (200|N|), which 1e4 trials can hit; 1e6 rejections push it below 1e-6.
  for (auto [k, eps] : {std::pair<Index, double>{3, 0.5}, {5, 0.5}, {4, 0.7}}) {
    const EpsNet net = build_net(k, eps, rng, 1000000);
    EXPECT_LE(double(net.size()), cardinality_bound(k, eps));
    EXPECT_GE(min_pairwise_distance(net.points), eps * (1 - 1e-12));
    EXPECT_EQ(verify_covering(net, 10000, rng).fraction_within_eps, 1.0) << "k=" << k;
  }
}

TEST(Nets, ReplayFromRecordedStream) {
  RandomSource rng(4);
  const EpsNet net = build_net(3, 0.4, rng);
  const EpsNet again = rebuild_net(3, 0.4, net.seed, net.stream);
  EXPECT_EQ(net.points, again.points);
  EXPECT_EQ(net.construction_budget, again.construction_budget);
  RandomSource a(9), b(9);
  EXPECT_EQ(build_net(2, 0.3, a).points, build_net(2, 0.3, b).points);
}

TEST(Nets, ExplicitBudget) {
  RandomSource rng(5);
  const EpsNet small = build_net(3, 0.3, rng, 5);
  EXPECT_GE(small.size(), 1);
  EXPECT_GE(small.construction_budget, 5u);
  EXPECT_THROW(build_net(3, 0.3, rng, 0), InputError);
  EXPECT_THROW(build_net(0, 0.3, rng), InputError);
  EXPECT_THROW(build_net(2, 1.5, rng), InputError);
}

TEST(Nets, AnalyticCircleCovering) {
  RandomSource rng(6);
  const double pi = std::acos(-1.0);
  const Index m = 40;
  const double radius = 2.0 * std::sin(pi / (2.0 * m));
  const EpsNet net = circle_net(m, 1.01 * radius);
  auto rep = verify_covering(net, 20000, rng);
  EXPECT_EQ(rep.fraction_within_eps, 1.0);
  EXPECT_LE(rep.max_observed_distance, radius + 1e-12);

  // Remove one point: the gap around it is no longer covered.
  EpsNet punctured = net;
  punctured.points = net.points.rightCols(m - 1);
  rep = verify_covering(punctured, 20000, rng);
  EXPECT_LT(rep.fraction_within_eps, 1.0);
  EXPECT_GT(rep.max_observed_distance, net.eps);
}

TEST(Nets, CardinalityBound) {
  EXPECT_DOUBLE_EQ(cardinality_bound(1, 1.0), 3.0);
  EXPECT_DOUBLE_EQ(cardinality_bound(0, 0.3), 1.0);
  EXPECT_DOUBLE_EQ(cardinality_bound(3, 0.5), 125.0);
  EXPECT_DOUBLE_EQ(cardinality_bound(5, 0.5), 3125.0);
  EXPECT_THROW(cardinality_bound(-1, 0.5), InputError);
  EXPECT_THROW(cardinality_bound(2, 0.0), InputError);
}

TEST(Nets, AmplifyFormula) {
  auto iv = amplify_net_bounds(1.0, 1.0, 0.1);
  EXPECT_NEAR(iv.hi, 1.0 / 0.9, 1e-15);
  EXPECT_NEAR(iv.lo, 1.0 - 0.1 / 0.9, 1e-15);
  iv = amplify_net_bounds(0.95, 1.05, 0.25);
  EXPECT_NEAR(iv.hi, 1.4, 1e-15);
  EXPECT_NEAR(iv.lo, 0.6, 1e-15);
  iv = amplify_net_bounds(2.0, 2.0, 1e-9);
  EXPECT_NEAR(iv.lo, 2.0, 1e-8);
  EXPECT_NEAR(iv.hi, 2.0, 1e-8);
  EXPECT_THROW(amplify_net_bounds(2.0, 1.0, 0.1), InputError);
  EXPECT_THROW(amplify_net_bounds(1.0, 1.0, 1.0), InputError);
}

// Brute-force check of the amplified interval: l3 on a plane of R^3, with a
// net of 24 equally spaced directions. Every direction on a fine grid must
// fall inside [lo, hi].
TEST(Nets, AmplifiedIntervalContainsDenseGrid) {
  const NormSpec s = NormSpec::lp(3.0, 3);
  Eigen::MatrixXd plane(3, 2);
  plane << 1, 0, 1, 1, 0, 1;
  plane.col(0).normalize();
  plane.col(1) -= plane.col(1).dot(plane.col(0)) * plane.col(0);
  plane.col(1).normalize();
  const EpsNet net = circle_net(24, 2.0 * std::sin(std::acos(-1.0) / 48.0) * 1.001);
  double a = 0.0, b = 1e300;
  for (Index j = 0; j < net.size(); ++j) {
    const double v = norm_eval(s, plane * net.points.col(j));
    a = std::max(a, v);
    b = std::min(b, v);
  }
  const auto iv = amplify_net_bounds(b, a, net.eps);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < 20000; ++i) {
    const double t = 2.0 * pi * i / 20000.0;
    const double v = norm_eval(s, plane * Eigen::Vector2d(std::cos(t), std::sin(t)));
    ASSERT_LE(v, iv.hi);
    ASSERT_GE(v, iv.lo);
  }
}
