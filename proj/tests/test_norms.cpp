#include <cmath>

#include <gtest/gtest.h>

#include "dvz/norms.hpp"
#include "dvz/random.hpp"
#include "test_support.hpp"

using namespace dvz;

TEST(Norms, SmallVectors) {
  Eigen::Vector2d a(3.0, 4.0);
  EXPECT_DOUBLE_EQ(norm_eval(NormSpec::euclidean(2), a), 5.0);
  Eigen::Vector3d b(1.0, -2.0, 0.5);
  EXPECT_DOUBLE_EQ(norm_eval(NormSpec::sup(3), b), 2.0);

  const Index n = 7;
  const NormSpec s = NormSpec::sum({{1.0, NormSpec::euclidean(n)}, {1.0, NormSpec::lp(3.0, n)}});
  EXPECT_DOUBLE_EQ(norm_eval(s, Eigen::VectorXd::Unit(n, 0)), 2.0);
}

TEST(Norms, LpAgreesWithDirectSum) {
  RandomSource rng(11);
  for (double p : {1.0, 1.5, 2.0, 3.0, 3.07, 4.0, 7.0, 8.0, 13.0, kInfinity}) {
    for (Index n : {1, 5, 64}) {
      const Eigen::VectorXd x = sample_gaussian_vector(n, rng);
      const double want = oracle::naive_lp(x, p);
      EXPECT_NEAR(norm_eval(NormSpec::lp(p, n), x), want, 1e-12 * want) << "p=" << p << " n=" << n;
    }
  }
}

TEST(Norms, LargePDoesNotOverflow) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(4, 1e200);
  EXPECT_NEAR(norm_eval(NormSpec::lp(50.0, 4), x) / 1e200, std::pow(4.0, 1.0 / 50.0), 1e-12);
}

TEST(Norms, EvaluatesExpressions) {
  RandomSource rng(3);
  const Eigen::MatrixXd q = sample_gaussian_matrix(6, 3, rng);
  const Eigen::VectorXd c = sample_gaussian_vector(3, rng);
  const Eigen::VectorXd v = q * c;
  for (double p : {1.0, 4.0, kInfinity})
    EXPECT_EQ(norm_eval(NormSpec::lp(p, 6), q * c), norm_eval(NormSpec::lp(p, 6), v));
}

TEST(Norms, FloatScalar) {
  Eigen::VectorXf x(3);
  x << 1.0f, -2.0f, 2.0f;
  EXPECT_FLOAT_EQ(norm_eval(NormSpec::euclidean(3), x), 3.0f);
  EXPECT_FLOAT_EQ(norm_eval(NormSpec::lp(1.0, 3), x), 5.0f);
}

TEST(Norms, WeightedSup) {
  const NormSpec w = NormSpec::weighted_sup({1.0, 2.0, 0.5});
  EXPECT_DOUBLE_EQ(norm_eval(w, Eigen::Vector3d(1.0, 1.0, 3.0)), 2.0);
  const auto c = comparison_constants(w);
  EXPECT_DOUBLE_EQ(c.b_upper, 2.0);
  EXPECT_NEAR(c.b_lower, 1.0 / std::sqrt(1.0 + 0.25 + 4.0), 1e-15);
  EXPECT_THROW(NormSpec::weighted_sup({1.0, -1.0}), InputError);
  EXPECT_THROW(w.with_dim(5), InputError);
}

TEST(Norms, ComparisonConstants) {
  auto c = comparison_constants(NormSpec::sup(4));
  EXPECT_DOUBLE_EQ(c.b_upper, 1.0);
  EXPECT_DOUBLE_EQ(c.b_lower, 0.5);
  EXPECT_DOUBLE_EQ(c.distortion(), 2.0);

  for (Index n : {1, 3, 100}) {
    c = comparison_constants(NormSpec::euclidean(n));
    EXPECT_DOUBLE_EQ(c.b_upper, 1.0);
    EXPECT_DOUBLE_EQ(c.b_lower, 1.0);
  }

  c = comparison_constants(NormSpec::lp(1.0, 9));
  EXPECT_DOUBLE_EQ(c.b_upper, 3.0);
  EXPECT_DOUBLE_EQ(c.b_lower, 1.0);
}

// The constants must bound the norm on random unit vectors, and the extremal
// directions (coordinate vector and diagonal) must attain them.
TEST(Norms, ComparisonConstantsAreAttained) {
  RandomSource rng(5);
  const Index n = 16;
  for (double p : {1.0, 3.0, kInfinity}) {
    const NormSpec s = NormSpec::lp(p, n);
    const auto c = comparison_constants(s);
    for (int t = 0; t < 200; ++t) {
      const double v = norm_eval(s, sample_sphere(n, rng));
      EXPECT_LE(v, c.b_upper * (1 + 1e-12));
      EXPECT_GE(v, c.b_lower * (1 - 1e-12));
    }
    const double e = norm_eval(s, Eigen::VectorXd::Unit(n, 0));
    const double d = norm_eval(s, Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n))));
    EXPECT_NEAR(std::max(e, d), c.b_upper, 1e-12);
    EXPECT_NEAR(std::min(e, d), c.b_lower, 1e-12);
  }
}

TEST(Norms, SubgradientIdentity) {
  RandomSource rng(9);
  const Index n = 12;
  std::vector<NormSpec> specs = {NormSpec::lp(1.0, n), NormSpec::lp(3.0, n), NormSpec::sup(n),
                                 NormSpec::sum({{1.0, NormSpec::euclidean(n)}, {2.0, NormSpec::lp(4.0, n)}})};
  for (const auto& s : specs) {
    for (int t = 0; t < 20; ++t) {
      const Eigen::VectorXd v = sample_gaussian_vector(n, rng);
      const Eigen::VectorXd g = norm_subgradient(s, v);
      const double nv = norm_eval(s, v);
      EXPECT_NEAR(g.dot(v), nv, 1e-12 * nv) << s.label();
      // Convexity: ||w|| >= ||v|| + <g, w - v>.
      const Eigen::VectorXd w = sample_gaussian_vector(n, rng);
      EXPECT_GE(norm_eval(s, w) + 1e-12, nv + g.dot(w - v)) << s.label();
    }
    EXPECT_EQ(norm_subgradient(s, Eigen::VectorXd::Zero(n)).norm(), 0.0);
  }
}

TEST(Norms, SmoothedGradientConverges) {
  RandomSource rng(4);
  const Index n = 10;
  const Eigen::VectorXd v = sample_gaussian_vector(n, rng);
  for (double p : {1.0, kInfinity}) {
    const NormSpec s = NormSpec::lp(p, n);
    const Eigen::VectorXd g = smoothed_norm_gradient(s, v, 1e-9);
    EXPECT_NEAR(g.dot(v), norm_eval(s, v), 1e-6);
  }
}

TEST(Norms, Labels) {
  EXPECT_EQ(NormSpec::lp(4.0, 3).label(), "l4");
  EXPECT_EQ(NormSpec::sup(3).label(), "linf");
  EXPECT_EQ(NormSpec::lp(4.0, 3).with_dim(9).dim(), 9);
  EXPECT_TRUE(NormSpec::lp(4.0, 3) == NormSpec::lp(4.0, 3));
  EXPECT_FALSE(NormSpec::lp(4.0, 3) == NormSpec::lp(4.0, 4));
}

TEST(Norms, RejectsBadInput) {
  EXPECT_THROW(NormSpec::lp(0.5, 3), InputError);
  EXPECT_THROW(NormSpec::lp(2.0, 0), InputError);
  EXPECT_THROW(norm_eval(NormSpec::euclidean(3), Eigen::VectorXd::Zero(4)), InputError);
  EXPECT_THROW(NormSpec::sum(std::vector<std::pair<double, NormSpec>>{{1.0, NormSpec::euclidean(3)},
                                                                      {1.0, NormSpec::euclidean(4)}}),
               InputError);
  EXPECT_THROW((void)NormSpec::weighted_sup({1.0}).p(), InputError);
}

TEST(Norms, FigielExponent) {
  // 1/p = 1/2 + ln(2 eps)/ln n.
  auto p_of = [](const NormSpec& s) {
    const auto& terms = std::get<NormSpec::Sum>(s.kind()).terms;
    return terms[1].spec->p();
  };
  EXPECT_NEAR(p_of(figiel_norm_spec(10000, 0.1)), 1.0 / (0.5 + std::log(0.2) / std::log(1e4)), 1e-12);
  EXPECT_NEAR(p_of(figiel_norm_spec(10000, 0.1)), 3.074, 5e-4);
  EXPECT_NEAR(p_of(figiel_norm_spec(65536, 0.25)), 16.0 / 7.0, 1e-12);

  const NormSpec f = figiel_norm_spec(4096, 0.25);
  EXPECT_LE(comparison_constants(f).distortion(), 2.0);
  // ||x||_p on the diagonal is n^(1/p - 1/2) = 2 eps.
  const Eigen::VectorXd diag = Eigen::VectorXd::Constant(4096, 1.0 / 64.0);
  EXPECT_NEAR(norm_eval(f, diag), 1.5, 1e-12);
}

TEST(Norms, FigielPrecondition) {
  // ceil(eps^-4) - 1 with eps = 0.3: 0.3^-4 = 123.45...
  EXPECT_THROW(figiel_norm_spec(123, 0.3), PreconditionError);
  EXPECT_NO_THROW(figiel_norm_spec(124, 0.3));
  EXPECT_NO_THROW(figiel_norm_spec(10000, 0.1));
  EXPECT_THROW(figiel_norm_spec(9999, 0.1), PreconditionError);
}
