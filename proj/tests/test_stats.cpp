#include <cmath>

#include <gtest/gtest.h>

#include "dvz/errors.hpp"
#include "dvz/parallel.hpp"
#include "dvz/stats.hpp"

using namespace dvz;

TEST(Stats, CompensatedSumRecoversSmallTerms) {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  EXPECT_EQ(s.value(), 1000.0);
}

TEST(Stats, WelfordMatchesTwoPass) {
  const std::vector<double> x = {2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
  SampleStats a, b;
  for (std::size_t i = 0; i < x.size(); ++i) (i < 3 ? a : b).add(x[i]);
  a.merge(b);
  EXPECT_EQ(a.count(), 8u);
  EXPECT_DOUBLE_EQ(a.mean(), 5.0);
  EXPECT_NEAR(a.variance(), 32.0 / 7.0, 1e-14);
  EXPECT_NEAR(a.stderr_of_mean(), std::sqrt(32.0 / 7.0 / 8.0), 1e-14);
}

TEST(Stats, Median) {
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), InputError);
}

TEST(Stats, LineFitExact) {
  const LinearFit f = fit_line({0.0, 1.0, 2.0, 3.0}, {1.0, 3.0, 5.0, 7.0});
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope_stderr, 0.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
}

TEST(Stats, LineFitStandardError) {
  // Residuals +-0.1 alternating: s^2 = 0.04/2, Sxx = 5.
  const LinearFit f = fit_line({0.0, 1.0, 2.0, 3.0}, {0.1, 0.9, 2.1, 2.9});
  EXPECT_NEAR(f.slope, 0.96, 1e-12);
  double ss = 0.0;
  const std::vector<double> y = {0.1, 0.9, 2.1, 2.9};
  for (int i = 0; i < 4; ++i) {
    const double r = y[i] - (f.slope * i + f.intercept);
    ss += r * r;
  }
  EXPECT_NEAR(f.slope_stderr, std::sqrt(ss / 2.0 / 5.0), 1e-12);
  EXPECT_THROW(fit_line({1.0}, {1.0}), InputError);
  EXPECT_THROW(fit_line({1.0, 1.0}, {1.0, 2.0}), InputError);
}

TEST(Parallel, RunsEveryIndexAndRethrows) {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw InputError("boom");
                            }),
               InputError);
  EXPECT_EQ(chunk_count(10, 4), 3u);
  EXPECT_EQ(chunk_count(8, 4), 2u);
}
