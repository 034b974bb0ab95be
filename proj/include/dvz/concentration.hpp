#pragma once

#include <cstdint>

#include "dvz/norms.hpp"
#include "dvz/parallel.hpp"
#include "dvz/random.hpp"

namespace dvz {

// Monte-Carlo statistics of x -> ||x|| under the uniform measure on S^{n-1}.
struct SphereStatistics {
  double E = 0.0;          // mean
  double M = 0.0;          // median
  double std_error = 0.0;  // standard error of E
  std::uint64_t samples = 0;
  double L = 0.0;  // Lipschitz constant used for tail bounds (= b_upper)
};

SphereStatistics estimate_sphere_mean(const NormSpec& spec, std::uint64_t samples, RandomSource& rng,
                                      const ExecPolicy& policy = {});

// Levy's concentration bound 2 exp(-eps^2 n / (2 L^2)) for an L-Lipschitz
// function on S^{n-1}.
double levy_tail_bound(double eps, Index n, double L);

enum class Center { Mean, Median };

struct TailEstimate {
  double fraction = 0.0;  // P(| ||x|| - center | > eps)
  double center = 0.0;    // estimated on an independent stream
  std::uint64_t samples = 0;
  std::uint64_t exceedances = 0;
  bool low_resolution = false;  // fewer than 10 exceedances observed

  // Binomial standard deviation of a fraction with success probability p.
  double binomial_sigma(double p) const;
};

TailEstimate empirical_tail(const NormSpec& spec, double eps, std::uint64_t samples, RandomSource& rng,
                            Center center = Center::Mean, const ExecPolicy& policy = {});

// E ||g|| / E ||g||_2 for a standard Gaussian vector g, which equals the
// spherical mean of the norm because g/|g|_2 and |g|_2 are independent.
struct RatioEstimate {
  double ratio = 0.0;
  double std_error = 0.0;  // delta method
  double numerator = 0.0;
  double numerator_std_error = 0.0;
  double denominator = 0.0;
  double denominator_std_error = 0.0;
  std::uint64_t samples = 0;
};

RatioEstimate gaussian_norm_ratio_mean(const NormSpec& spec, std::uint64_t samples, RandomSource& rng,
                                       const ExecPolicy& policy = {});

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Monte-Carlo estimate of E max_{i<=m} |g_i|.
MeanEstimate expected_max_abs_gaussian(Index m, std::uint64_t samples, RandomSource& rng,
                                       const ExecPolicy& policy = {});

// E max_{i<=m} |g_i| = int_0^inf (1 - erf(t/sqrt2)^m) dt by quadrature,
// memoized per m. Accurate to about 1e-10.
double expected_max_abs_gaussian_table(Index m);

// (1/2e) E max_{i<=n/2}|g_i| / sqrt(n): lower bound for the spherical mean of
// any norm in John position.
double milman_lower_bound_E(Index n);

}  // namespace dvz
