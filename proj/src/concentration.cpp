#include "dvz/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "dvz/stats.hpp"

namespace dvz {

namespace {

// Norm values of `samples` uniform sphere points, filled chunk by chunk.
std::vector<double> sphere_norm_values(const NormSpec& spec, std::uint64_t samples, const RandomSource& base,
                                       const ExecPolicy& policy) {
  const Index n = spec.dim();
  const auto total = static_cast<Index>(samples);
  std::vector<double> values(samples);
  parallel_for(chunk_count(total, policy.chunk_size), policy.workers, [&](std::size_t c) {
    RandomSource local = base.substream(c);
    const Index begin = static_cast<Index>(c) * policy.chunk_size;
    const Index end = std::min(total, begin + policy.chunk_size);
    for (Index s = begin; s < end; ++s)
      values[static_cast<std::size_t>(s)] = norm_eval(spec, sample_sphere(n, local));
  });
  return values;
}

SampleStats chunked_stats(const std::vector<double>& values, Index chunk) {
  SampleStats total;
  for (std::size_t begin = 0; begin < values.size(); begin += static_cast<std::size_t>(chunk)) {
    SampleStats part;
    const std::size_t end = std::min(values.size(), begin + static_cast<std::size_t>(chunk));
    for (std::size_t i = begin; i < end; ++i) part.add(values[i]);
    total.merge(part);
  }
  return total;
}

}  // namespace

SphereStatistics estimate_sphere_mean(const NormSpec& spec, std::uint64_t samples, RandomSource& rng,
                                      const ExecPolicy& policy) {
  if (samples < 2) throw InputError("estimate_sphere_mean: need at least 2 samples");
  const std::vector<double> values = sphere_norm_values(spec, samples, rng.fork(), policy);
  const SampleStats stats = chunked_stats(values, policy.chunk_size);
  SphereStatistics out;
  out.E = stats.mean();
  out.std_error = stats.stderr_of_mean();
  out.M = median(values);
  out.samples = samples;
  out.L = comparison_constants(spec).b_upper;
  return out;
}

double levy_tail_bound(double eps, Index n, double L) {
  if (!(eps > 0.0)) throw InputError("levy_tail_bound: eps must be positive");
  if (!(L > 0.0)) throw InputError("levy_tail_bound: L must be positive");
  if (n < 1) throw InputError("levy_tail_bound: n must be positive");
  return 2.0 * std::exp(-eps * eps * static_cast<double>(n) / (2.0 * L * L));
}

double TailEstimate::binomial_sigma(double p) const {
  if (samples == 0) return 0.0;
  return std::sqrt(std::clamp(p, 0.0, 1.0) * (1.0 - std::clamp(p, 0.0, 1.0)) / static_cast<double>(samples));
}

TailEstimate empirical_tail(const NormSpec& spec, double eps, std::uint64_t samples, RandomSource& rng,
                            Center center, const ExecPolicy& policy) {
  if (!(eps > 0.0)) throw InputError("empirical_tail: eps must be positive");
  if (samples < 2) throw InputError("empirical_tail: need at least 2 samples");
  const RandomSource center_stream = rng.fork();
  const RandomSource tail_stream = rng.fork();

  const std::vector<double> pilot = sphere_norm_values(spec, samples, center_stream, policy);
  TailEstimate out;
  out.center = center == Center::Mean ? chunked_stats(pilot, policy.chunk_size).mean() : median(pilot);

  const std::vector<double> values = sphere_norm_values(spec, samples, tail_stream, policy);
  for (double v : values)
    if (std::abs(v - out.center) > eps) ++out.exceedances;
  out.samples = samples;
  out.fraction = static_cast<double>(out.exceedances) / static_cast<double>(samples);
  out.low_resolution = out.exceedances < 10;
  return out;
}

RatioEstimate gaussian_norm_ratio_mean(const NormSpec& spec, std::uint64_t samples, RandomSource& rng,
                                       const ExecPolicy& policy) {
  if (samples < 2) throw InputError("gaussian_norm_ratio_mean: need at least 2 samples");
  const Index n = spec.dim();
  const auto total = static_cast<Index>(samples);
  const RandomSource base = rng.fork();
  std::vector<double> num(samples), den(samples);
  parallel_for(chunk_count(total, policy.chunk_size), policy.workers, [&](std::size_t c) {
    RandomSource local = base.substream(c);
    const Index begin = static_cast<Index>(c) * policy.chunk_size;
    const Index end = std::min(total, begin + policy.chunk_size);
    for (Index s = begin; s < end; ++s) {
      const Eigen::VectorXd g = sample_gaussian_vector(n, local);
      num[static_cast<std::size_t>(s)] = norm_eval(spec, g);
      den[static_cast<std::size_t>(s)] = g.norm();
    }
  });
  const SampleStats ns = chunked_stats(num, policy.chunk_size);
  const SampleStats ds = chunked_stats(den, policy.chunk_size);
  RatioEstimate out;
  out.samples = samples;
  out.numerator = ns.mean();
  out.numerator_std_error = ns.stderr_of_mean();
  out.denominator = ds.mean();
  out.denominator_std_error = ds.stderr_of_mean();
  out.ratio = out.numerator / out.denominator;
  // Delta method: Var(N/D) ~ Var(N - R D) / (D^2 s).
  std::vector<double> linearized(samples);
  for (std::size_t i = 0; i < samples; ++i) linearized[i] = num[i] - out.ratio * den[i];
  const SampleStats zs = chunked_stats(linearized, policy.chunk_size);
  out.std_error = zs.stderr_of_mean() / out.denominator;
  return out;
}

MeanEstimate expected_max_abs_gaussian(Index m, std::uint64_t samples, RandomSource& rng,
                                       const ExecPolicy& policy) {
  if (m < 1) throw InputError("expected_max_abs_gaussian: m must be positive");
  if (samples < 2) throw InputError("expected_max_abs_gaussian: need at least 2 samples");
  const auto total = static_cast<Index>(samples);
  const RandomSource base = rng.fork();
  std::vector<double> values(samples);
  parallel_for(chunk_count(total, policy.chunk_size), policy.workers, [&](std::size_t c) {
    RandomSource local = base.substream(c);
    const Index begin = static_cast<Index>(c) * policy.chunk_size;
    const Index end = std::min(total, begin + policy.chunk_size);
    for (Index s = begin; s < end; ++s) {
      double best = 0.0;
      for (Index i = 0; i < m; ++i) best = std::max(best, std::abs(local.normal()));
      values[static_cast<std::size_t>(s)] = best;
    }
  });
  const SampleStats st = chunked_stats(values, policy.chunk_size);
  return {st.mean(), st.stderr_of_mean(), samples};
}

double expected_max_abs_gaussian_table(Index m) {
  if (m < 1) throw InputError("expected_max_abs_gaussian_table: m must be positive");
  static std::mutex mutex;
  static std::map<Index, double> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    if (auto it = cache.find(m); it != cache.end()) return it->second;
  }
  // P(max|g| > t) = 1 - (1 - erfc(t/sqrt2))^m, negligible beyond t = 12.
  const auto tail = [m](double t) {
    const double q = std::erfc(t / std::sqrt(2.0));
    return -std::expm1(static_cast<double>(m) * std::log1p(-q));
  };
  const double upper = 12.0;
  const int intervals = 24000;  // composite Simpson, even count
  const double h = upper / intervals;
  double acc = tail(0.0) + tail(upper);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * tail(i * h);
  const double value = acc * h / 3.0;
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(m, value);
  return value;
}

double milman_lower_bound_E(Index n) {
  if (n < 2) throw InputError("milman_lower_bound_E: n must be at least 2");
  const double e = std::exp(1.0);
  return expected_max_abs_gaussian_table(n / 2) / (2.0 * e * std::sqrt(static_cast<double>(n)));
}

}  // namespace dvz
