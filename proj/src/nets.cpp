#include "dvz/nets.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dvz {

namespace {

EpsNet pack_greedy(Index k, double eps, RandomSource local, std::optional<std::uint64_t> budget) {
  if (k < 1) throw InputError("build_net: k must be positive");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("build_net: eps must lie in (0,1)");
  if (budget && *budget < 1) throw InputError("build_net: budget must be at least 1");

  EpsNet net;
  net.k = k;
  net.eps = eps;
  net.seed = local.master_seed();
  net.stream = local.stream_id();

  // |p - c|^2 = 2 - 2<p,c> for unit vectors.
  const double max_dot = 1.0 - 0.5 * eps * eps;
  std::vector<double> flat;
  Index count = 0;
  std::uint64_t rejections = 0;
  std::uint64_t draws = 0;
  for (;;) {
    const std::uint64_t limit = budget ? *budget : 200 * static_cast<std::uint64_t>(std::max<Index>(count, 1));
    if (count > 0 && rejections >= limit) break;
    const Eigen::VectorXd c = sample_sphere(k, local);
    ++draws;
    bool keep = true;
    for (Index j = count - 1; j >= 0; --j) {
      const Eigen::Map<const Eigen::VectorXd> p(flat.data() + j * k, k);
      if (p.dot(c) > max_dot) {
        keep = false;
        break;
      }
    }
    if (keep) {
      flat.insert(flat.end(), c.data(), c.data() + k);
      ++count;
      rejections = 0;
    } else {
      ++rejections;
    }
  }
  net.points = Eigen::Map<const Eigen::MatrixXd>(flat.data(), k, count);
  net.construction_budget = draws;
  return net;
}

}  // namespace

EpsNet build_net(Index k, double eps, RandomSource& rng, std::optional<std::uint64_t> rejection_budget) {
  return pack_greedy(k, eps, rng.fork(), rejection_budget);
}

EpsNet rebuild_net(Index k, double eps, std::uint64_t seed, std::uint64_t stream,
                   std::optional<std::uint64_t> rejection_budget) {
  return pack_greedy(k, eps, RandomSource(seed, stream), rejection_budget);
}

CoveringReport verify_covering(const EpsNet& net, std::uint64_t trials, RandomSource& rng,
                               const ExecPolicy& policy) {
  if (trials < 1) throw InputError("verify_covering: trials must be at least 1");
  if (net.size() == 0) throw InputError("verify_covering: empty net");
  const Index k = net.k;
  const auto total = static_cast<Index>(trials);
  const std::size_t chunks = chunk_count(total, policy.chunk_size);
  const RandomSource base = rng.fork();

  struct Partial {
    double max_distance = 0.0;
    std::uint64_t within = 0;
  };
  std::vector<Partial> partial(chunks);
  parallel_for(chunks, policy.workers, [&](std::size_t c) {
    RandomSource local = base.substream(c);
    const Index begin = static_cast<Index>(c) * policy.chunk_size;
    const Index count = std::min(policy.chunk_size, total - begin);
    Eigen::MatrixXd samples(k, count);
    for (Index s = 0; s < count; ++s) samples.col(s) = sample_sphere(k, local);
    const Eigen::MatrixXd dots = net.points.transpose() * samples;
    Partial out;
    for (Index s = 0; s < count; ++s) {
      Index nearest = 0;
      dots.col(s).maxCoeff(&nearest);
      const double d = (samples.col(s) - net.points.col(nearest)).norm();
      out.max_distance = std::max(out.max_distance, d);
      if (d <= net.eps) ++out.within;
    }
    partial[c] = out;
  });

  CoveringReport report;
  report.trials = trials;
  std::uint64_t within = 0;
  for (const auto& p : partial) {
    report.max_observed_distance = std::max(report.max_observed_distance, p.max_distance);
    within += p.within;
  }
  report.fraction_within_eps = static_cast<double>(within) / static_cast<double>(trials);
  return report;
}

double cardinality_bound(Index k, double eps) {
  if (k < 0) throw InputError("cardinality_bound: k must be nonnegative");
  if (!(eps > 0.0)) throw InputError("cardinality_bound: eps must be positive");
  return std::pow(1.0 + 2.0 / eps, static_cast<double>(k));
}

CertifiedInterval amplify_net_bounds(double net_min, double net_max, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("amplify_net_bounds: eps must lie in (0,1)");
  if (!(net_min >= 0.0)) throw InputError("amplify_net_bounds: net minimum must be nonnegative");
  if (net_min > net_max) throw InputError("amplify_net_bounds: net minimum exceeds net maximum");
  CertifiedInterval out;
  out.hi = net_max / (1.0 - eps);
  out.lo = std::max(0.0, net_min - eps * out.hi);
  return out;
}

}  // namespace dvz
