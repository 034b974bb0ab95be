#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "dvz/parallel.hpp"
#include "dvz/random.hpp"

namespace dvz {

// A finite eps-separated set of unit vectors on S^{k-1}, stored as the
// columns of a k x m matrix. (seed, stream) replays the construction exactly.
struct EpsNet {
  Index k = 0;
  double eps = 0.0;
  Eigen::MatrixXd points;
  std::uint64_t construction_budget = 0;  // candidate draws used
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  Index size() const { return points.cols(); }
};

// Greedy random packing on S^{k-1}: uniform candidates are kept when they lie
// at distance >= eps from every kept point; construction stops after
// `rejection_budget` consecutive rejections. Without an explicit budget the
// stopping rule is 200 * (current cardinality) consecutive rejections.
// The result is always eps-separated; covering is only approximate and is
// checked with verify_covering.
EpsNet build_net(Index k, double eps, RandomSource& rng,
                 std::optional<std::uint64_t> rejection_budget = std::nullopt);

// Same construction replayed from the stream recorded in a net.
EpsNet rebuild_net(Index k, double eps, std::uint64_t seed, std::uint64_t stream,
                   std::optional<std::uint64_t> rejection_budget = std::nullopt);

struct CoveringReport {
  double max_observed_distance = 0.0;
  double fraction_within_eps = 0.0;
  std::uint64_t trials = 0;
};

// Distance from `trials` uniform points of S^{k-1} to the nearest net point.
CoveringReport verify_covering(const EpsNet& net, std::uint64_t trials, RandomSource& rng,
                               const ExecPolicy& policy = {});

// Volumetric packing bound (1 + 2/eps)^k on the size of an eps-separated set.
double cardinality_bound(Index k, double eps);

struct CertifiedInterval {
  double lo = 0.0;
  double hi = 0.0;
};

// If B <= ||x|| <= A on an eps-net of the unit sphere of a subspace, then for
// every unit vector y of that subspace lo <= ||y|| <= hi with
//   hi = A / (1 - eps),   lo = max(0, B - eps * hi).
// Upper: write y = x0 + (y - x0) with x0 in the net, |y - x0|_2 <= eps, so
// M <= A + eps M for M = max ||y||. Lower: ||y|| >= ||x0|| - eps M.
CertifiedInterval amplify_net_bounds(double net_min, double net_max, double eps);

}  // namespace dvz
