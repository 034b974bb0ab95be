#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dvz/concentration.hpp"
#include "dvz/nets.hpp"
#include "dvz/norms.hpp"
#include "dvz/parallel.hpp"
#include "dvz/random.hpp"

namespace dvz {

enum class Extremum { Max, Min };

struct ExtremumResult {
  double value = 0.0;
  Eigen::VectorXd coords;   // unit vector of R^k
  Eigen::VectorXd witness;  // frame * coords, a unit vector of the section
  // Quality signal: how many restarts landed within 1e-6 (relative) of the
  // best value, and the relative spread of all restart values.
  int restarts = 0;
  int agreeing = 0;
  double spread = 0.0;
};

// Extremum of x -> ||frame x|| over S^{k-1}.
//
// Max: the convex ascent iteration x <- F^T g / |F^T g| with g a subgradient
// at F x. It is monotone, so the returned value is a certified lower bound on
// the true maximum.
// Min: Riemannian descent on smoothed surrogates with decreasing smoothing,
// accepting only steps that decrease the true norm, then a plain subgradient
// polish. The value is an upper bound on the true minimum.
//
// `starts` are optional initial points (coordinates in R^k) tried before the
// random restarts.
ExtremumResult norm_extremum_on_section(const NormSpec& spec, const Frame& frame, Extremum direction,
                                        int restarts, RandomSource& rng,
                                        const std::vector<Eigen::VectorXd>& starts = {});

struct DRStep {
  Index index = 0;
  double norm = 0.0;
  int restarts = 0;
  int agreeing = 0;
  double spread = 0.0;
};

// Orthonormal basis built greedily: x_i maximizes the norm over the unit
// sphere of the orthogonal complement of x_1..x_{i-1}.
struct DRBasis {
  Frame frame;
  std::vector<double> norms;
  std::vector<DRStep> ascent_report;
};

// Requires b_upper = 1 (norm normalized so that the Euclidean ball is the
// inscribed reference ellipsoid); throws PreconditionError otherwise.
DRBasis dvoretzky_rogers_basis(const NormSpec& spec, int restarts, RandomSource& rng);

// max(1, floor(c * eps^2 / log(3/eps) * (E/b)^2 * n)).
Index milman_candidate_dim(double E, double b, double eps, Index n, double c);

// Default constant for milman_candidate_dim; see README for its calibration.
inline constexpr double kDefaultMilmanConstant = 0.1;

struct SectionSearchOptions {
  std::uint64_t mean_samples = 20000;        // samples for the estimate of E
  std::uint64_t distortion_samples = 2000;   // Monte-Carlo part of measure_distortion
  int distortion_restarts = 8;
  std::optional<std::uint64_t> net_budget;   // rejection budget for the net
  const EpsNet* net = nullptr;               // prebuilt net on S^{k-1} (eps_net = eps/2)
  std::optional<double> mean_override;       // use this E instead of estimating
  ExecPolicy policy;
};

struct SectionCertificate {
  Frame subspace;
  // Net on S^{k-1} with parameter eps/2 used for the test.
  Index net_k = 0;
  double net_eps = 0.0;
  Index net_size = 0;
  std::uint64_t net_seed = 0;
  std::uint64_t net_stream = 0;
  double E = 0.0;
  double net_min = 0.0;
  double net_max = 0.0;
  CertifiedInterval certified_interval;  // for ||y||, y a unit vector of the section
  double empirical_distortion = 0.0;
  int attempts_used = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // stream of the successful attempt
  double target_eps = 0.0;

  double certified_distortion() const;
};

struct SectionFailure {
  int attempts_used = 0;
  double E = 0.0;
  double best_deviation = 0.0;  // min over attempts of max_x | ||Ux||/E - 1 |
  std::optional<Frame> best_subspace;
  std::uint64_t seed = 0;
  double target_eps = 0.0;
};

struct SectionSearchResult {
  std::optional<SectionCertificate> certificate;
  std::optional<SectionFailure> failure;
  bool success() const { return certificate.has_value(); }
};

// Randomized search for a k-dimensional subspace on which
// (1 - eps) E <= ||x|| <= (1 + eps) E holds on an (eps/2)-net of the unit
// sphere. Attempts are numbered; the lowest-numbered success is returned.
SectionSearchResult find_euclidean_section(const NormSpec& spec, double eps, Index k, int max_attempts,
                                           RandomSource& rng, const SectionSearchOptions& options = {});

struct DistortionMeasurement {
  double distortion = 1.0;  // max_value / min_value, a lower bound on the truth
  double max_value = 0.0;
  double min_value = 0.0;
  Eigen::VectorXd max_witness;
  Eigen::VectorXd min_witness;
  double sampled_max = 0.0;
  double sampled_min = 0.0;
};

DistortionMeasurement measure_distortion(const NormSpec& spec, const Frame& frame, std::uint64_t samples,
                                         int restarts, RandomSource& rng);

struct KmaxTrial {
  Index k = 0;
  bool success = false;
  int attempts = 0;
  double best_distortion = 0.0;
};

struct KmaxOptions {
  int attempts_per_k = 20;
  std::uint64_t distortion_samples = 1000;
  int distortion_restarts = 4;
  ExecPolicy policy;
};

struct KmaxResult {
  Index k_max = 1;
  std::vector<KmaxTrial> trials;  // in search order
};

// Largest k for which some random k-dimensional section has measured
// distortion <= 1 + eps. Doubling then bisection; assumes the success
// probability is nonincreasing in k.
KmaxResult kmax_search(const NormSpec& spec, double eps, RandomSource& rng, const KmaxOptions& options = {});

}  // namespace dvz
