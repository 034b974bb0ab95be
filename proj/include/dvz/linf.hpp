#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dvz/nets.hpp"
#include "dvz/norms.hpp"
#include "dvz/parallel.hpp"
#include "dvz/random.hpp"
#include "dvz/sections.hpp"

namespace dvz {

// Finite family x_1..x_m in a normed space (R^n, ambient), stored as the
// columns of an n x m matrix, with an asserted lower bound on ||x_i||.
class VectorSystem {
 public:
  // Throws InputError if m = 0, dimensions disagree, or some ||x_i|| falls
  // below lower_norm_bound (relative slack 1e-12).
  VectorSystem(NormSpec ambient, Eigen::MatrixXd vectors, double lower_norm_bound);

  const NormSpec& ambient() const { return ambient_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }
  double lower_norm_bound() const { return lower_; }
  Index size() const { return vectors_.cols(); }
  double min_norm() const;

  VectorSystem subsystem(const std::vector<Index>& indices) const;

  // Standard basis e_1..e_n of the given norm.
  static VectorSystem standard_basis(const NormSpec& ambient);

 private:
  NormSpec ambient_;
  Eigen::MatrixXd vectors_;
  double lower_;
};

inline constexpr Index kMaxExactEnumeration = 24;

struct BasisConstant {
  double value = 0.0;  // max over sign vectors of ||sum eps_i x_i||
  bool exact = true;   // false: sampled lower bound
  // Minimum over sign vectors of ||sum eps_i x_i|| (exact mode only).
  std::optional<double> min_sign_norm;
  std::vector<int> maximizing_signs;  // first sign fixed to +1
  std::string method;                 // "enumeration", "row-sum", "sampled"
};

struct ConstantOptions {
  bool allow_sampled = false;     // permit a sampled lower bound beyond the cutoff
  std::uint64_t samples = 100000;
  RandomSource* rng = nullptr;    // required for sampling
  ExecPolicy policy;
};

// The least L with ||sum a_i x_i|| <= L max|a_i|. A convex function on the
// cube peaks at a vertex, so enumerating the 2^(m-1) sign vectors with
// eps_1 = +1 gives the exact value for m <= 24. Sup-type ambient norms use
// the exact row-sum formula beyond the cutoff. Otherwise m > 24 throws
// SizeError unless allow_sampled is set.
BasisConstant linf_basis_constant(const VectorSystem& system, const ConstantOptions& options = {});

struct JamesStepResult {
  VectorSystem system;
  double input_constant = 0.0;  // asserted L
  double target_constant = 0.0;  // sqrt(L)
  bool block_returned = false;   // some block already satisfied the target
  Index block_index = -1;
  std::optional<double> exact_constant;  // of the output, when enumerable
  bool verified = false;                 // exact_constant <= sqrt(L) (+1e-12)
};

// One blocking step: from m vectors with ||x_i|| >= 1 and constant <= L,
// produce floor(sqrt(m)) vectors with norms >= 1 and constant <= sqrt(L).
// Block size floor(sqrt(m)) must not exceed 24.
JamesStepResult james_step(const VectorSystem& system, double asserted_constant, const ExecPolicy& policy = {});

struct JamesLevel {
  Index size = 0;
  double asserted_constant = 0.0;
  std::optional<double> exact_constant;
  bool block_returned = false;
};

struct JamesIterateResult {
  VectorSystem system;
  int planned_steps = 0;
  int depth = 0;
  bool completed = false;
  std::vector<JamesLevel> levels;  // levels[0] is the input
  double final_constant = 0.0;
  bool final_exact = false;
  std::optional<double> min_sign_norm;  // lower-side check
  bool upper_ok = false;                // final constant <= 1 + eps
  bool lower_ok = false;                // min over signs >= 1 - eps
};

// t = ceil(log2(log L / log(1 + eps))) blocking steps (0 when L <= 1 + eps).
JamesIterateResult james_iterate(const VectorSystem& system, double asserted_constant, double eps,
                                 const ExecPolicy& policy = {});

int james_planned_steps(double L, double eps);

struct NetEmbedding {
  EpsNet net;                 // embedding vectors x_i (columns of net.points)
  Index target_dim = 0;       // n = |net|
  double measured_distortion = 0.0;
  double min_ratio = 0.0;     // min over samples of max_i |<x, x_i>|
  double max_ratio = 0.0;
  double guaranteed_distortion = 0.0;  // 1 / (1 - eps^2/2)
  std::uint64_t samples = 0;
};

// x -> (<x, x_i>)_i from l2^k into l_inf^n built on an eps-net of S^{k-1}.
NetEmbedding net_embedding_l2_to_linf(Index k, double eps, RandomSource& rng, std::uint64_t samples = 10000,
                                      std::optional<std::uint64_t> net_budget = std::nullopt);

// Explicit Euclidean section of l_inf^m from a net. Unit vectors x_1..x_m of
// R^k are chosen greedily with |<x_i, x_j>| < 1 - theta^2/2 (a theta-packing
// of the sphere modulo sign), then balanced into a unit-norm tight frame,
// sum x_i x_i^T = (m/k) I. The map x -> (<x, x_i>)_i is then a multiple of
// an isometry into l_2^m, and its image is a k-dimensional subspace of
// l_inf^m whose distortion is at most 1/(1 - r^2/2), r the covering radius of
// the balanced points modulo sign.
struct TightNetSection {
  Eigen::MatrixXd points;  // k x m
  Frame section;           // m x k orthonormal basis of the image
  double theta = 0.0;
  double frame_condition = 0.0;  // sqrt(lambda_max / lambda_min) after balancing
  DistortionMeasurement distortion;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Returns nullopt when the packing would need more than max_points vectors.
std::optional<TightNetSection> tight_net_section(Index k, double theta, Index max_points, RandomSource& rng,
                                                 std::uint64_t distortion_samples = 2000,
                                                 int distortion_restarts = 8);

// 4 log n / log(1/(32 eps)), valid for eps < 1/32.
double linf_upper_bound_dim(double n, double eps);

// E|g|^p = 2^(p/2) Gamma((p+1)/2) / sqrt(pi).
double gaussian_abs_moment(double p);

// C^2 (E|g|^p)^(2/p) n^(2/p).
double bdgjn_upper_bound(double p, double C, double n, std::optional<double> gaussian_moment = std::nullopt);

struct ProbabilityEstimate {
  double probability = 0.0;
  bool exact = false;
  std::uint64_t trials = 0;  // sign patterns or samples
  std::uint64_t hits = 0;
  double sigma = 0.0;        // binomial sigma (sampled mode)
};

// P over signs of ||sum eps_i a_i x_i|| < max|a_i|; exact enumeration when
// `exact` (m <= 20).
ProbabilityEstimate sign_flip_probability(const VectorSystem& system, const Eigen::VectorXd& a,
                                          std::uint64_t samples, RandomSource& rng, bool exact);

struct SmallBallEstimate {
  double fraction = 0.0;
  double threshold = 0.0;  // sqrt(log n) / 100
  double sigma = 0.0;      // binomial sigma at p = 2/3
  std::uint64_t samples = 0;
};

// P(||sum g_i x_i|| < sqrt(log n)/100) by Monte Carlo.
SmallBallEstimate small_ball_check(const VectorSystem& system, std::uint64_t samples, RandomSource& rng,
                                   const ExecPolicy& policy = {});

struct BlockSelection {
  std::vector<std::vector<Index>> blocks;  // floor(sqrt(n)) disjoint blocks of size floor(sqrt(n))
  std::vector<Index> selected;             // J
  std::vector<double> block_values;        // ||sum_{i in block} g_i x_i|| for the kept draw
  Eigen::MatrixXd y_vectors;               // normalized block combinations, one per j in J
  double threshold = 0.0;                  // sqrt(log n) / 200
  int draws = 0;
  std::uint64_t gaussian_draw_seed = 0;
  std::uint64_t gaussian_draw_stream = 0;
  bool success = false;
};

BlockSelection select_good_blocks(const VectorSystem& system, RandomSource& rng, int max_retries = 64);

struct LinfExtractionOptions {
  std::optional<double> L;                   // E||sum g_i x_i|| <= L sqrt(log n); estimated if absent
  std::uint64_t l_samples = 2000;
  std::uint64_t rademacher_samples = 2000;
  ExecPolicy policy;
};

struct LinfExtraction {
  BlockSelection selection;
  std::optional<VectorSystem> system;  // chosen y_j's
  std::vector<Index> chosen;           // positions within selection.selected
  double exact_constant = 0.0;
  double L = 0.0;
  bool L_estimated = false;
  double rademacher_mean = 0.0;        // E_r ||sum_{j in J} r_j y_j||
  double rademacher_std_error = 0.0;
  double rademacher_bound = 0.0;       // 80 L
  bool rademacher_within_bound = false;
  std::string note;
};

// Block selection followed by greedy growth of a sub-system with small exact
// l_inf constant (each step adds the y_j minimizing the new constant).
// The greedy search certifies the constant it reaches but carries no
// dimension guarantee.
LinfExtraction gaussian_linf_subspace(const VectorSystem& system, RandomSource& rng, Index target_count,
                                      const LinfExtractionOptions& options = {});

}  // namespace dvz
