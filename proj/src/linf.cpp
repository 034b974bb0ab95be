#include "dvz/linf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "dvz/stats.hpp"

namespace dvz {

namespace {

Index isqrt(Index m) {
  auto r = static_cast<Index>(std::sqrt(static_cast<double>(m)));
  while (r * r > m) --r;
  while ((r + 1) * (r + 1) <= m) ++r;
  return r;
}

// Depth-first walk over sign vectors. Partial sums are built left to right as
// s_0 = 0, s_i = s_{i-1} + eps_i x_i, which is exactly the order of a naive
// per-pattern summation, so every visited value is bit-identical to it.
// With fix_first the first sign is +1 (the norm is even, so the other half
// repeats the same values). The top levels are split into tasks; task states
// are merged in task order.
template <typename State, typename Visit, typename Merge>
State enumerate_sign_sums(const NormSpec& spec, const Eigen::MatrixXd& x, bool fix_first, unsigned workers,
                          const State& init, Visit visit, Merge merge) {
  const Index n = x.rows();
  const Index m = x.cols();
  const Index first_free = fix_first ? 1 : 0;
  const Index prefix = std::min<Index>(m - first_free, 4);
  const std::size_t tasks = std::size_t{1} << prefix;
  std::vector<State> states(tasks, init);

  parallel_for(tasks, workers, [&](std::size_t task) {
    std::vector<Eigen::VectorXd> level(static_cast<std::size_t>(m + 1), Eigen::VectorXd::Zero(n));
    std::vector<int> signs(static_cast<std::size_t>(m), 1);
    State& state = states[task];
    for (Index i = 0; i < first_free + prefix; ++i) {
      int s = 1;
      if (i >= first_free) {
        const Index bit = prefix - 1 - (i - first_free);
        s = ((task >> bit) & 1u) ? -1 : 1;
      }
      signs[static_cast<std::size_t>(i)] = s;
      level[static_cast<std::size_t>(i + 1)] = level[static_cast<std::size_t>(i)] + double(s) * x.col(i);
    }
    auto dfs = [&](auto&& self, Index depth) -> void {
      if (depth == m) {
        visit(state, norm_eval(spec, level[static_cast<std::size_t>(m)]), signs);
        return;
      }
      for (int s : {1, -1}) {
        signs[static_cast<std::size_t>(depth)] = s;
        level[static_cast<std::size_t>(depth + 1)].noalias() =
            level[static_cast<std::size_t>(depth)] + double(s) * x.col(depth);
        self(self, depth + 1);
      }
    };
    dfs(dfs, first_free + prefix);
  });

  State total = init;
  for (const auto& s : states) merge(total, s);
  return total;
}

struct Extrema {
  double max = -1.0;
  double min = std::numeric_limits<double>::infinity();
  std::vector<int> argmax;
};

Extrema sign_extrema(const NormSpec& spec, const Eigen::MatrixXd& x, unsigned workers) {
  return enumerate_sign_sums(
      spec, x, true, workers, Extrema{},
      [](Extrema& st, double v, const std::vector<int>& signs) {
        if (v > st.max) {
          st.max = v;
          st.argmax = signs;
        }
        st.min = std::min(st.min, v);
      },
      [](Extrema& acc, const Extrema& part) {
        if (part.max > acc.max) {
          acc.max = part.max;
          acc.argmax = part.argmax;
        }
        acc.min = std::min(acc.min, part.min);
      });
}

bool is_sup_type(const NormSpec& spec, Eigen::VectorXd& row_weights) {
  if (spec.is_lp() && std::isinf(spec.p())) {
    row_weights = Eigen::VectorXd::Ones(spec.dim());
    return true;
  }
  if (const auto* w = std::get_if<NormSpec::WeightedSup>(&spec.kind())) {
    row_weights = Eigen::Map<const Eigen::VectorXd>(w->weights.data(), static_cast<Index>(w->weights.size()));
    return true;
  }
  return false;
}

void require_norms_at_least(const VectorSystem& system, double bound, const char* who) {
  if (system.min_norm() < bound * (1.0 - 1e-12))
    throw PreconditionError(std::string(who) + ": every vector must have norm >= " + std::to_string(bound));
}

}  // namespace

VectorSystem::VectorSystem(NormSpec ambient, Eigen::MatrixXd vectors, double lower_norm_bound)
    : ambient_(std::move(ambient)), vectors_(std::move(vectors)), lower_(lower_norm_bound) {
  if (vectors_.cols() < 1) throw InputError("VectorSystem: need at least one vector");
  if (vectors_.rows() != ambient_.dim()) throw InputError("VectorSystem: vectors do not live in the ambient space");
  if (!(lower_ >= 0.0)) throw InputError("VectorSystem: lower norm bound must be nonnegative");
  if (min_norm() < lower_ * (1.0 - 1e-12))
    throw InputError("VectorSystem: some vector has norm below the asserted lower bound");
}

double VectorSystem::min_norm() const {
  double best = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < vectors_.cols(); ++j) best = std::min(best, norm_eval(ambient_, vectors_.col(j)));
  return best;
}

VectorSystem VectorSystem::subsystem(const std::vector<Index>& indices) const {
  Eigen::MatrixXd v(vectors_.rows(), static_cast<Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) v.col(static_cast<Index>(j)) = vectors_.col(indices[j]);
  return VectorSystem(ambient_, std::move(v), lower_);
}

VectorSystem VectorSystem::standard_basis(const NormSpec& ambient) {
  const Index n = ambient.dim();
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n);
  double lower = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < n; ++j) lower = std::min(lower, norm_eval(ambient, e.col(j)));
  return VectorSystem(ambient, std::move(e), lower);
}

BasisConstant linf_basis_constant(const VectorSystem& system, const ConstantOptions& options) {
  const Index m = system.size();
  const Eigen::MatrixXd& x = system.vectors();
  BasisConstant out;
  if (m <= kMaxExactEnumeration) {
    const Extrema e = sign_extrema(system.ambient(), x, options.policy.workers);
    out.value = e.max;
    out.min_sign_norm = e.min;
    out.maximizing_signs = e.argmax;
    out.exact = true;
    out.method = "enumeration";
    return out;
  }
  Eigen::VectorXd row_weights;
  if (is_sup_type(system.ambient(), row_weights)) {
    // ||X a||_inf <= max_r w_r sum_i |X_ri| |a_i|, attained at a_i = sign(X_ri).
    const Eigen::VectorXd rows = row_weights.cwiseProduct(x.cwiseAbs().rowwise().sum());
    Index r = 0;
    out.value = rows.maxCoeff(&r);
    out.maximizing_signs.resize(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) out.maximizing_signs[static_cast<std::size_t>(i)] = x(r, i) < 0 ? -1 : 1;
    if (out.maximizing_signs[0] < 0)
      for (int& s : out.maximizing_signs) s = -s;
    out.exact = true;
    out.method = "row-sum";
    return out;
  }
  if (!options.allow_sampled)
    throw SizeError("linf_basis_constant: m=" + std::to_string(m) +
                    " exceeds the exact enumeration cutoff of 24; enable the sampled estimator");
  if (!options.rng) throw InputError("linf_basis_constant: sampled mode needs a random source");
  RandomSource local = options.rng->fork();
  out.value = 0.0;
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    const Eigen::VectorXd signs = sample_signs(m, local);
    const double v = norm_eval(system.ambient(), x * signs);
    if (v > out.value) {
      out.value = v;
      out.maximizing_signs.assign(signs.data(), signs.data() + m);
    }
  }
  out.exact = false;
  out.method = "sampled";
  return out;
}

JamesStepResult james_step(const VectorSystem& system, double asserted_constant, const ExecPolicy& policy) {
  const Index m = system.size();
  if (m < 4) throw InputError("james_step: need at least 4 vectors");
  if (!(asserted_constant >= 1.0)) throw InputError("james_step: asserted constant must be >= 1");
  require_norms_at_least(system, 1.0, "james_step");
  const Index b = isqrt(m);
  if (b > kMaxExactEnumeration) throw SizeError("james_step: block size exceeds the exact enumeration cutoff");

  ConstantOptions check;
  check.policy = policy;
  Eigen::VectorXd unused;
  if (m <= kMaxExactEnumeration || is_sup_type(system.ambient(), unused)) {
    const double actual = linf_basis_constant(system, check).value;
    if (actual > asserted_constant * (1.0 + 1e-12))
      throw InputError("james_step: system constant " + std::to_string(actual) + " exceeds asserted L=" +
                       std::to_string(asserted_constant));
  }

  const double target = std::sqrt(asserted_constant);
  const NormSpec& spec = system.ambient();
  const Eigen::MatrixXd& x = system.vectors();
  Eigen::MatrixXd y(x.rows(), b);
  for (Index j = 0; j < b; ++j) {
    const Eigen::MatrixXd block = x.middleCols(j * b, b);
    const Extrema e = sign_extrema(spec, block, policy.workers);
    if (e.max <= target * (1.0 + 1e-12)) {
      VectorSystem out_system(spec, block, system.lower_norm_bound());
      JamesStepResult out{std::move(out_system), asserted_constant, target, true, j, e.max, true};
      out.verified = e.max <= target + 1e-12;
      return out;
    }
    // The maximizing vertex violates the target; normalize it.
    Eigen::VectorXd combo = Eigen::VectorXd::Zero(x.rows());
    for (Index i = 0; i < b; ++i) combo += double(e.argmax[static_cast<std::size_t>(i)]) * block.col(i);
    y.col(j) = combo / e.max;
  }
  VectorSystem out_system(spec, std::move(y), 1.0);
  const Extrema e = sign_extrema(spec, out_system.vectors(), policy.workers);
  JamesStepResult out{std::move(out_system), asserted_constant, target, false, -1, e.max, false};
  out.verified = e.max <= target + 1e-12;
  return out;
}

int james_planned_steps(double L, double eps) {
  if (!(eps > 0.0)) throw InputError("james_planned_steps: eps must be positive");
  if (!(L >= 1.0)) throw InputError("james_planned_steps: L must be >= 1");
  if (L <= 1.0 + eps) return 0;
  return static_cast<int>(std::ceil(std::log2(std::log(L) / std::log1p(eps)) - 1e-12));
}

JamesIterateResult james_iterate(const VectorSystem& system, double asserted_constant, double eps,
                                 const ExecPolicy& policy) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InputError("james_iterate: eps must lie in (0,1]");
  const int planned = james_planned_steps(asserted_constant, eps);

  auto exact_if_small = [&](const VectorSystem& s) -> std::optional<double> {
    if (s.size() > kMaxExactEnumeration) {
      Eigen::VectorXd w;
      if (!is_sup_type(s.ambient(), w)) return std::nullopt;
    }
    ConstantOptions opts;
    opts.policy = policy;
    return linf_basis_constant(s, opts).value;
  };

  JamesIterateResult out{system, planned, 0, false, {}, 0.0, false, std::nullopt, false, false};
  out.levels.push_back({system.size(), asserted_constant, exact_if_small(system), false});
  double L = asserted_constant;
  for (int step = 0; step < planned; ++step) {
    if (out.system.size() < 4) break;
    JamesStepResult r = james_step(out.system, L, policy);
    L = r.exact_constant ? std::min(r.target_constant, *r.exact_constant) : r.target_constant;
    out.levels.push_back({r.system.size(), L, r.exact_constant, r.block_returned});
    out.system = std::move(r.system);
    ++out.depth;
  }
  out.completed = out.depth == planned;

  const auto& last = out.levels.back();
  out.final_exact = last.exact_constant.has_value();
  out.final_constant = last.exact_constant.value_or(last.asserted_constant);
  if (out.system.size() <= kMaxExactEnumeration) {
    const Extrema e = sign_extrema(out.system.ambient(), out.system.vectors(), policy.workers);
    out.min_sign_norm = e.min;
    out.lower_ok = e.min >= (1.0 - eps) - 1e-12;
  }
  out.upper_ok = out.final_exact && out.final_constant <= 1.0 + eps + 1e-12;
  return out;
}

NetEmbedding net_embedding_l2_to_linf(Index k, double eps, RandomSource& rng, std::uint64_t samples,
                                      std::optional<std::uint64_t> net_budget) {
  if (samples < 1) throw InputError("net_embedding_l2_to_linf: samples must be at least 1");
  NetEmbedding out;
  out.net = build_net(k, eps, rng, net_budget);
  out.target_dim = out.net.size();
  out.samples = samples;
  out.guaranteed_distortion = 1.0 / (1.0 - 0.5 * eps * eps);
  RandomSource local = rng.fork();
  out.min_ratio = std::numeric_limits<double>::infinity();
  out.max_ratio = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = sample_sphere(k, local);
    const double r = (out.net.points.transpose() * x).cwiseAbs().maxCoeff();
    out.min_ratio = std::min(out.min_ratio, r);
    out.max_ratio = std::max(out.max_ratio, r);
  }
  out.measured_distortion = out.max_ratio / out.min_ratio;
  return out;
}

std::optional<TightNetSection> tight_net_section(Index k, double theta, Index max_points, RandomSource& rng,
                                                 std::uint64_t distortion_samples, int distortion_restarts) {
  if (k < 1) throw InputError("tight_net_section: k must be positive");
  if (!(theta > 0.0 && theta < std::sqrt(2.0))) throw InputError("tight_net_section: theta must lie in (0, sqrt 2)");
  if (max_points < k) throw InputError("tight_net_section: max_points must be at least k");
  RandomSource local = rng.fork();
  TightNetSection out;
  out.seed = local.master_seed();
  out.stream = local.stream_id();
  out.theta = theta;

  const double limit = 1.0 - 0.5 * theta * theta;
  std::vector<Eigen::VectorXd> kept;
  Eigen::MatrixXd gram_rows(0, k);
  std::uint64_t rejections = 0;
  for (;;) {
    const std::uint64_t budget = std::max<std::uint64_t>(200, 200 * kept.size());
    if (rejections >= budget) break;
    const Eigen::VectorXd c = sample_sphere(k, local);
    const bool far = kept.empty() || (gram_rows * c).cwiseAbs().maxCoeff() < limit;
    if (!far) {
      ++rejections;
      continue;
    }
    rejections = 0;
    kept.push_back(c);
    if (static_cast<Index>(kept.size()) > max_points) return std::nullopt;
    gram_rows.conservativeResize(static_cast<Index>(kept.size()), Eigen::NoChange);
    gram_rows.row(gram_rows.rows() - 1) = c.transpose();
  }
  const Index m = gram_rows.rows();
  if (m < k) return std::nullopt;

  // Alternate between the nearest tight frame and unit rows.
  Eigen::MatrixXd t = gram_rows;
  for (int it = 0; it < 200; ++it) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.transpose() * t);
    const Eigen::VectorXd ev = es.eigenvalues();
    out.frame_condition = std::sqrt(ev.maxCoeff() / ev.minCoeff());
    if (out.frame_condition < 1.0 + 1e-13) break;
    const Eigen::MatrixXd inv_sqrt =
        es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
    t = t * inv_sqrt;
    t.rowwise().normalize();
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t.transpose() * t);
    out.frame_condition = std::sqrt(es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff());
  }
  out.points = t.transpose();
  out.section = Frame::orthonormalize(t);
  out.distortion = measure_distortion(NormSpec::sup(m), out.section, distortion_samples, distortion_restarts, local);
  return out;
}

double linf_upper_bound_dim(double n, double eps) {
  if (!(eps > 0.0 && eps < 1.0 / 32.0)) throw DomainError("linf_upper_bound_dim: requires 0 < eps < 1/32");
  if (!(n >= 2.0)) throw DomainError("linf_upper_bound_dim: requires n >= 2");
  return 4.0 * std::log(n) / std::log(1.0 / (32.0 * eps));
}

double gaussian_abs_moment(double p) {
  if (!(p > 0.0)) throw InputError("gaussian_abs_moment: p must be positive");
  const double pi = std::acos(-1.0);
  return std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(pi));
}

double bdgjn_upper_bound(double p, double C, double n, std::optional<double> gaussian_moment) {
  if (!(p >= 2.0)) throw DomainError("bdgjn_upper_bound: requires p >= 2");
  if (!(C >= 1.0)) throw DomainError("bdgjn_upper_bound: requires C >= 1");
  if (!(n >= 1.0)) throw DomainError("bdgjn_upper_bound: requires n >= 1");
  const double moment = gaussian_moment.value_or(gaussian_abs_moment(p));
  return C * C * std::pow(moment, 2.0 / p) * std::pow(n, 2.0 / p);
}

ProbabilityEstimate sign_flip_probability(const VectorSystem& system, const Eigen::VectorXd& a,
                                          std::uint64_t samples, RandomSource& rng, bool exact) {
  const Index m = system.size();
  if (a.size() != m) throw InputError("sign_flip_probability: coefficient vector has the wrong length");
  require_norms_at_least(system, 1.0, "sign_flip_probability");
  const double level = a.cwiseAbs().maxCoeff();
  const Eigen::MatrixXd scaled = system.vectors() * a.asDiagonal();
  ProbabilityEstimate out;
  if (exact) {
    if (m > 20) throw SizeError("sign_flip_probability: exact mode supports m <= 20");
    // Even norm: the pattern and its negation agree, so half the patterns suffice.
    const std::uint64_t hits = enumerate_sign_sums(
        system.ambient(), scaled, true, 1, std::uint64_t{0},
        [level](std::uint64_t& c, double v, const std::vector<int>&) { c += v < level ? 1 : 0; },
        [](std::uint64_t& acc, std::uint64_t part) { acc += part; });
    out.exact = true;
    out.trials = std::uint64_t{1} << (m - 1);
    out.hits = hits;
    out.probability = static_cast<double>(hits) / static_cast<double>(out.trials);
    return out;
  }
  if (samples < 1) throw InputError("sign_flip_probability: samples must be at least 1");
  RandomSource local = rng.fork();
  for (std::uint64_t s = 0; s < samples; ++s) {
    const Eigen::VectorXd eps = sample_signs(m, local);
    if (norm_eval(system.ambient(), scaled * eps) < level) ++out.hits;
  }
  out.trials = samples;
  out.probability = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.sigma = std::sqrt(out.probability * (1.0 - out.probability) / static_cast<double>(samples));
  return out;
}

SmallBallEstimate small_ball_check(const VectorSystem& system, std::uint64_t samples, RandomSource& rng,
                                   const ExecPolicy& policy) {
  if (samples < 1) throw InputError("small_ball_check: samples must be at least 1");
  require_norms_at_least(system, 0.1, "small_ball_check");
  const Index m = system.size();
  SmallBallEstimate out;
  out.threshold = std::sqrt(std::log(static_cast<double>(m))) / 100.0;
  out.samples = samples;
  const auto total = static_cast<Index>(samples);
  const RandomSource base = rng.fork();
  std::vector<std::uint64_t> hits(chunk_count(total, policy.chunk_size), 0);
  parallel_for(hits.size(), policy.workers, [&](std::size_t c) {
    RandomSource local = base.substream(c);
    const Index begin = static_cast<Index>(c) * policy.chunk_size;
    const Index end = std::min(total, begin + policy.chunk_size);
    for (Index s = begin; s < end; ++s) {
      const Eigen::VectorXd g = sample_gaussian_vector(m, local);
      if (norm_eval(system.ambient(), system.vectors() * g) < out.threshold) ++hits[c];
    }
  });
  const std::uint64_t total_hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  out.fraction = static_cast<double>(total_hits) / static_cast<double>(samples);
  out.sigma = std::sqrt((2.0 / 3.0) * (1.0 / 3.0) / static_cast<double>(samples));
  return out;
}

BlockSelection select_good_blocks(const VectorSystem& system, RandomSource& rng, int max_retries) {
  const Index n = system.size();
  if (n < 16) throw InputError("select_good_blocks: need at least 16 vectors");
  if (max_retries < 1) throw InputError("select_good_blocks: max_retries must be at least 1");
  const Index b = isqrt(n);
  BlockSelection best;
  best.threshold = std::sqrt(std::log(static_cast<double>(n))) / 200.0;
  for (Index j = 0; j < b; ++j) {
    std::vector<Index> block(static_cast<std::size_t>(b));
    std::iota(block.begin(), block.end(), j * b);
    best.blocks.push_back(std::move(block));
  }
  const NormSpec& spec = system.ambient();
  const Eigen::MatrixXd& x = system.vectors();
  const RandomSource base = rng.fork();
  const double needed = static_cast<double>(b) / 4.0;
  std::vector<Eigen::VectorXd> best_combos;
  bool have_best = false;
  for (int draw = 0; draw < max_retries; ++draw) {
    RandomSource local = base.substream(static_cast<std::uint64_t>(draw));
    const Eigen::VectorXd g = sample_gaussian_vector(n, local);
    std::vector<Index> selected;
    std::vector<double> values;
    std::vector<Eigen::VectorXd> combos;
    for (Index j = 0; j < b; ++j) {
      const Eigen::VectorXd combo = x.middleCols(j * b, b) * g.segment(j * b, b);
      const double v = norm_eval(spec, combo);
      values.push_back(v);
      if (v > best.threshold) {
        selected.push_back(j);
        combos.push_back(combo / v);
      }
    }
    const bool success = static_cast<double>(selected.size()) >= needed;
    if (!have_best || selected.size() > best.selected.size() || success) {
      have_best = true;
      best.selected = std::move(selected);
      best.block_values = std::move(values);
      best_combos = std::move(combos);
      best.gaussian_draw_seed = local.master_seed();
      best.gaussian_draw_stream = local.stream_id();
    }
    best.draws = draw + 1;
    if (success) {
      best.success = true;
      break;
    }
  }
  best.y_vectors.resize(x.rows(), static_cast<Index>(best_combos.size()));
  for (std::size_t j = 0; j < best_combos.size(); ++j) best.y_vectors.col(static_cast<Index>(j)) = best_combos[j];
  return best;
}

LinfExtraction gaussian_linf_subspace(const VectorSystem& system, RandomSource& rng, Index target_count,
                                      const LinfExtractionOptions& options) {
  if (target_count < 1) throw InputError("gaussian_linf_subspace: target_count must be at least 1");
  require_norms_at_least(system, 0.1, "gaussian_linf_subspace");
  const NormSpec& spec = system.ambient();
  const Index n = system.size();
  LinfExtraction out;
  out.note =
      "greedy exact-enumeration search among the block vectors; the achieved constant is certified, "
      "the dimension carries no guarantee";

  if (options.L) {
    out.L = *options.L;
  } else {
    RandomSource local = rng.fork();
    SampleStats st;
    for (std::uint64_t s = 0; s < options.l_samples; ++s)
      st.add(norm_eval(spec, system.vectors() * sample_gaussian_vector(n, local)));
    out.L = st.mean() / std::sqrt(std::log(static_cast<double>(n)));
    out.L_estimated = true;
  }
  out.rademacher_bound = 80.0 * out.L;

  out.selection = select_good_blocks(system, rng);
  if (!out.selection.success)
    throw InputError("gaussian_linf_subspace: block selection failed after " +
                     std::to_string(out.selection.draws) +
                     " draws; the Gaussian-average hypothesis looks violated or n is too small");

  const Eigen::MatrixXd& y = out.selection.y_vectors;
  const Index available = y.cols();
  {
    RandomSource local = rng.fork();
    SampleStats st;
    for (std::uint64_t s = 0; s < options.rademacher_samples; ++s)
      st.add(norm_eval(spec, y * sample_signs(available, local)));
    out.rademacher_mean = st.mean();
    out.rademacher_std_error = st.stderr_of_mean();
    out.rademacher_within_bound = out.rademacher_mean <= out.rademacher_bound + 3.0 * out.rademacher_std_error;
  }

  const Index target = std::min({target_count, available, kMaxExactEnumeration});
  std::vector<Index> chosen;
  std::vector<bool> used(static_cast<std::size_t>(available), false);
  double constant = 0.0;
  for (Index step = 0; step < target; ++step) {
    double best_value = std::numeric_limits<double>::infinity();
    Index best_j = -1;
    for (Index j = 0; j < available; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      Eigen::MatrixXd trial(y.rows(), step + 1);
      for (Index c = 0; c < step; ++c) trial.col(c) = y.col(chosen[static_cast<std::size_t>(c)]);
      trial.col(step) = y.col(j);
      const double v = sign_extrema(spec, trial, options.policy.workers).max;
      if (v < best_value) {
        best_value = v;
        best_j = j;
      }
    }
    chosen.push_back(best_j);
    used[static_cast<std::size_t>(best_j)] = true;
    constant = best_value;
  }
  Eigen::MatrixXd picked(y.rows(), static_cast<Index>(chosen.size()));
  for (std::size_t c = 0; c < chosen.size(); ++c) picked.col(static_cast<Index>(c)) = y.col(chosen[c]);
  out.system.emplace(spec, std::move(picked), 1.0);
  out.chosen = std::move(chosen);
  out.exact_constant = constant;
  return out;
}

}  // namespace dvz
