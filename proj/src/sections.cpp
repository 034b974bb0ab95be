#include "dvz/sections.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace dvz {

namespace {

double section_norm(const NormSpec& spec, const Eigen::MatrixXd& q, const Eigen::VectorXd& x) {
  return norm_eval(spec, q * x);
}

struct Candidate {
  double value;
  Eigen::VectorXd x;
};

Candidate ascend(const NormSpec& spec, const Eigen::MatrixXd& q, Eigen::VectorXd x) {
  x.normalize();
  double fx = section_norm(spec, q, x);
  for (int it = 0; it < 1000; ++it) {
    const Eigen::VectorXd g = norm_subgradient(spec, q * x);
    Eigen::VectorXd h = q.transpose() * g;
    const double hn = h.norm();
    if (hn == 0.0) break;
    h /= hn;
    const double fh = section_norm(spec, q, h);
    if (!(fh > fx * (1.0 + 1e-15))) break;
    x = std::move(h);
    fx = fh;
  }
  return {fx, x};
}

Candidate descend(const NormSpec& spec, const Eigen::MatrixXd& q, Eigen::VectorXd x) {
  x.normalize();
  double fx = section_norm(spec, q, x);
  double step = 0.5;
  static constexpr double kSmoothing[] = {1e-1, 1e-2, 1e-3, 1e-4, 1e-6, 1e-9, 0.0};
  for (double tau_rel : kSmoothing) {
    step = std::max(step, 1e-2);
    int stalled = 0;
    for (int it = 0; it < 100; ++it) {
      const Eigen::VectorXd v = q * x;
      const Eigen::VectorXd g = tau_rel > 0.0
                                    ? smoothed_norm_gradient(spec, v, tau_rel * v.cwiseAbs().maxCoeff())
                                    : norm_subgradient(spec, v);
      Eigen::VectorXd d = q.transpose() * g;
      d -= d.dot(x) * x;
      const double dn = d.norm();
      if (!(dn > 1e-15)) break;
      d /= dn;
      bool accepted = false;
      while (step > 1e-13) {
        Eigen::VectorXd xn = (x - step * d).normalized();
        const double fn = section_norm(spec, q, xn);
        if (fn < fx) {
          stalled = (fx - fn) < 1e-13 * fx ? stalled + 1 : 0;
          x = std::move(xn);
          fx = fn;
          accepted = true;
          step = std::min(1.0, step * 1.5);
          break;
        }
        step *= 0.5;
      }
      if (!accepted || stalled >= 5) break;
    }
  }
  return {fx, x};
}

}  // namespace

ExtremumResult norm_extremum_on_section(const NormSpec& spec, const Frame& frame, Extremum direction,
                                        int restarts, RandomSource& rng,
                                        const std::vector<Eigen::VectorXd>& starts) {
  if (restarts < 1) throw InputError("norm_extremum_on_section: restarts must be at least 1");
  if (frame.ambient_dim() != spec.dim())
    throw InputError("norm_extremum_on_section: frame and norm dimensions differ");
  const Eigen::MatrixXd& q = frame.columns();
  const Index k = frame.dim();

  std::vector<Eigen::VectorXd> inits;
  for (const auto& s : starts) {
    if (s.size() != k) throw InputError("norm_extremum_on_section: start point has wrong dimension");
    if (s.norm() > 0.0) inits.push_back(s);
  }
  for (int r = 0; r < restarts; ++r) inits.push_back(sample_sphere(k, rng));

  const bool maximize = direction == Extremum::Max;
  std::vector<double> values;
  values.reserve(inits.size());
  Candidate best{maximize ? -1.0 : std::numeric_limits<double>::infinity(), Eigen::VectorXd()};
  for (auto& x0 : inits) {
    Candidate c = maximize ? ascend(spec, q, std::move(x0)) : descend(spec, q, std::move(x0));
    values.push_back(c.value);
    // First-found wins ties.
    if (maximize ? c.value > best.value : c.value < best.value) best = std::move(c);
  }

  ExtremumResult out;
  out.coords = best.x;
  out.witness = q * best.x;
  out.value = norm_eval(spec, out.witness);
  out.restarts = static_cast<int>(values.size());
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  out.spread = out.value > 0.0 ? (*hi - *lo) / out.value : 0.0;
  for (double v : values)
    if (std::abs(v - out.value) <= 1e-6 * std::max(out.value, 1e-300)) ++out.agreeing;
  return out;
}

DRBasis dvoretzky_rogers_basis(const NormSpec& spec, int restarts, RandomSource& rng) {
  const ComparisonConstants cc = comparison_constants(spec);
  if (std::abs(cc.b_upper - 1.0) > 1e-12)
    throw PreconditionError("dvoretzky_rogers_basis: norm must satisfy b_upper = 1 (got " +
                            std::to_string(cc.b_upper) + "); rescale it first");
  const Index n = spec.dim();
  Eigen::MatrixXd complement = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd basis(n, n);
  DRBasis out;
  for (Index i = 0; i < n; ++i) {
    const Index d = complement.cols();
    const ExtremumResult ext =
        norm_extremum_on_section(spec, Frame(complement, 1e-8), Extremum::Max, restarts, rng);
    basis.col(i) = ext.witness;
    out.norms.push_back(ext.value);
    out.ascent_report.push_back({i + 1, ext.value, ext.restarts, ext.agreeing, ext.spread});
    if (d == 1) break;
    // Householder reflector H with H e_1 = y; columns 2..d of complement * H
    // span the orthogonal complement of the chosen direction.
    const Eigen::VectorXd& y = ext.coords;
    Eigen::VectorXd v = -y;
    v[0] += 1.0;
    const double vv = v.squaredNorm();
    if (vv > 1e-30) complement -= (2.0 / vv) * (complement * v) * v.transpose();
    complement = complement.rightCols(d - 1).eval();
  }
  out.frame = Frame(std::move(basis), 1e-8);
  return out;
}

Index milman_candidate_dim(double E, double b, double eps, Index n, double c) {
  if (!(E >= 0.0) || !(b > 0.0) || !(eps > 0.0 && eps < 1.0) || n < 1 || !(c > 0.0))
    throw InputError("milman_candidate_dim: need E >= 0, b > 0, eps in (0,1), n >= 1, c > 0");
  const double ratio = E / b;
  const double k = c * eps * eps / std::log(3.0 / eps) * ratio * ratio * static_cast<double>(n);
  return std::max<Index>(1, static_cast<Index>(std::floor(k)));
}

double SectionCertificate::certified_distortion() const {
  return certified_interval.lo > 0.0 ? certified_interval.hi / certified_interval.lo
                                     : std::numeric_limits<double>::infinity();
}

DistortionMeasurement measure_distortion(const NormSpec& spec, const Frame& frame, std::uint64_t samples,
                                         int restarts, RandomSource& rng) {
  if (samples < 1) throw InputError("measure_distortion: samples must be at least 1");
  if (frame.ambient_dim() != spec.dim()) throw InputError("measure_distortion: frame and norm dimensions differ");
  const Index k = frame.dim();
  const Eigen::MatrixXd& q = frame.columns();
  DistortionMeasurement out;

  Eigen::VectorXd best_max_x, best_min_x;
  double smax = -1.0;
  double smin = std::numeric_limits<double>::infinity();
  const Index batch = 256;
  const auto total = static_cast<Index>(samples);
  for (Index begin = 0; begin < total; begin += batch) {
    const Index count = std::min(batch, total - begin);
    Eigen::MatrixXd x(k, count);
    for (Index s = 0; s < count; ++s) x.col(s) = sample_sphere(k, rng);
    const Eigen::MatrixXd v = q * x;
    for (Index s = 0; s < count; ++s) {
      const double value = norm_eval(spec, v.col(s));
      if (value > smax) {
        smax = value;
        best_max_x = x.col(s);
      }
      if (value < smin) {
        smin = value;
        best_min_x = x.col(s);
      }
    }
  }
  out.sampled_max = smax;
  out.sampled_min = smin;

  if (k == 1) {
    out.max_value = out.min_value = smax;
    out.max_witness = out.min_witness = q * best_max_x;
    out.distortion = 1.0;
    return out;
  }

  // Projections of the coordinate vectors with the largest components in the
  // section are natural candidates for the peaks of sup-like norms.
  std::vector<Eigen::VectorXd> max_starts{best_max_x};
  {
    const Eigen::VectorXd row_norms = q.rowwise().squaredNorm();
    std::vector<Index> order(static_cast<std::size_t>(q.rows()));
    std::iota(order.begin(), order.end(), Index{0});
    const auto take = std::min<std::size_t>(order.size(), static_cast<std::size_t>(restarts));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](Index a, Index b) { return row_norms[a] > row_norms[b] || (row_norms[a] == row_norms[b] && a < b); });
    for (std::size_t i = 0; i < take; ++i) max_starts.push_back(q.row(order[i]).transpose());
  }
  const ExtremumResult hi = norm_extremum_on_section(spec, frame, Extremum::Max, restarts, rng, max_starts);
  const ExtremumResult lo = norm_extremum_on_section(spec, frame, Extremum::Min, restarts, rng, {best_min_x});
  out.max_value = hi.value;
  out.max_witness = hi.witness;
  if (smax > hi.value) {
    out.max_value = smax;
    out.max_witness = q * best_max_x;
  }
  out.min_value = lo.value;
  out.min_witness = lo.witness;
  if (smin < lo.value) {
    out.min_value = smin;
    out.min_witness = q * best_min_x;
  }
  out.distortion = out.min_value > 0.0 ? out.max_value / out.min_value : std::numeric_limits<double>::infinity();
  return out;
}

SectionSearchResult find_euclidean_section(const NormSpec& spec, double eps, Index k, int max_attempts,
                                           RandomSource& rng, const SectionSearchOptions& options) {
  const Index n = spec.dim();
  if (k < 1 || k > n) throw InputError("find_euclidean_section: need 1 <= k <= n");
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("find_euclidean_section: eps must lie in (0,1)");
  if (max_attempts < 1) throw InputError("find_euclidean_section: max_attempts must be at least 1");
  const double net_eps = eps / 2.0;

  double E = 0.0;
  if (options.mean_override) {
    E = *options.mean_override;
  } else {
    E = estimate_sphere_mean(spec, options.mean_samples, rng, options.policy).E;
  }

  EpsNet owned;
  const EpsNet* net = options.net;
  if (net) {
    if (net->k != k) throw InputError("find_euclidean_section: supplied net lives on the wrong sphere");
    if (std::abs(net->eps - net_eps) > 1e-12)
      throw InputError("find_euclidean_section: supplied net must have parameter eps/2");
  } else {
    owned = build_net(k, net_eps, rng, options.net_budget);
    net = &owned;
  }

  const RandomSource base = rng.fork();
  const double lo_allowed = (1.0 - eps) * E;
  const double hi_allowed = (1.0 + eps) * E;

  struct Attempt {
    bool pass = false;
    double net_min = 0.0;
    double net_max = 0.0;
    double deviation = 0.0;
    std::optional<Frame> frame;
    std::uint64_t stream = 0;
  };

  SectionFailure failure;
  failure.E = E;
  failure.seed = base.master_seed();
  failure.target_eps = eps;
  failure.best_deviation = std::numeric_limits<double>::infinity();

  const unsigned batch = std::max(1u, options.policy.workers);
  for (int first = 0; first < max_attempts; first += static_cast<int>(batch)) {
    const int count = std::min<int>(static_cast<int>(batch), max_attempts - first);
    std::vector<Attempt> attempts(static_cast<std::size_t>(count));
    parallel_for(static_cast<std::size_t>(count), options.policy.workers, [&](std::size_t i) {
      RandomSource local = base.substream(static_cast<std::uint64_t>(first) + i);
      Attempt a;
      a.stream = local.stream_id();
      a.frame = sample_subspace(n, k, local);
      const Eigen::MatrixXd images = a.frame->columns() * net->points;
      a.net_min = std::numeric_limits<double>::infinity();
      a.net_max = 0.0;
      for (Index j = 0; j < images.cols(); ++j) {
        const double value = norm_eval(spec, images.col(j));
        a.net_min = std::min(a.net_min, value);
        a.net_max = std::max(a.net_max, value);
      }
      a.deviation = std::max(std::abs(a.net_max / E - 1.0), std::abs(a.net_min / E - 1.0));
      a.pass = a.net_min >= lo_allowed && a.net_max <= hi_allowed;
      attempts[i] = std::move(a);
    });
    for (int i = 0; i < count; ++i) {
      Attempt& a = attempts[static_cast<std::size_t>(i)];
      if (a.pass) {
        SectionCertificate cert;
        cert.subspace = *a.frame;
        cert.net_k = k;
        cert.net_eps = net_eps;
        cert.net_size = net->size();
        cert.net_seed = net->seed;
        cert.net_stream = net->stream;
        cert.E = E;
        cert.net_min = a.net_min;
        cert.net_max = a.net_max;
        cert.certified_interval = amplify_net_bounds(a.net_min, a.net_max, net_eps);
        RandomSource measure_stream = base.substream(0xD157u).substream(static_cast<std::uint64_t>(first + i));
        cert.empirical_distortion = measure_distortion(spec, cert.subspace, options.distortion_samples,
                                                       options.distortion_restarts, measure_stream)
                                        .distortion;
        cert.attempts_used = first + i + 1;
        cert.seed = base.master_seed();
        cert.stream = a.stream;
        cert.target_eps = eps;
        return {std::move(cert), std::nullopt};
      }
      if (a.deviation < failure.best_deviation) {
        failure.best_deviation = a.deviation;
        failure.best_subspace = std::move(a.frame);
      }
    }
  }
  failure.attempts_used = max_attempts;
  return {std::nullopt, std::move(failure)};
}

KmaxResult kmax_search(const NormSpec& spec, double eps, RandomSource& rng, const KmaxOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("kmax_search: eps must lie in (0,1)");
  if (options.attempts_per_k < 1) throw InputError("kmax_search: attempts_per_k must be at least 1");
  const Index n = spec.dim();
  KmaxResult result;
  if (comparison_constants(spec).distortion() <= 1.0 + eps) {
    result.k_max = n;
    result.trials.push_back({n, true, 0, comparison_constants(spec).distortion()});
    return result;
  }
  const RandomSource base = rng.fork();

  auto try_k = [&](Index k) {
    KmaxTrial trial;
    trial.k = k;
    trial.best_distortion = std::numeric_limits<double>::infinity();
    if (k == 1) {
      trial.success = true;
      trial.attempts = 1;
      trial.best_distortion = 1.0;
      result.trials.push_back(trial);
      return true;
    }
    const RandomSource k_stream = base.substream(static_cast<std::uint64_t>(k));
    for (int a = 0; a < options.attempts_per_k; ++a) {
      RandomSource local = k_stream.substream(static_cast<std::uint64_t>(a));
      const Frame frame = sample_subspace(n, k, local);
      const double d =
          measure_distortion(spec, frame, options.distortion_samples, options.distortion_restarts, local)
              .distortion;
      trial.attempts = a + 1;
      trial.best_distortion = std::min(trial.best_distortion, d);
      if (d <= 1.0 + eps) {
        trial.success = true;
        break;
      }
    }
    result.trials.push_back(trial);
    return trial.success;
  };

  Index good = 1;
  Index bad = 0;
  try_k(1);
  for (Index k = 2;; k = std::min(2 * k, n)) {
    if (try_k(k)) {
      good = k;
      if (k == n) {
        result.k_max = n;
        return result;
      }
    } else {
      bad = k;
      break;
    }
  }
  while (bad - good > 1) {
    const Index mid = good + (bad - good) / 2;
    if (try_k(mid))
      good = mid;
    else
      bad = mid;
  }
  result.k_max = good;
  return result;
}

}  // namespace dvz
