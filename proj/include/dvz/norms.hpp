#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dvz/errors.hpp"

namespace dvz {

using Index = Eigen::Index;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class NormSpec;

struct WeightedTerm {
  double weight;
  std::shared_ptr<const NormSpec> spec;
};

// A norm on R^n given in closed form. Three families are supported:
//
//   Lp           ||x||_p, 1 <= p <= inf (p = inf is represented exactly)
//   Sum          sum_i w_i ||x||_(i), w_i > 0, all terms on the same R^n
//   WeightedSup  max_i w_i |x_i|
//
// Lp and Sum-of-Lp norms are 1-symmetric. A WeightedSup norm is
// sign-invariant and is permutation-invariant only when all weights agree.
// Values are immutable after construction.
class NormSpec {
 public:
  struct Lp {
    double p;
  };
  struct Sum {
    std::vector<WeightedTerm> terms;
  };
  struct WeightedSup {
    std::vector<double> weights;
  };
  using Kind = std::variant<Lp, Sum, WeightedSup>;

  static NormSpec lp(double p, Index dim);
  static NormSpec euclidean(Index dim) { return lp(2.0, dim); }
  static NormSpec sup(Index dim) { return lp(kInfinity, dim); }
  static NormSpec sum(std::vector<WeightedTerm> terms);
  static NormSpec sum(std::vector<std::pair<double, NormSpec>> terms);
  static NormSpec weighted_sup(std::vector<double> weights);

  Index dim() const { return dim_; }
  const Kind& kind() const { return kind_; }

  bool is_lp() const { return std::holds_alternative<Lp>(kind_); }
  // p of an Lp spec; throws InputError for other kinds.
  double p() const;

  // Short human-readable label, e.g. "l4", "linf", "sum(l2,l3.07)".
  std::string label() const;

  // Same norm on a different ambient dimension. Only Lp and Sum-of-Lp specs
  // can be resized; WeightedSup throws.
  NormSpec with_dim(Index dim) const;

  friend bool operator==(const NormSpec& a, const NormSpec& b);

 private:
  NormSpec(Kind kind, Index dim) : kind_(std::move(kind)), dim_(dim) {}
  Kind kind_;
  Index dim_;
};

namespace detail {

template <typename Derived>
typename Derived::Scalar lp_value(const Eigen::MatrixBase<Derived>& v, double p) {
  using Scalar = typename Derived::Scalar;
  using std::abs;
  using std::pow;
  if (v.size() == 0) return Scalar(0);
  if (p == 1.0) return v.cwiseAbs().sum();
  if (p == 2.0) return v.norm();
  const Scalar peak = v.cwiseAbs().maxCoeff();
  if (std::isinf(p) || peak == Scalar(0)) return peak;
  // Scale by the peak so large p neither overflows nor underflows.
  Scalar acc(0);
  const Scalar inv_peak = Scalar(1) / peak;
  if (p == std::floor(p) && p <= 8.0) {
    const int ip = static_cast<int>(p);
    for (Index i = 0; i < v.size(); ++i) {
      const Scalar t = abs(v[i]) * inv_peak;
      Scalar term = t;
      for (int e = 1; e < ip; ++e) term *= t;
      acc += term;
    }
  } else {
    for (Index i = 0; i < v.size(); ++i) acc += pow(abs(v[i]) * inv_peak, Scalar(p));
  }
  return peak * pow(acc, Scalar(1.0 / p));
}

}  // namespace detail

// ||v|| for the given spec. Throws InputError on dimension mismatch.
template <typename Derived>
typename Derived::Scalar norm_eval(const NormSpec& spec, const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  if (v.size() != spec.dim()) {
    throw InputError("norm_eval: vector length " + std::to_string(v.size()) +
                     " does not match norm dimension " + std::to_string(spec.dim()));
  }
  // Expressions such as q * x must be evaluated once, not per coefficient.
  const auto& w = v.derived().eval();
  return std::visit(
      [&](const auto& k) -> Scalar {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NormSpec::Lp>) {
          return detail::lp_value(w, k.p);
        } else if constexpr (std::is_same_v<K, NormSpec::Sum>) {
          Scalar acc(0);
          for (const auto& t : k.terms) acc += Scalar(t.weight) * norm_eval(*t.spec, w);
          return acc;
        } else {
          Scalar best(0);
          for (Index i = 0; i < w.size(); ++i) {
            using std::abs;
            const Scalar wi = Scalar(k.weights[static_cast<std::size_t>(i)]) * abs(w[i]);
            if (wi > best) best = wi;
          }
          return best;
        }
      },
      spec.kind());
}

// A subgradient of the norm at v: a vector g with <g, v> = ||v|| and
// dual norm of g at most 1. Zero at v = 0.
Eigen::VectorXd norm_subgradient(const NormSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& v);

// Gradient of a smooth surrogate of the norm with smoothing scale tau > 0.
// Converges to a subgradient as tau -> 0. The sup-type pieces use a softmax,
// the l1 piece uses sqrt(x^2 + tau^2); other Lp pieces are already smooth
// away from the origin.
Eigen::VectorXd smoothed_norm_gradient(const NormSpec& spec,
                                       const Eigen::Ref<const Eigen::VectorXd>& v, double tau);

struct ComparisonConstants {
  double b_upper;  // smallest b with ||x|| <= b ||x||_2
  double b_lower;  // largest a with a ||x||_2 <= ||x||
  bool analytic;   // false: valid bounds of unknown tightness

  double distortion() const { return b_upper / b_lower; }
};

ComparisonConstants comparison_constants(const NormSpec& spec);

// ||x|| = ||x||_2 + ||x||_p with p chosen so that n^(1/p - 1/2) = 2 eps.
// Requires n >= eps^-4; the resulting p lies in (2, 4).
NormSpec figiel_norm_spec(Index n, double eps);

}  // namespace dvz
