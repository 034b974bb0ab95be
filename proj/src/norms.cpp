#include "dvz/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dvz {

namespace {

std::string format_p(double p) {
  if (std::isinf(p)) return "inf";
  std::ostringstream os;
  os.precision(6);
  os << p;
  return os.str();
}

}  // namespace

NormSpec NormSpec::lp(double p, Index dim) {
  if (dim < 1) throw InputError("NormSpec::lp: dimension must be positive");
  if (!(p >= 1.0)) throw InputError("NormSpec::lp: p must be >= 1 (got " + format_p(p) + ")");
  return NormSpec(Lp{p}, dim);
}

NormSpec NormSpec::sum(std::vector<WeightedTerm> terms) {
  if (terms.empty()) throw InputError("NormSpec::sum: at least one term required");
  const Index dim = terms.front().spec->dim();
  for (const auto& t : terms) {
    if (!t.spec) throw InputError("NormSpec::sum: null term");
    if (!(t.weight > 0.0) || !std::isfinite(t.weight))
      throw InputError("NormSpec::sum: weights must be positive and finite");
    if (t.spec->dim() != dim) throw InputError("NormSpec::sum: terms have different dimensions");
  }
  return NormSpec(Sum{std::move(terms)}, dim);
}

NormSpec NormSpec::sum(std::vector<std::pair<double, NormSpec>> terms) {
  std::vector<WeightedTerm> wt;
  wt.reserve(terms.size());
  for (auto& [w, s] : terms) wt.push_back({w, std::make_shared<const NormSpec>(std::move(s))});
  return sum(std::move(wt));
}

NormSpec NormSpec::weighted_sup(std::vector<double> weights) {
  if (weights.empty()) throw InputError("NormSpec::weighted_sup: weights must be nonempty");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw InputError("NormSpec::weighted_sup: weights must be positive and finite");
  const auto dim = static_cast<Index>(weights.size());
  return NormSpec(WeightedSup{std::move(weights)}, dim);
}

double NormSpec::p() const {
  if (const auto* l = std::get_if<Lp>(&kind_)) return l->p;
  throw InputError("NormSpec::p: not an lp norm");
}

std::string NormSpec::label() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Lp>) {
          return "l" + format_p(k.p);
        } else if constexpr (std::is_same_v<K, Sum>) {
          std::string s = "sum(";
          for (std::size_t i = 0; i < k.terms.size(); ++i) {
            if (i) s += ",";
            if (k.terms[i].weight != 1.0) s += format_p(k.terms[i].weight) + "*";
            s += k.terms[i].spec->label();
          }
          return s + ")";
        } else {
          return "wsup";
        }
      },
      kind_);
}

NormSpec NormSpec::with_dim(Index dim) const {
  return std::visit(
      [dim](const auto& k) -> NormSpec {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Lp>) {
          return NormSpec::lp(k.p, dim);
        } else if constexpr (std::is_same_v<K, Sum>) {
          std::vector<WeightedTerm> terms;
          for (const auto& t : k.terms)
            terms.push_back({t.weight, std::make_shared<const NormSpec>(t.spec->with_dim(dim))});
          return NormSpec::sum(std::move(terms));
        } else {
          throw InputError("NormSpec::with_dim: weighted sup norms have a fixed dimension");
        }
      },
      kind_);
}

bool operator==(const NormSpec& a, const NormSpec& b) {
  if (a.dim_ != b.dim_ || a.kind_.index() != b.kind_.index()) return false;
  if (const auto* la = std::get_if<NormSpec::Lp>(&a.kind_))
    return la->p == std::get<NormSpec::Lp>(b.kind_).p;
  if (const auto* wa = std::get_if<NormSpec::WeightedSup>(&a.kind_))
    return wa->weights == std::get<NormSpec::WeightedSup>(b.kind_).weights;
  const auto& sa = std::get<NormSpec::Sum>(a.kind_).terms;
  const auto& sb = std::get<NormSpec::Sum>(b.kind_).terms;
  if (sa.size() != sb.size()) return false;
  for (std::size_t i = 0; i < sa.size(); ++i)
    if (sa[i].weight != sb[i].weight || !(*sa[i].spec == *sb[i].spec)) return false;
  return true;
}

Eigen::VectorXd norm_subgradient(const NormSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& v) {
  if (v.size() != spec.dim()) throw InputError("norm_subgradient: dimension mismatch");
  return std::visit(
      [&](const auto& k) -> Eigen::VectorXd {
        using K = std::decay_t<decltype(k)>;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
        if constexpr (std::is_same_v<K, NormSpec::Lp>) {
          const double value = detail::lp_value(v, k.p);
          if (value == 0.0) return g;
          if (k.p == 1.0) {
            for (Index i = 0; i < v.size(); ++i) g[i] = (v[i] > 0) - (v[i] < 0);
          } else if (k.p == 2.0) {
            g = v / value;
          } else if (std::isinf(k.p)) {
            Index arg = 0;
            v.cwiseAbs().maxCoeff(&arg);
            g[arg] = v[arg] > 0 ? 1.0 : -1.0;
          } else {
            for (Index i = 0; i < v.size(); ++i) {
              const double r = std::abs(v[i]) / value;
              g[i] = std::copysign(std::pow(r, k.p - 1.0), v[i]);
            }
          }
        } else if constexpr (std::is_same_v<K, NormSpec::Sum>) {
          for (const auto& t : k.terms) g += t.weight * norm_subgradient(*t.spec, v);
        } else {
          Index arg = 0;
          double best = -1.0;
          for (Index i = 0; i < v.size(); ++i) {
            const double w = k.weights[static_cast<std::size_t>(i)] * std::abs(v[i]);
            if (w > best) {
              best = w;
              arg = i;
            }
          }
          if (best > 0.0) g[arg] = std::copysign(k.weights[static_cast<std::size_t>(arg)], v[arg]);
        }
        return g;
      },
      spec.kind());
}

namespace {

// Softmax over w_i |v_i| / tau, returned as signed weights w_i sign(v_i) s_i.
Eigen::VectorXd softmax_sup_gradient(const Eigen::Ref<const Eigen::VectorXd>& v,
                                     const Eigen::VectorXd& weights, double tau) {
  const Eigen::ArrayXd scaled = weights.array() * v.array().abs() / tau;
  const double peak = scaled.maxCoeff();
  const Eigen::ArrayXd e = (scaled - peak).exp();
  const Eigen::ArrayXd s = e / e.sum();
  Eigen::VectorXd g(v.size());
  for (Index i = 0; i < v.size(); ++i)
    g[i] = (v[i] >= 0 ? 1.0 : -1.0) * weights[i] * s[i];
  return g;
}

}  // namespace

Eigen::VectorXd smoothed_norm_gradient(const NormSpec& spec,
                                       const Eigen::Ref<const Eigen::VectorXd>& v, double tau) {
  if (v.size() != spec.dim()) throw InputError("smoothed_norm_gradient: dimension mismatch");
  return std::visit(
      [&](const auto& k) -> Eigen::VectorXd {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NormSpec::Lp>) {
          if (k.p == 1.0) {
            return (v.array() / (v.array().square() + tau * tau).sqrt()).matrix();
          }
          if (std::isinf(k.p)) {
            return softmax_sup_gradient(v, Eigen::VectorXd::Ones(v.size()), tau);
          }
          return norm_subgradient(spec, v);
        } else if constexpr (std::is_same_v<K, NormSpec::Sum>) {
          Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
          for (const auto& t : k.terms) g += t.weight * smoothed_norm_gradient(*t.spec, v, tau);
          return g;
        } else {
          const Eigen::VectorXd w =
              Eigen::Map<const Eigen::VectorXd>(k.weights.data(), static_cast<Index>(k.weights.size()));
          return softmax_sup_gradient(v, w, tau);
        }
      },
      spec.kind());
}

ComparisonConstants comparison_constants(const NormSpec& spec) {
  const auto n = static_cast<double>(spec.dim());
  return std::visit(
      [&](const auto& k) -> ComparisonConstants {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NormSpec::Lp>) {
          const double inv_p = std::isinf(k.p) ? 0.0 : 1.0 / k.p;
          const double scale = std::pow(n, inv_p - 0.5);
          // Extremal directions are the coordinate vectors and the diagonal.
          if (k.p >= 2.0) return {1.0, scale, true};
          return {scale, 1.0, true};
        } else if constexpr (std::is_same_v<K, NormSpec::Sum>) {
          double upper = 0.0;
          double lower = 0.0;
          bool analytic = k.terms.size() == 1;
          for (const auto& t : k.terms) {
            const auto c = comparison_constants(*t.spec);
            upper += t.weight * c.b_upper;
            lower = std::max(lower, t.weight * c.b_lower);
            analytic = analytic && c.analytic;
          }
          return {upper, lower, analytic};
        } else {
          // max_i w_i|x_i| on the sphere: largest weight at a coordinate vector,
          // smallest where all w_i|x_i| agree.
          double upper = 0.0;
          double inv_sq = 0.0;
          for (double w : k.weights) {
            upper = std::max(upper, w);
            inv_sq += 1.0 / (w * w);
          }
          return {upper, 1.0 / std::sqrt(inv_sq), true};
        }
      },
      spec.kind());
}

NormSpec figiel_norm_spec(Index n, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("figiel_norm_spec: eps must lie in (0,1)");
  if (n < 2) throw InputError("figiel_norm_spec: n must be at least 2");
  const double nd = static_cast<double>(n);
  // n >= eps^-4 with a relative slack: 0.1^-4 is not exact in binary.
  if (nd * std::pow(eps, 4.0) < 1.0 - 1e-12) {
    throw PreconditionError("figiel_norm_spec: requires n >= eps^-4 (n=" + std::to_string(n) +
                            ", eps^-4=" + std::to_string(std::pow(eps, -4.0)) + ")");
  }
  const double inv_p = 0.5 + std::log(2.0 * eps) / std::log(nd);
  const double p = 1.0 / inv_p;
  if (!(inv_p > 0.25 && inv_p < 0.5)) {
    throw PreconditionError("figiel_norm_spec: exponent p=" + std::to_string(p) +
                            " falls outside (2,4)");
  }
  return NormSpec::sum({{1.0, NormSpec::euclidean(n)}, {1.0, NormSpec::lp(p, n)}});
}

}  // namespace dvz
