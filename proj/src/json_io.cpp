#include "dvz/json_io.hpp"

#include <cmath>

namespace dvz {

namespace {

const Json& require(const Json& j, const char* key, const char* what) {
  if (!j.is_object() || !j.contains(key))
    throw InputError(std::string(what) + ": missing field \"" + key + "\"");
  return j.at(key);
}

Json matrix_columns(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Index c = 0; c < m.cols(); ++c) {
    Json col = Json::array();
    for (Index r = 0; r < m.rows(); ++r) col.push_back(m(r, c));
    out.push_back(std::move(col));
  }
  return out;
}

Eigen::MatrixXd columns_matrix(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw InputError(std::string(what) + ": expected a nonempty array of arrays");
  const auto rows = j.front().size();
  Eigen::MatrixXd m(static_cast<Index>(rows), static_cast<Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    if (!j[c].is_array() || j[c].size() != rows) throw InputError(std::string(what) + ": ragged array");
    for (std::size_t r = 0; r < rows; ++r) {
      if (!j[c][r].is_number()) throw InputError(std::string(what) + ": non-numeric entry");
      m(static_cast<Index>(r), static_cast<Index>(c)) = j[c][r].get<double>();
    }
  }
  return m;
}

}  // namespace

Json number_or_inf(double x) {
  if (std::isinf(x)) return x > 0 ? Json("inf") : Json("-inf");
  return Json(x);
}

double parse_number_or_inf(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInfinity;
    if (s == "-inf") return -kInfinity;
  }
  throw InputError("expected a number or \"inf\", got " + j.dump());
}

Json to_json(const NormSpec& spec) {
  return std::visit(
      [&](const auto& k) -> Json {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, NormSpec::Lp>) {
          return Json{{"kind", "lp"}, {"p", number_or_inf(k.p)}, {"dim", spec.dim()}};
        } else if constexpr (std::is_same_v<K, NormSpec::Sum>) {
          Json terms = Json::array();
          for (const auto& t : k.terms) terms.push_back(Json{{"w", t.weight}, {"spec", to_json(*t.spec)}});
          return Json{{"kind", "sum"}, {"dim", spec.dim()}, {"terms", terms}};
        } else {
          return Json{{"kind", "wsup"}, {"dim", spec.dim()}, {"weights", k.weights}};
        }
      },
      spec.kind());
}

NormSpec norm_from_json(const Json& j) {
  const auto kind = require(j, "kind", "norm spec").get<std::string>();
  if (kind == "lp") {
    const double p = parse_number_or_inf(require(j, "p", "norm spec"));
    return NormSpec::lp(p, require(j, "dim", "norm spec").get<Index>());
  }
  if (kind == "sum") {
    std::vector<std::pair<double, NormSpec>> terms;
    for (const auto& t : require(j, "terms", "norm spec"))
      terms.emplace_back(require(t, "w", "sum term").get<double>(), norm_from_json(require(t, "spec", "sum term")));
    NormSpec out = NormSpec::sum(std::move(terms));
    if (j.contains("dim") && j.at("dim").get<Index>() != out.dim())
      throw InputError("norm spec: \"dim\" disagrees with the terms");
    return out;
  }
  if (kind == "wsup") {
    NormSpec out = NormSpec::weighted_sup(require(j, "weights", "norm spec").get<std::vector<double>>());
    if (j.contains("dim") && j.at("dim").get<Index>() != out.dim())
      throw InputError("norm spec: \"dim\" disagrees with the weights");
    return out;
  }
  throw InputError("norm spec: unknown kind \"" + kind + "\"");
}

std::string norm_json_string(const NormSpec& spec) { return to_json(spec).dump(); }

Json to_json(const EpsNet& net) {
  return Json{{"k", net.k},         {"eps", net.eps},       {"size", net.size()},
              {"seed", net.seed},   {"stream", net.stream}, {"budget", net.construction_budget},
              {"points", matrix_columns(net.points)}};
}

EpsNet net_from_json(const Json& j) {
  EpsNet net;
  net.k = require(j, "k", "net").get<Index>();
  net.eps = require(j, "eps", "net").get<double>();
  net.seed = require(j, "seed", "net").get<std::uint64_t>();
  net.stream = j.value("stream", std::uint64_t{0});
  net.construction_budget = j.value("budget", std::uint64_t{0});
  net.points = columns_matrix(require(j, "points", "net"), "net points");
  if (net.points.rows() != net.k) throw InputError("net: point length differs from k");
  for (Index c = 0; c < net.points.cols(); ++c)
    if (std::abs(net.points.col(c).norm() - 1.0) > 1e-9) throw InputError("net: points must be unit vectors");
  return net;
}

Json to_json(const Frame& frame) {
  return Json{{"n", frame.ambient_dim()}, {"k", frame.dim()}, {"columns", matrix_columns(frame.columns())}};
}

Frame frame_from_json(const Json& j) { return Frame(columns_matrix(require(j, "columns", "frame"), "frame")); }

Json to_json(const SectionCertificate& c) {
  return Json{{"status", "certified"},
              {"k", c.subspace.dim()},
              {"n", c.subspace.ambient_dim()},
              {"target_eps", c.target_eps},
              {"E", c.E},
              {"net", {{"k", c.net_k}, {"eps", c.net_eps}, {"size", c.net_size}, {"seed", c.net_seed},
                       {"stream", c.net_stream}}},
              {"net_min", c.net_min},
              {"net_max", c.net_max},
              {"certified_interval", {{"lo", c.certified_interval.lo}, {"hi", c.certified_interval.hi}}},
              {"certified_distortion", number_or_inf(c.certified_distortion())},
              {"empirical_distortion", c.empirical_distortion},
              {"attempts_used", c.attempts_used},
              {"seed", c.seed},
              {"stream", c.stream},
              {"subspace", to_json(c.subspace)}};
}

Json to_json(const SectionFailure& f) {
  Json out{{"status", "failed"},    {"attempts_used", f.attempts_used}, {"E", f.E},
           {"best_deviation", f.best_deviation}, {"seed", f.seed}, {"target_eps", f.target_eps}};
  if (f.best_subspace) out["best_subspace"] = to_json(*f.best_subspace);
  return out;
}

Json to_json(const SphereStatistics& s) {
  return Json{{"E", s.E}, {"M", s.M}, {"stderr", s.std_error}, {"samples", s.samples}, {"L", s.L}};
}

Json to_json(const DistortionMeasurement& m) {
  return Json{{"distortion", m.distortion}, {"max", m.max_value},       {"min", m.min_value},
              {"sampled_max", m.sampled_max}, {"sampled_min", m.sampled_min}};
}

Json to_json(const VectorSystem& system) {
  return Json{{"norm", to_json(system.ambient())},
              {"m", system.size()},
              {"lower_norm_bound", system.lower_norm_bound()},
              {"vectors", matrix_columns(system.vectors())}};
}

VectorSystem vector_system_from_json(const Json& j) {
  NormSpec norm = norm_from_json(require(j, "norm", "vector system"));
  Eigen::MatrixXd v = columns_matrix(require(j, "vectors", "vector system"), "vector system");
  const double lower = j.contains("lower_norm_bound") ? j.at("lower_norm_bound").get<double>() : 0.0;
  return VectorSystem(std::move(norm), std::move(v), lower);
}

Json to_json(const BasisConstant& c) {
  Json out{{"value", c.value}, {"tag", c.exact ? "exact" : "sampled"}, {"method", c.method},
           {"maximizing_signs", c.maximizing_signs}};
  if (c.min_sign_norm) out["min_sign_norm"] = *c.min_sign_norm;
  return out;
}

}  // namespace dvz
