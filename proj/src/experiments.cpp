#include "dvz/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dvz/concentration.hpp"
#include "dvz/linf.hpp"
#include "dvz/parallel.hpp"
#include "dvz/sections.hpp"

namespace dvz {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string p_key(double p) { return std::isinf(p) ? "inf" : fmt(p); }

RandomSource point_stream(const ExperimentConfig& config, const std::string& key) {
  return RandomSource(config.seed, hash_stream_id(config.experiment + "|" + key));
}

ExperimentRow base_row(const ExperimentConfig& config, const NormSpec& spec, Index n, Index k, double eps,
                       const RandomSource& rng, std::size_t columns) {
  ExperimentRow row;
  row.series = spec.label();
  row.norm_json = norm_json_string(spec);
  row.n = n;
  row.k = k;
  row.eps = eps;
  row.seed = config.seed;
  row.stream = rng.stream_id();
  row.values.assign(columns, std::nullopt);
  return row;
}

std::string error_status(const std::exception& e) { return std::string("error: ") + e.what(); }

// Fits y on x (already transformed) when there are at least two distinct x.
std::optional<LinearFit> try_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) return std::nullopt;
  return fit_line(x, y);
}

Json fit_json(const LinearFit& f) {
  return Json{{"slope", f.slope},
              {"slope_stderr", f.slope_stderr},
              {"intercept", f.intercept},
              {"intercept_stderr", f.intercept_stderr},
              {"r_squared", f.r_squared},
              {"points", f.points}};
}

template <typename Fn>
void for_points(std::size_t count, unsigned workers, Fn&& fn) {
  parallel_for(count, workers, std::forward<Fn>(fn));
}

void require_nonempty(bool ok, const char* what) {
  if (!ok) throw InputError(what);
}

template <typename T>
std::vector<T> get_vector(const Json& j, const char* key) {
  if (!j.is_array()) throw InputError(std::string("config: \"") + key + "\" must be an array");
  return j.get<std::vector<T>>();
}

}  // namespace

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "lp-scaling") {
    c.p_grid = {1.0, 4.0};
    c.n_grid = {64, 128, 256, 512, 1024, 2048};
    c.n_max_by_p = {{1.0, 1024}};
    c.eps = 0.5;
  } else if (experiment == "linf-logn") {
    c.n_grid = {64, 256, 1024, 4096};
    c.eps = 1.0 / 64.0;
  } else if (experiment == "figiel") {
    c.n_grid = {4096};
    // Random sections stay well below 1 + eps until k is a sizable fraction
    // of n, so the grid reaches k = n.
    c.k_grid = {1, 4, 16, 64, 256, 1024, 2048, 4096};
    c.eps = 0.25;
    c.attempts = 2;
    c.restarts = 2;
  } else if (experiment == "concentration") {
    for (double p : {1.0, 2.0, 4.0, kInfinity}) c.norms.push_back(to_json(NormSpec::lp(p, 1)));
    c.n_grid = {256, 1024};
    c.eps_grid = {0.1, 0.3, 0.5, 1.0};
    c.samples = 100000;
  } else if (experiment == "james-demo") {
    c.m_grid = {16, 256};
    c.eps = 1.0;
  } else {
    throw InputError("unknown experiment \"" + experiment + "\"");
  }
  return c;
}

ExperimentConfig config_from_json(const Json& j, const std::string& fallback_experiment) {
  if (!j.is_object()) throw InputError("config: expected a JSON object");
  std::string name = fallback_experiment;
  if (j.contains("experiment")) name = j.at("experiment").get<std::string>();
  if (name.empty()) throw InputError("config: no experiment name given");
  ExperimentConfig c = default_config(name);
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "experiment") continue;
      if (key == "p_grid") {
        c.p_grid.clear();
        for (const auto& p : value) c.p_grid.push_back(parse_number_or_inf(p));
      } else if (key == "n_max_by_p") {
        c.n_max_by_p.clear();
        for (const auto& [p, cap] : value.items())
          c.n_max_by_p[p == "inf" ? kInfinity : std::stod(p)] = cap.get<Index>();
      } else if (key == "n_grid") {
        c.n_grid = get_vector<Index>(value, "n_grid");
      } else if (key == "k_grid") {
        c.k_grid = get_vector<Index>(value, "k_grid");
      } else if (key == "m_grid") {
        c.m_grid = get_vector<Index>(value, "m_grid");
      } else if (key == "norms") {
        c.norms.clear();
        for (const auto& spec : value) {
          norm_from_json(spec);
          c.norms.push_back(spec);
        }
      } else if (key == "eps_grid") {
        c.eps_grid = get_vector<double>(value, "eps_grid");
      } else if (key == "eps") {
        c.eps = value.get<double>();
      } else if (key == "samples") {
        c.samples = value.get<std::uint64_t>();
      } else if (key == "distortion_samples") {
        c.distortion_samples = value.get<std::uint64_t>();
      } else if (key == "restarts") {
        c.restarts = value.get<int>();
      } else if (key == "attempts") {
        c.attempts = value.get<int>();
      } else if (key == "explicit_sections") {
        c.explicit_sections = value.get<bool>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "workers") {
        c.workers = value.get<unsigned>();
      } else if (key == "output") {
        c.output = value.get<std::string>();
      } else {
        throw InputError("config: unknown key \"" + key + "\"");
      }
    }
  } catch (const Json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json p_grid = Json::array();
  for (double p : c.p_grid) p_grid.push_back(number_or_inf(p));
  Json caps = Json::object();
  for (const auto& [p, cap] : c.n_max_by_p) caps[p_key(p)] = cap;
  return Json{{"experiment", c.experiment},
              {"p_grid", p_grid},
              {"n_max_by_p", caps},
              {"n_grid", c.n_grid},
              {"k_grid", c.k_grid},
              {"m_grid", c.m_grid},
              {"norms", c.norms},
              {"eps_grid", c.eps_grid},
              {"eps", c.eps},
              {"samples", c.samples},
              {"distortion_samples", c.distortion_samples},
              {"restarts", c.restarts},
              {"attempts", c.attempts},
              {"explicit_sections", c.explicit_sections},
              {"seed", c.seed},
              {"workers", c.workers},
              {"output", c.output}};
}

bool ExperimentRecord::has_failures() const {
  return std::any_of(rows.begin(), rows.end(), [](const ExperimentRow& r) { return r.status != "ok"; });
}

ExperimentRecord run_lp_scaling(const ExperimentConfig& config) {
  require_nonempty(!config.p_grid.empty() && !config.n_grid.empty(), "lp-scaling: p grid and n grid must be nonempty");
  struct Point {
    double p;
    Index n;
  };
  std::vector<Point> points;
  for (double p : config.p_grid) {
    const auto cap = config.n_max_by_p.find(p);
    for (Index n : config.n_grid)
      if (cap == config.n_max_by_p.end() || n <= cap->second) points.push_back({p, n});
  }
  ExperimentRecord rec;
  rec.config = config;
  rec.value_columns = {"kmax", "distortion_at_kmax", "trials", "whole_space_distortion"};
  rec.rows.resize(points.size());
  for_points(points.size(), config.workers, [&](std::size_t i) {
    const auto [p, n] = points[i];
    RandomSource rng = point_stream(config, "p=" + p_key(p) + "|n=" + std::to_string(n));
    const NormSpec spec = NormSpec::lp(p, std::max<Index>(n, 1));
    ExperimentRow row = base_row(config, spec, n, 0, config.eps, rng, rec.value_columns.size());
    try {
      if (n < 1) throw InputError("n must be positive");
      KmaxOptions opts;
      opts.attempts_per_k = config.attempts;
      opts.distortion_samples = config.distortion_samples;
      opts.distortion_restarts = config.restarts;
      const KmaxResult r = kmax_search(spec, config.eps, rng, opts);
      row.k = r.k_max;
      row.values[0] = static_cast<double>(r.k_max);
      for (const auto& t : r.trials)
        if (t.k == r.k_max && t.success) row.values[1] = t.best_distortion;
      row.values[2] = static_cast<double>(r.trials.size());
      row.values[3] = comparison_constants(spec).distortion();
    } catch (const std::exception& e) {
      row.status = error_status(e);
    }
    rec.rows[i] = std::move(row);
  });

  rec.plot.title = "Largest almost-Euclidean section of l_p^n (eps = " + fmt(config.eps) + ")";
  rec.plot.x_label = "n";
  rec.plot.y_label = "k_max";
  rec.plot.log_x = rec.plot.log_y = true;
  Json alphas = Json::object();
  for (double p : config.p_grid) {
    PlotSeries s;
    s.label = NormSpec::lp(p, 1).label();
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].p != p || rec.rows[i].status != "ok") continue;
      s.x.push_back(static_cast<double>(points[i].n));
      s.y.push_back(static_cast<double>(rec.rows[i].k));
      lx.push_back(std::log(s.x.back()));
      ly.push_back(std::log(s.y.back()));
    }
    s.fit = try_fit(lx, ly);
    if (s.fit) {
      rec.fits.push_back({s.label, "log k = a log n + b", *s.fit});
      alphas[s.label] = fit_json(*s.fit);
    }
    rec.plot.series.push_back(std::move(s));
  }
  rec.summary["alpha"] = alphas;
  return rec;
}

ExplicitLinfSection explicit_linf_kmax(Index n, double eps, RandomSource& rng, std::uint64_t distortion_samples,
                                       int restarts) {
  ExplicitLinfSection best;
  const double theta_star = std::sqrt(2.0 * (1.0 - 1.0 / (1.0 + eps)));
  static constexpr double kFactors[] = {0.95, 0.85, 0.75};
  for (Index k = 2; k <= n; ++k) {
    bool fits = false;
    bool found = false;
    for (std::size_t f = 0; f < 3 && !found; ++f) {
      const double theta = std::min(kFactors[f] * theta_star, 1.4);
      RandomSource local = rng.substream(static_cast<std::uint64_t>(k) * 16 + f);
      const auto section = tight_net_section(k, theta, n, local, distortion_samples, restarts);
      if (!section) break;  // smaller theta needs even more points
      fits = true;
      if (section->distortion.distortion <= 1.0 + eps) {
        best = {k, section->points.cols(), section->distortion.distortion};
        found = true;
      }
    }
    if (!fits || !found) break;
  }
  return best;
}

ExperimentRecord run_linf_logn(const ExperimentConfig& config) {
  require_nonempty(config.n_grid.size() >= 2, "linf-logn: n grid needs at least two points");
  ExperimentRecord rec;
  rec.config = config;
  rec.value_columns = {"kmax", "kmax_random", "kmax_explicit", "explicit_points", "upper_bound", "k_over_log_n"};
  rec.rows.resize(config.n_grid.size());
  for_points(config.n_grid.size(), config.workers, [&](std::size_t i) {
    const Index n = config.n_grid[i];
    RandomSource rng = point_stream(config, "n=" + std::to_string(n));
    const NormSpec spec = NormSpec::sup(std::max<Index>(n, 1));
    ExperimentRow row = base_row(config, spec, n, 0, config.eps, rng, rec.value_columns.size());
    try {
      if (n < 1) throw InputError("n must be positive");
      KmaxOptions opts;
      opts.attempts_per_k = config.attempts;
      opts.distortion_samples = config.distortion_samples;
      opts.distortion_restarts = config.restarts;
      RandomSource random_stream = rng.substream(0);
      const Index k_random = kmax_search(spec, config.eps, random_stream, opts).k_max;
      Index k = k_random;
      row.values[1] = static_cast<double>(k_random);
      if (config.explicit_sections) {
        RandomSource explicit_stream = rng.substream(1);
        const ExplicitLinfSection ex =
            explicit_linf_kmax(n, config.eps, explicit_stream, config.distortion_samples, config.restarts);
        row.values[2] = static_cast<double>(ex.k);
        row.values[3] = static_cast<double>(ex.points);
        k = std::max(k, ex.k);
      }
      row.k = k;
      row.values[0] = static_cast<double>(k);
      if (config.eps < 1.0 / 32.0 && n >= 2) {
        const double bound = linf_upper_bound_dim(static_cast<double>(n), config.eps);
        row.values[4] = bound;
        if (static_cast<double>(k) > bound) row.status = "bound_exceeded";
      }
      if (n >= 2) row.values[5] = static_cast<double>(k) / std::log(static_cast<double>(n));
    } catch (const std::exception& e) {
      row.status = error_status(e);
    }
    rec.rows[i] = std::move(row);
  });

  rec.plot.title = "Almost-Euclidean sections of l_inf^n (eps = " + fmt(config.eps) + ")";
  rec.plot.x_label = "n";
  rec.plot.y_label = "k_max";
  rec.plot.log_x = true;
  rec.plot.slope_symbol = "dk/dlog n";
  PlotSeries s;
  s.label = "linf";
  std::vector<double> lx;
  double ratio_lo = kInfinity, ratio_hi = 0.0;
  for (const auto& row : rec.rows) {
    if (row.status != "ok") continue;
    s.x.push_back(static_cast<double>(row.n));
    s.y.push_back(static_cast<double>(row.k));
    lx.push_back(std::log(s.x.back()));
    if (row.values[5]) {
      ratio_lo = std::min(ratio_lo, *row.values[5]);
      ratio_hi = std::max(ratio_hi, *row.values[5]);
    }
  }
  s.fit = try_fit(lx, s.y);
  if (s.fit) {
    rec.fits.push_back({"linf", "k = a log n + b", *s.fit});
    rec.summary["fit"] = fit_json(*s.fit);
  }
  if (ratio_hi > 0.0) rec.summary["k_over_log_n"] = {{"min", ratio_lo}, {"max", ratio_hi}};
  rec.plot.series.push_back(std::move(s));
  return rec;
}

ExperimentRecord run_figiel(const ExperimentConfig& config) {
  require_nonempty(!config.n_grid.empty() && !config.k_grid.empty(), "figiel: n grid and k grid must be nonempty");
  const Index n = config.n_grid.front();
  const NormSpec spec = figiel_norm_spec(n, config.eps);
  std::vector<Index> ks = config.k_grid;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  ExperimentRecord rec;
  rec.config = config;
  rec.value_columns = {"min_distortion", "median_distortion", "success"};
  rec.rows.resize(ks.size());
  for_points(ks.size(), config.workers, [&](std::size_t i) {
    const Index k = ks[i];
    RandomSource rng = point_stream(config, "n=" + std::to_string(n) + "|k=" + std::to_string(k));
    ExperimentRow row = base_row(config, spec, n, k, config.eps, rng, rec.value_columns.size());
    try {
      if (k < 1 || k > n) throw InputError("k must lie in [1, n]");
      std::vector<double> d;
      for (int a = 0; a < config.attempts; ++a) {
        RandomSource local = rng.substream(static_cast<std::uint64_t>(a));
        const Frame frame = sample_subspace(n, k, local);
        d.push_back(measure_distortion(spec, frame, config.distortion_samples, config.restarts, local).distortion);
      }
      const double dmin = *std::min_element(d.begin(), d.end());
      row.values[0] = dmin;
      row.values[1] = median(d);
      row.values[2] = dmin <= 1.0 + config.eps ? 1.0 : 0.0;
    } catch (const std::exception& e) {
      row.status = error_status(e);
    }
    rec.rows[i] = std::move(row);
  });

  Index k_star = 0;
  for (const auto& row : rec.rows) {
    if (row.status != "ok" || !row.values[2] || *row.values[2] < 0.5) break;
    k_star = row.k;
  }
  const ComparisonConstants cc = comparison_constants(spec);
  const double eps2n = config.eps * config.eps * static_cast<double>(n);
  rec.summary["k_star"] = k_star;
  rec.summary["C_fit"] = static_cast<double>(k_star) / eps2n;
  rec.summary["eps2_n"] = eps2n;
  rec.summary["p"] = nullptr;
  if (const auto* sum = std::get_if<NormSpec::Sum>(&spec.kind()))
    for (const auto& t : sum->terms)
      if (t.spec->is_lp() && t.spec->p() != 2.0) rec.summary["p"] = t.spec->p();
  rec.summary["whole_space_distortion"] = cc.distortion();
  // A generic norm 2-equivalent to the Euclidean one has E/b >= 1/2.
  rec.summary["milman_generic_dim"] = milman_candidate_dim(0.5, 1.0, config.eps, n, kDefaultMilmanConstant);

  rec.plot.title = "Random sections of the Figiel norm (n = " + std::to_string(n) + ")";
  rec.plot.x_label = "k";
  rec.plot.y_label = "min distortion - 1";
  rec.plot.log_x = rec.plot.log_y = true;
  PlotSeries s;
  s.label = "figiel";
  std::vector<double> lx, ly;
  for (const auto& row : rec.rows) {
    if (row.status != "ok" || !row.values[0] || *row.values[0] <= 1.0) continue;
    s.x.push_back(static_cast<double>(row.k));
    s.y.push_back(*row.values[0] - 1.0);
    lx.push_back(std::log(s.x.back()));
    ly.push_back(std::log(s.y.back()));
  }
  s.fit = try_fit(lx, ly);
  if (s.fit) rec.fits.push_back({"figiel", "log(d - 1) = a log k + b", *s.fit});
  rec.plot.series.push_back(std::move(s));
  return rec;
}

ExperimentRecord run_concentration(const ExperimentConfig& config) {
  require_nonempty(!config.norms.empty(), "concentration: norm list must be nonempty");
  require_nonempty(!config.n_grid.empty() && !config.eps_grid.empty(),
                   "concentration: n grid and eps grid must be nonempty");
  std::vector<NormSpec> templates;
  for (const auto& j : config.norms) templates.push_back(norm_from_json(j));
  struct Point {
    std::size_t norm;
    Index n;
  };
  std::vector<Point> points;
  for (std::size_t a = 0; a < templates.size(); ++a)
    for (Index n : config.n_grid) points.push_back({a, n});

  ExperimentRecord rec;
  rec.config = config;
  rec.value_columns = {"E", "eps_abs", "eps_rel", "empirical", "levy_bound", "sigma", "exceedances", "dominated"};
  const std::size_t per_point = config.eps_grid.size();
  rec.rows.resize(points.size() * per_point);
  for_points(points.size(), config.workers, [&](std::size_t i) {
    const auto [a, n] = points[i];
    const std::string key = norm_json_string(templates[a]) + "|n=" + std::to_string(n);
    RandomSource rng = point_stream(config, key);
    std::optional<NormSpec> spec;
    std::string failure;
    double E = 0.0, L = 0.0;
    try {
      spec = templates[a].with_dim(n);
      RandomSource mean_stream = rng.substream(0);
      const SphereStatistics st = estimate_sphere_mean(*spec, config.samples, mean_stream);
      E = st.E;
      L = st.L;
    } catch (const std::exception& e) {
      failure = error_status(e);
    }
    for (std::size_t e = 0; e < per_point; ++e) {
      const double rel = config.eps_grid[e];
      ExperimentRow row = base_row(config, spec ? *spec : templates[a], n, 0, rel, rng, rec.value_columns.size());
      if (!failure.empty()) {
        row.status = failure;
      } else {
        try {
          const double eps_abs = rel * E;
          RandomSource tail_stream = rng.substream(1 + e);
          const TailEstimate t = empirical_tail(*spec, eps_abs, config.samples, tail_stream);
          const double bound = levy_tail_bound(eps_abs, n, L);
          const double sigma = t.binomial_sigma(std::clamp(bound, 0.0, 1.0));
          row.values = {E, eps_abs, rel, t.fraction, bound, sigma, static_cast<double>(t.exceedances),
                        t.fraction <= bound + 3.0 * sigma ? 1.0 : 0.0};
          if (t.fraction > bound + 3.0 * sigma) row.status = "not_dominated";
        } catch (const std::exception& ex) {
          row.status = error_status(ex);
        }
      }
      rec.rows[i * per_point + e] = std::move(row);
    }
  });

  // Levy's bound is 2 exp(-t) in t = eps^2 n / (2 L^2).
  rec.plot.title = "Empirical tails against Levy's bound";
  rec.plot.x_label = "t = eps^2 n / (2 L^2)";
  rec.plot.y_label = "P(| ||x|| - E | > eps)";
  rec.plot.log_y = true;
  rec.plot.slope_symbol = "dlogP/dt";
  PlotSeries levy;
  levy.label = "Levy bound";
  for (std::size_t i = 0; i < points.size(); ++i) {
    PlotSeries s;
    s.label = templates[points[i].norm].label() + " n=" + std::to_string(points[i].n);
    std::vector<double> ly;
    for (std::size_t e = 0; e < per_point; ++e) {
      const auto& row = rec.rows[i * per_point + e];
      if (row.status != "ok") continue;
      const double L = comparison_constants(templates[points[i].norm].with_dim(row.n)).b_upper;
      const double t = (*row.values[1]) * (*row.values[1]) * static_cast<double>(row.n) / (2.0 * L * L);
      levy.x.push_back(t);
      levy.y.push_back(*row.values[4]);
      if (*row.values[3] > 0.0) {
        s.x.push_back(t);
        s.y.push_back(*row.values[3]);
        ly.push_back(std::log(*row.values[3]));
      }
    }
    s.fit = try_fit(s.x, ly);
    if (!s.x.empty()) rec.plot.series.push_back(std::move(s));
  }
  std::vector<double> lb;
  for (double y : levy.y) lb.push_back(std::log(y));
  levy.fit = try_fit(levy.x, lb);
  rec.plot.series.insert(rec.plot.series.begin(), std::move(levy));
  std::size_t dominated = 0, total = 0;
  for (const auto& row : rec.rows) {
    if (!row.values[7]) continue;
    ++total;
    dominated += *row.values[7] > 0.5 ? 1 : 0;
  }
  rec.summary["dominated_cells"] = dominated;
  rec.summary["cells"] = total;
  return rec;
}

namespace {

bool is_double_exponential_power(Index m) {
  for (Index v = 2; v <= m; v *= v) {
    if (v == m) return true;
    if (v > (Index{1} << 31)) break;
  }
  return false;
}

VectorSystem demo_system(const std::string& kind, Index m, RandomSource& rng) {
  if (kind == "linf-basis") return VectorSystem::standard_basis(NormSpec::sup(m));
  if (kind == "aligned") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, m);
    x.row(0).setOnes();
    return VectorSystem(NormSpec::sup(4), std::move(x), 1.0);
  }
  if (kind == "random-l2") {
    Eigen::MatrixXd x(m, m);
    for (Index j = 0; j < m; ++j) x.col(j) = sample_sphere(m, rng);
    return VectorSystem(NormSpec::euclidean(m), std::move(x), 1.0 - 1e-12);
  }
  if (kind == "perturbed-linf") {
    Eigen::MatrixXd x = Eigen::MatrixXd::Identity(m, m) + 0.05 / std::sqrt(double(m)) * sample_gaussian_matrix(m, m, rng);
    for (Index j = 0; j < m; ++j) x.col(j) /= x.col(j).cwiseAbs().maxCoeff();
    return VectorSystem(NormSpec::sup(m), std::move(x), 1.0 - 1e-12);
  }
  throw InputError("unknown demo system " + kind);
}

}  // namespace

ExperimentRecord run_james_demo(const ExperimentConfig& config) {
  require_nonempty(!config.m_grid.empty(), "james-demo: m grid must be nonempty");
  static const std::vector<std::string> kinds = {"linf-basis", "aligned", "random-l2", "perturbed-linf"};
  struct Point {
    std::string kind;
    Index m;
  };
  std::vector<Point> points;
  for (const auto& kind : kinds)
    for (Index m : config.m_grid) points.push_back({kind, m});

  ExperimentRecord rec;
  rec.config = config;
  rec.value_columns = {"level", "size", "asserted_constant", "exact_constant", "sqrt_previous", "within"};
  std::vector<std::vector<ExperimentRow>> per_point(points.size());
  for_points(points.size(), config.workers, [&](std::size_t i) {
    const auto& [kind, m] = points[i];
    RandomSource rng = point_stream(config, kind + "|m=" + std::to_string(m));
    try {
      if (!is_double_exponential_power(m)) throw InputError("m must be of the form 2^(2^t)");
      const VectorSystem system = demo_system(kind, m, rng);
      // sum ||x_i|| is always a valid constant for the starting system.
      const double L0 = static_cast<double>(m) * 1.0;
      const JamesIterateResult r = james_iterate(system, L0, config.eps);
      double previous = kInfinity;
      for (std::size_t level = 0; level < r.levels.size(); ++level) {
        const auto& lv = r.levels[level];
        ExperimentRow row = base_row(config, system.ambient(), system.ambient().dim(), lv.size, config.eps, rng,
                                     rec.value_columns.size());
        row.norm_json = norm_json_string(system.ambient());
        row.values[0] = static_cast<double>(level);
        row.values[1] = static_cast<double>(lv.size);
        row.values[2] = lv.asserted_constant;
        if (lv.exact_constant) row.values[3] = *lv.exact_constant;
        if (level > 0) {
          row.values[4] = std::sqrt(previous);
          const bool within = !lv.exact_constant || *lv.exact_constant <= std::sqrt(previous) + 1e-12;
          row.values[5] = within ? 1.0 : 0.0;
          if (!within) row.status = "violation";
        }
        row.series = kind;
        previous = lv.asserted_constant;
        per_point[i].push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      ExperimentRow row = base_row(config, NormSpec::sup(std::max<Index>(m, 1)), m, m, config.eps, rng,
                                   rec.value_columns.size());
      row.series = kind;
      row.status = error_status(e);
      per_point[i].push_back(std::move(row));
    }
  });
  for (const auto& rows : per_point) rec.rows.insert(rec.rows.end(), rows.begin(), rows.end());

  Json systems = Json::array();
  for (std::size_t i = 0; i < points.size(); ++i) {
    Json constants = Json::array();
    for (const auto& row : per_point[i]) constants.push_back(row.values[3] ? Json(*row.values[3]) : Json(nullptr));
    systems.push_back({{"system", points[i].kind}, {"m", points[i].m},
                       {"stream", hash_stream_id(config.experiment + "|" + points[i].kind + "|m=" +
                                                 std::to_string(points[i].m))},
                       {"exact_constants", constants}});
  }
  rec.summary["systems"] = systems;

  rec.plot.title = "James iteration: exact l_inf constants per level";
  rec.plot.x_label = "level";
  rec.plot.y_label = "exact constant";
  rec.plot.log_y = true;
  rec.plot.slope_symbol = "dlogC/dlevel";
  const Index m_plot = *std::max_element(config.m_grid.begin(), config.m_grid.end());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].m != m_plot) continue;
    PlotSeries s;
    s.label = points[i].kind + " m=" + std::to_string(m_plot);
    std::vector<double> ly;
    for (const auto& row : per_point[i]) {
      if (row.status != "ok" || !row.values[3] || !row.values[0]) continue;
      s.x.push_back(*row.values[0]);
      s.y.push_back(*row.values[3]);
      ly.push_back(std::log(s.y.back()));
    }
    s.fit = try_fit(s.x, ly);
    if (!s.x.empty()) rec.plot.series.push_back(std::move(s));
  }
  return rec;
}

ExperimentRecord run_experiment(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentRecord rec;
  if (config.experiment == "lp-scaling")
    rec = run_lp_scaling(config);
  else if (config.experiment == "linf-logn")
    rec = run_linf_logn(config);
  else if (config.experiment == "figiel")
    rec = run_figiel(config);
  else if (config.experiment == "concentration")
    rec = run_concentration(config);
  else if (config.experiment == "james-demo")
    rec = run_james_demo(config);
  else
    throw InputError("unknown experiment \"" + config.experiment + "\"");
  rec.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(const ExperimentRecord& record, std::ostream& out) {
  out << "experiment,series,norm_json,n,k,eps,seed,stream";
  for (const auto& c : record.value_columns) out << ',' << csv_cell(c);
  out << ",status\n";
  for (const auto& row : record.rows) {
    out << csv_cell(record.config.experiment) << ',' << csv_cell(row.series) << ',' << csv_cell(row.norm_json)
        << ',' << row.n << ',' << row.k << ',' << fmt(row.eps) << ',' << row.seed << ',' << row.stream;
    for (const auto& v : row.values) {
      out << ',';
      if (v) out << fmt(*v);
    }
    out << ',' << csv_cell(row.status) << '\n';
  }
}

std::string csv_string(const ExperimentRecord& record) {
  std::ostringstream s;
  write_csv(record, s);
  return s.str();
}

Json to_json(const ExperimentRecord& record) {
  Json rows = Json::array();
  for (const auto& row : record.rows) {
    Json values = Json::object();
    for (std::size_t c = 0; c < row.values.size(); ++c)
      values[record.value_columns[c]] = row.values[c] ? Json(*row.values[c]) : Json(nullptr);
    rows.push_back({{"series", row.series},
                    {"norm", Json::parse(row.norm_json)},
                    {"n", row.n},
                    {"k", row.k},
                    {"eps", row.eps},
                    {"seed", row.seed},
                    {"stream", row.stream},
                    {"values", values},
                    {"status", row.status}});
  }
  Json fits = Json::array();
  for (const auto& f : record.fits) {
    Json j = fit_json(f.fit);
    j["label"] = f.label;
    j["model"] = f.model;
    fits.push_back(std::move(j));
  }
  return Json{{"experiment", record.config.experiment},
              {"config", to_json(record.config)},
              {"rows", rows},
              {"fits", fits},
              {"summary", record.summary},
              {"wall_clock_seconds", record.wall_clock_seconds},
              {"version", record.version}};
}

void emit_plot(const ExperimentRecord& record, const std::string& path) { write_svg(record.plot, path); }

}  // namespace dvz
