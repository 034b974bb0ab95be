// Command-line front end: dvz <command> [options]. See README.md.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "dvz/concentration.hpp"
#include "dvz/experiments.hpp"
#include "dvz/json_io.hpp"
#include "dvz/linf.hpp"
#include "dvz/nets.hpp"
#include "dvz/sections.hpp"

namespace {

using namespace dvz;

constexpr int kExitInput = 2;
constexpr int kExitFailures = 3;

struct Common {
  std::uint64_t seed = 1;
  unsigned streams = 1;
  std::string out;
  std::string format;
};

struct NormArgs {
  std::string json;
  std::string p;
  Index n = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json parse_json_arg(const std::string& text) {
  const std::string body = !text.empty() && text.front() == '@' ? read_file(text.substr(1)) : text;
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

Json load_json_file(const std::string& path) { return parse_json_arg("@" + path); }

NormSpec resolve_norm(const NormArgs& a) {
  if (!a.json.empty()) {
    NormSpec spec = norm_from_json(parse_json_arg(a.json));
    return a.n > 0 ? spec.with_dim(a.n) : spec;
  }
  if (a.p.empty() || a.n < 1) throw InputError("give --norm <json|@file> or both --p and --n");
  const double p = a.p == "inf" ? kInfinity : std::stod(a.p);
  return NormSpec::lp(p, a.n);
}

void add_norm_options(CLI::App* cmd, NormArgs& a) {
  cmd->add_option("--norm", a.json, "norm spec as JSON or @file");
  cmd->add_option("--p", a.p, "l_p exponent (number or inf)");
  cmd->add_option("--n", a.n, "ambient dimension");
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--streams", c.streams, "number of worker streams (does not change results)");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

ExecPolicy policy_of(const Common& c) {
  ExecPolicy p;
  p.workers = std::max(1u, c.streams);
  return p;
}

// Writes text to <out>/<name> when --out is set, otherwise to stdout.
void emit(const Common& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(c.out);
  const auto path = std::filesystem::path(c.out) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path.string());
  f << text;
  std::cerr << "wrote " << path.string() << "\n";
}

void emit_json(const Common& c, const std::string& stem, const Json& j) { emit(c, stem + ".json", j.dump(2) + "\n"); }

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for almost-Euclidean sections and l_inf structure"};
  app.require_subcommand(1);
  Common common;
  NormArgs norm;
  int exit_code = 0;
  bool allow_failures = false;

  // net build | verify
  auto* net = app.add_subcommand("net", "epsilon-nets on the sphere");
  net->require_subcommand(1);
  Index net_k = 3;
  double net_eps = 0.5;
  std::uint64_t net_budget = 0;
  std::uint64_t trials = 10000;
  std::string net_file;
  auto* net_build = net->add_subcommand("build", "greedy eps-net on S^{k-1}");
  net_build->add_option("--k", net_k, "sphere dimension")->required();
  net_build->add_option("--eps", net_eps, "separation")->required();
  net_build->add_option("--budget", net_budget, "consecutive rejections before stopping (default 200|N|)");
  add_common(net_build, common);
  auto* net_verify = net->add_subcommand("verify", "Monte-Carlo covering check");
  net_verify->add_option("--net", net_file, "net JSON file")->required();
  net_verify->add_option("--trials", trials, "uniform test points");
  add_common(net_verify, common);

  // estimate mean | tail | gaussmax
  auto* est = app.add_subcommand("estimate", "concentration estimates");
  est->require_subcommand(1);
  std::uint64_t samples = 100000;
  double eps = 0.5;
  bool eps_relative = false;
  std::string center = "mean";
  Index gauss_m = 16;
  auto* est_mean = est->add_subcommand("mean", "spherical mean and median of a norm");
  add_norm_options(est_mean, norm);
  est_mean->add_option("--samples", samples);
  add_common(est_mean, common);
  auto* est_tail = est->add_subcommand("tail", "empirical tail against Levy's bound");
  add_norm_options(est_tail, norm);
  est_tail->add_option("--samples", samples);
  est_tail->add_option("--eps", eps, "deviation")->required();
  est_tail->add_flag("--relative", eps_relative, "eps is a multiple of the mean");
  est_tail->add_option("--center", center)->check(CLI::IsMember({"mean", "median"}));
  add_common(est_tail, common);
  auto* est_gmax = est->add_subcommand("gaussmax", "E max |g_i| by Monte Carlo and quadrature");
  est_gmax->add_option("--m", gauss_m)->required();
  est_gmax->add_option("--samples", samples);
  add_common(est_gmax, common);

  // section find | measure | kmax
  auto* sec = app.add_subcommand("section", "almost-Euclidean sections");
  sec->require_subcommand(1);
  Index sec_k = 0;
  int attempts = 50;
  int restarts = 8;
  double milman_c = kDefaultMilmanConstant;
  std::string frame_file;
  auto* sec_find = sec->add_subcommand("find", "randomized search with a net certificate");
  add_norm_options(sec_find, norm);
  sec_find->add_option("--eps", eps)->required();
  sec_find->add_option("--k", sec_k, "section dimension (default: Milman candidate)");
  sec_find->add_option("--milman-c", milman_c, "constant in the candidate dimension");
  sec_find->add_option("--attempts", attempts);
  sec_find->add_option("--samples", samples, "samples for the mean");
  add_common(sec_find, common);
  auto* sec_measure = sec->add_subcommand("measure", "distortion of a given or random section");
  add_norm_options(sec_measure, norm);
  sec_measure->add_option("--frame", frame_file, "frame JSON file (default: random)");
  sec_measure->add_option("--k", sec_k, "dimension of the random section");
  sec_measure->add_option("--samples", samples);
  sec_measure->add_option("--restarts", restarts);
  add_common(sec_measure, common);
  auto* sec_kmax = sec->add_subcommand("kmax", "largest k with a (1+eps)-Euclidean random section");
  add_norm_options(sec_kmax, norm);
  sec_kmax->add_option("--eps", eps)->required();
  sec_kmax->add_option("--attempts", attempts, "attempts per k");
  sec_kmax->add_option("--restarts", restarts);
  add_common(sec_kmax, common);

  auto* dr = app.add_subcommand("dr-basis", "greedy Dvoretzky-Rogers basis");
  add_norm_options(dr, norm);
  dr->add_option("--restarts", restarts);
  add_common(dr, common);

  std::string system_file;
  double asserted_L = 0.0;
  auto* james = app.add_subcommand("james", "James blocking iteration on a vector system");
  james->add_option("--system", system_file, "vector system JSON file")->required();
  james->add_option("--L", asserted_L, "asserted l_inf constant (default: exact or sum of norms)");
  james->add_option("--eps", eps, "target 1 + eps");
  add_common(james, common);

  auto* linf = app.add_subcommand("linf", "l_inf structure");
  linf->require_subcommand(1);
  Index target_count = 8;
  auto* linf_extract = linf->add_subcommand("extract", "block selection and greedy l_inf extraction");
  linf_extract->add_option("--system", system_file, "vector system JSON file (default: standard basis of --norm)");
  add_norm_options(linf_extract, norm);
  linf_extract->add_option("--count", target_count, "vectors to extract (at most 24)");
  linf_extract->add_option("--L", asserted_L, "Gaussian-average constant L (default: estimated)");
  add_common(linf_extract, common);

  auto* exp = app.add_subcommand("experiment", "run a named experiment");
  exp->require_subcommand(1);
  std::string config_file;
  std::vector<CLI::App*> exp_cmds;
  for (const char* name : {"lp-scaling", "linf-logn", "figiel", "concentration", "james-demo"}) {
    auto* cmd = exp->add_subcommand(name, std::string("experiment ") + name);
    cmd->add_option("--config", config_file, "JSON config overriding the defaults");
    cmd->add_flag("--allow-failures", allow_failures, "exit 0 even when failure rows are present");
    add_common(cmd, common);
    exp_cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    RandomSource rng(common.seed);
    const ExecPolicy policy = policy_of(common);

    if (*net_build) {
      const EpsNet result =
          build_net(net_k, net_eps, rng, net_budget ? std::optional<std::uint64_t>(net_budget) : std::nullopt);
      emit_json(common, "net", to_json(result));
    } else if (*net_verify) {
      const EpsNet n = net_from_json(load_json_file(net_file));
      const CoveringReport r = verify_covering(n, trials, rng, policy);
      const double bound = cardinality_bound(n.k, n.eps);
      if (common.format == "csv") {
        emit(common, "covering.csv",
             "k,eps,size,cardinality_bound,trials,max_observed_distance,fraction_within_eps,seed\n" +
                 std::to_string(n.k) + "," + csv_number(n.eps) + "," + std::to_string(n.size()) + "," +
                 csv_number(bound) + "," + std::to_string(r.trials) + "," + csv_number(r.max_observed_distance) +
                 "," + csv_number(r.fraction_within_eps) + "," + std::to_string(common.seed) + "\n");
      } else {
        emit_json(common, "covering",
                  Json{{"k", n.k}, {"eps", n.eps}, {"size", n.size()}, {"cardinality_bound", bound},
                       {"trials", r.trials}, {"max_observed_distance", r.max_observed_distance},
                       {"fraction_within_eps", r.fraction_within_eps}, {"seed", common.seed}});
      }
    } else if (*est_mean) {
      const NormSpec spec = resolve_norm(norm);
      const SphereStatistics s = estimate_sphere_mean(spec, samples, rng, policy);
      if (common.format == "json") {
        Json j = to_json(s);
        j["norm"] = to_json(spec);
        j["seed"] = common.seed;
        emit_json(common, "mean", j);
      } else {
        emit(common, "mean.csv",
             "norm_json,n,samples,E,M,stderr,seed\n" + quote(norm_json_string(spec)) + "," +
                 std::to_string(spec.dim()) + "," + std::to_string(samples) + "," + csv_number(s.E) + "," +
                 csv_number(s.M) + "," + csv_number(s.std_error) + "," + std::to_string(common.seed) + "\n");
      }
    } else if (*est_tail) {
      const NormSpec spec = resolve_norm(norm);
      double eps_abs = eps;
      if (eps_relative) {
        RandomSource mean_stream = rng.substream(0);
        eps_abs = eps * estimate_sphere_mean(spec, samples, mean_stream, policy).E;
      }
      RandomSource tail_stream = rng.substream(1);
      const TailEstimate t = empirical_tail(spec, eps_abs, samples, tail_stream,
                                            center == "mean" ? Center::Mean : Center::Median, policy);
      const double bound = levy_tail_bound(eps_abs, spec.dim(), comparison_constants(spec).b_upper);
      const double sigma = t.binomial_sigma(std::clamp(bound, 0.0, 1.0));
      if (common.format == "json") {
        emit_json(common, "tail",
                  Json{{"norm", to_json(spec)}, {"eps", eps_abs}, {"center", t.center}, {"fraction", t.fraction},
                       {"exceedances", t.exceedances}, {"samples", t.samples}, {"levy_bound", bound},
                       {"sigma", sigma}, {"low_resolution", t.low_resolution}, {"seed", common.seed}});
      } else {
        emit(common, "tail.csv",
             "norm_json,n,samples,eps,center,fraction,exceedances,levy_bound,sigma,low_resolution,seed\n" +
                 quote(norm_json_string(spec)) + "," + std::to_string(spec.dim()) + "," + std::to_string(samples) +
                 "," + csv_number(eps_abs) + "," + csv_number(t.center) + "," + csv_number(t.fraction) + "," +
                 std::to_string(t.exceedances) + "," + csv_number(bound) + "," + csv_number(sigma) + "," +
                 (t.low_resolution ? "1" : "0") + "," + std::to_string(common.seed) + "\n");
      }
    } else if (*est_gmax) {
      const MeanEstimate mc = expected_max_abs_gaussian(gauss_m, samples, rng, policy);
      const double exact = expected_max_abs_gaussian_table(gauss_m);
      if (common.format == "json") {
        emit_json(common, "gaussmax",
                  Json{{"m", gauss_m}, {"monte_carlo", mc.mean}, {"stderr", mc.std_error}, {"samples", mc.samples},
                       {"quadrature", exact}, {"seed", common.seed}});
      } else {
        emit(common, "gaussmax.csv",
             "m,samples,monte_carlo,stderr,quadrature,seed\n" + std::to_string(gauss_m) + "," +
                 std::to_string(samples) + "," + csv_number(mc.mean) + "," + csv_number(mc.std_error) + "," +
                 csv_number(exact) + "," + std::to_string(common.seed) + "\n");
      }
    } else if (*sec_find) {
      if (common.format == "csv") throw InputError("section find writes JSON only");
      const NormSpec spec = resolve_norm(norm);
      SectionSearchOptions opts;
      opts.mean_samples = samples;
      opts.policy = policy;
      RandomSource mean_stream = rng.substream(0);
      const SphereStatistics st = estimate_sphere_mean(spec, samples, mean_stream, policy);
      opts.mean_override = st.E;
      Index k = sec_k;
      if (k < 1)
        k = std::min(spec.dim(), milman_candidate_dim(st.E, comparison_constants(spec).b_upper, eps, spec.dim(),
                                                      milman_c));
      RandomSource search_stream = rng.substream(1);
      const SectionSearchResult r = find_euclidean_section(spec, eps, k, attempts, search_stream, opts);
      Json j = r.success() ? to_json(*r.certificate) : to_json(*r.failure);
      j["norm"] = to_json(spec);
      j["k"] = k;
      j["master_seed"] = common.seed;
      emit_json(common, "section", j);
      if (!r.success()) exit_code = kExitFailures;
    } else if (*sec_measure) {
      if (common.format == "csv") throw InputError("section measure writes JSON only");
      const NormSpec spec = resolve_norm(norm);
      Frame frame;
      if (!frame_file.empty()) {
        Json j = load_json_file(frame_file);
        frame = frame_from_json(j.contains("subspace") ? j.at("subspace") : j);
      } else {
        if (sec_k < 1) throw InputError("give --frame or --k");
        frame = sample_subspace(spec.dim(), sec_k, rng);
      }
      const DistortionMeasurement m = measure_distortion(spec, frame, samples, restarts, rng);
      Json j = to_json(m);
      j["norm"] = to_json(spec);
      j["k"] = frame.dim();
      j["seed"] = common.seed;
      emit_json(common, "distortion", j);
    } else if (*sec_kmax) {
      const NormSpec spec = resolve_norm(norm);
      KmaxOptions opts;
      opts.attempts_per_k = attempts;
      opts.distortion_restarts = restarts;
      opts.policy = policy;
      const KmaxResult r = kmax_search(spec, eps, rng, opts);
      if (common.format == "csv") {
        std::string text = "norm_json,n,eps,k,success,attempts,best_distortion,seed\n";
        for (const auto& t : r.trials)
          text += quote(norm_json_string(spec)) + "," + std::to_string(spec.dim()) + "," + csv_number(eps) + "," +
                  std::to_string(t.k) + "," + (t.success ? "1" : "0") + "," + std::to_string(t.attempts) + "," +
                  csv_number(t.best_distortion) + "," + std::to_string(common.seed) + "\n";
        emit(common, "kmax.csv", text);
      } else {
        Json trials_json = Json::array();
        for (const auto& t : r.trials)
          trials_json.push_back({{"k", t.k}, {"success", t.success}, {"attempts", t.attempts},
                                 {"best_distortion", t.best_distortion}});
        emit_json(common, "kmax",
                  Json{{"norm", to_json(spec)}, {"eps", eps}, {"k_max", r.k_max}, {"trials", trials_json},
                       {"seed", common.seed}});
      }
    } else if (*dr) {
      const NormSpec spec = resolve_norm(norm);
      const DRBasis b = dvoretzky_rogers_basis(spec, restarts, rng);
      const double n = static_cast<double>(spec.dim());
      if (common.format == "csv") {
        std::string text = "norm_json,n,i,norm,lemma_bound,agreeing,restarts,seed\n";
        for (std::size_t i = 0; i < b.norms.size(); ++i)
          text += quote(norm_json_string(spec)) + "," + std::to_string(spec.dim()) + "," + std::to_string(i + 1) +
                  "," + csv_number(b.norms[i]) + "," +
                  csv_number(std::exp(-1.0) * (1.0 - static_cast<double>(i) / n)) + "," +
                  std::to_string(b.ascent_report[i].agreeing) + "," + std::to_string(b.ascent_report[i].restarts) +
                  "," + std::to_string(common.seed) + "\n";
        emit(common, "dr_basis.csv", text);
      } else {
        emit_json(common, "dr_basis",
                  Json{{"norm", to_json(spec)}, {"norms", b.norms}, {"basis", to_json(b.frame)},
                       {"seed", common.seed}});
      }
    } else if (*james) {
      if (common.format == "csv") throw InputError("james writes JSON only");
      const VectorSystem system = vector_system_from_json(load_json_file(system_file));
      double L = asserted_L;
      if (L <= 0.0) {
        ConstantOptions opts;
        opts.policy = policy;
        try {
          L = linf_basis_constant(system, opts).value;
        } catch (const SizeError&) {
          L = 0.0;
          for (Index i = 0; i < system.size(); ++i) L += norm_eval(system.ambient(), system.vectors().col(i));
        }
      }
      const JamesIterateResult r = james_iterate(system, L, eps, policy);
      Json levels = Json::array();
      for (const auto& lv : r.levels)
        levels.push_back({{"size", lv.size}, {"asserted_constant", lv.asserted_constant},
                          {"exact_constant", lv.exact_constant ? Json(*lv.exact_constant) : Json(nullptr)},
                          {"constant_tag", lv.exact_constant ? "exact" : "asserted"},
                          {"block_returned", lv.block_returned}});
      emit_json(common, "james",
                Json{{"planned_steps", r.planned_steps}, {"depth", r.depth}, {"completed", r.completed},
                     {"levels", levels}, {"final_constant", r.final_constant}, {"final_exact", r.final_exact},
                     {"min_sign_norm", r.min_sign_norm ? Json(*r.min_sign_norm) : Json(nullptr)},
                     {"upper_ok", r.upper_ok}, {"lower_ok", r.lower_ok}, {"system", to_json(r.system)}});
    } else if (*linf_extract) {
      if (common.format == "csv") throw InputError("linf extract writes JSON only");
      const VectorSystem system = !system_file.empty()
                                      ? vector_system_from_json(load_json_file(system_file))
                                      : VectorSystem::standard_basis(resolve_norm(norm));
      LinfExtractionOptions opts;
      if (asserted_L > 0.0) opts.L = asserted_L;
      opts.policy = policy;
      const LinfExtraction r = gaussian_linf_subspace(system, rng, target_count, opts);
      emit_json(common, "linf_extract",
                Json{{"blocks", r.selection.blocks.size()}, {"selected", r.selection.selected},
                     {"draws", r.selection.draws}, {"threshold", r.selection.threshold},
                     {"gaussian_draw", {{"seed", r.selection.gaussian_draw_seed},
                                        {"stream", r.selection.gaussian_draw_stream}}},
                     {"chosen", r.chosen}, {"exact_constant", r.exact_constant}, {"constant_tag", "exact"},
                     {"L", r.L}, {"L_estimated", r.L_estimated}, {"rademacher_mean", r.rademacher_mean},
                     {"rademacher_stderr", r.rademacher_std_error}, {"rademacher_bound", r.rademacher_bound},
                     {"rademacher_within_bound", r.rademacher_within_bound}, {"note", r.note},
                     {"system", to_json(*r.system)}});
    } else {
      for (auto* cmd : exp_cmds) {
        if (!*cmd) continue;
        ExperimentConfig config =
            config_file.empty() ? default_config(cmd->get_name())
                                : config_from_json(load_json_file(config_file), cmd->get_name());
        if (config.experiment != cmd->get_name())
          throw InputError("config names experiment \"" + config.experiment + "\" but \"" + cmd->get_name() +
                           "\" was requested");
        if (cmd->count("--seed")) config.seed = common.seed;
        if (cmd->count("--streams")) config.workers = std::max(1u, common.streams);
        if (!common.out.empty()) config.output = common.out;
        const ExperimentRecord rec = run_experiment(config);
        const std::string stem = config.experiment;
        if (config.output.empty()) {
          if (common.format == "json")
            std::cout << to_json(rec).dump(2) << "\n";
          else
            write_csv(rec, std::cout);
        } else {
          Common target = common;
          target.out = config.output;
          emit(target, stem + ".csv", csv_string(rec));
          emit(target, stem + ".json", to_json(rec).dump(2) + "\n");
          try {
            emit_plot(rec, (std::filesystem::path(config.output) / (stem + ".svg")).string());
            std::cerr << "wrote " << (std::filesystem::path(config.output) / (stem + ".svg")).string() << "\n";
          } catch (const InputError& e) {
            std::cerr << "no plot: " << e.what() << "\n";
          }
        }
        if (rec.has_failures() && !allow_failures) exit_code = kExitFailures;
      }
    }
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return exit_code;
}
