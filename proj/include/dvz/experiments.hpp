#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dvz/json_io.hpp"
#include "dvz/stats.hpp"
#include "dvz/svg_plot.hpp"

namespace dvz {

inline constexpr const char* kToolkitVersion = "0.1.0";

// Everything an experiment run depends on. Fields that an experiment does
// not use are ignored by it. `workers` changes scheduling only, never the
// numbers produced.
struct ExperimentConfig {
  std::string experiment;             // lp-scaling, linf-logn, figiel, concentration, james-demo
  std::vector<double> p_grid;         // lp-scaling
  std::map<double, Index> n_max_by_p;  // lp-scaling: per-p cap on the n grid
  std::vector<Index> n_grid;
  std::vector<Index> k_grid;          // figiel
  std::vector<Index> m_grid;          // james-demo
  std::vector<Json> norms;            // concentration: specs, resized to each n
  std::vector<double> eps_grid;       // concentration: tail levels as multiples of E
  double eps = 0.5;
  std::uint64_t samples = 20000;      // Monte-Carlo budget per point
  std::uint64_t distortion_samples = 1000;
  int restarts = 4;
  int attempts = 4;
  bool explicit_sections = true;      // linf-logn: also try tight-frame net sections
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string output;                 // directory; empty means no files
};

// Defaults for a named experiment; throws InputError for unknown names.
ExperimentConfig default_config(const std::string& experiment);

// Starts from default_config(j["experiment"] or fallback) and overrides the
// fields present in j. Unknown keys are rejected.
ExperimentConfig config_from_json(const Json& j, const std::string& fallback_experiment = "");
Json to_json(const ExperimentConfig& config);

struct ExperimentRow {
  std::string series;  // curve the row belongs to, e.g. "l4" or "aligned"
  std::string norm_json;
  Index n = 0;
  Index k = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<std::optional<double>> values;  // aligned with value_columns; nullopt prints empty
  std::string status = "ok";
};

struct FitSummary {
  std::string label;
  std::string model;  // e.g. "log k = a log n + b"
  LinearFit fit;
};

struct ExperimentRecord {
  ExperimentConfig config;
  std::vector<std::string> value_columns;
  std::vector<ExperimentRow> rows;  // canonical grid order
  std::vector<FitSummary> fits;
  Json summary = Json::object();
  PlotData plot;
  double wall_clock_seconds = 0.0;
  std::string version = kToolkitVersion;

  bool has_failures() const;
};

ExperimentRecord run_lp_scaling(const ExperimentConfig& config);
ExperimentRecord run_linf_logn(const ExperimentConfig& config);
ExperimentRecord run_figiel(const ExperimentConfig& config);
ExperimentRecord run_concentration(const ExperimentConfig& config);
ExperimentRecord run_james_demo(const ExperimentConfig& config);

// Dispatches on config.experiment.
ExperimentRecord run_experiment(const ExperimentConfig& config);

// Header: experiment,series,norm_json,n,k,eps,seed,stream,<value columns>,status.
// Contains no timing information, so identical configs give identical bytes.
void write_csv(const ExperimentRecord& record, std::ostream& out);
std::string csv_string(const ExperimentRecord& record);

// Full record including config, fits, summary, wall-clock and version.
Json to_json(const ExperimentRecord& record);

// Writes the record's plot; throws InputError when it has fewer than two
// points.
void emit_plot(const ExperimentRecord& record, const std::string& path);

// Largest k for which a tight-frame net section of l_inf^n (k-dimensional,
// at most n coordinates) has measured distortion <= 1 + eps; 1 if none.
struct ExplicitLinfSection {
  Index k = 1;
  Index points = 1;
  double distortion = 1.0;
};
ExplicitLinfSection explicit_linf_kmax(Index n, double eps, RandomSource& rng, std::uint64_t distortion_samples,
                                       int restarts);

}  // namespace dvz
