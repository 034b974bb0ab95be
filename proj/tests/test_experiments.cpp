#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "dvz/experiments.hpp"

using namespace dvz;

namespace {

ExperimentConfig small_lp() {
  ExperimentConfig c = default_config("lp-scaling");
  c.p_grid = {2.0, 4.0};
  c.n_grid = {16, 32, 64};
  c.n_max_by_p.clear();
  c.attempts = 2;
  c.distortion_samples = 200;
  c.restarts = 2;
  return c;
}

std::vector<std::string> csv_lines(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Experiments, DefaultsAndUnknownNames) {
  for (const char* name : {"lp-scaling", "linf-logn", "figiel", "concentration", "james-demo"})
    EXPECT_EQ(default_config(name).experiment, name);
  EXPECT_THROW(default_config("nope"), InputError);
  EXPECT_EQ(default_config("linf-logn").eps, 1.0 / 64.0);
}

TEST(Experiments, ConfigRoundTrip) {
  ExperimentConfig c = small_lp();
  c.p_grid.push_back(kInfinity);
  c.n_max_by_p[kInfinity] = 32;
  c.seed = 77;
  const ExperimentConfig back = config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.p_grid.back(), kInfinity);
  EXPECT_EQ(back.n_max_by_p.at(kInfinity), 32);
}

TEST(Experiments, ConfigRejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiment":"figiel","colour":1})")), InputError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiment":"figiel","eps":"big"})")), InputError);
  EXPECT_THROW(config_from_json(Json::parse(R"({"eps":0.1})")), InputError);
  EXPECT_EQ(config_from_json(Json::parse(R"({"eps":0.1})"), "figiel").eps, 0.1);
  EXPECT_THROW(config_from_json(Json::parse(R"({"experiment":"concentration","norms":[{"kind":"x"}]})")),
               InputError);
}

TEST(Experiments, LpScalingEuclideanIsLinear) {
  const ExperimentRecord r = run_experiment(small_lp());
  ASSERT_EQ(r.rows.size(), 6u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, "ok");
    if (row.series == "l2") EXPECT_EQ(row.k, row.n);
    EXPECT_EQ(row.seed, 1u);
    EXPECT_FALSE(row.norm_json.empty());
  }
  ASSERT_FALSE(r.fits.empty());
  EXPECT_EQ(r.fits[0].label, "l2");
  EXPECT_NEAR(r.fits[0].fit.slope, 1.0, 1e-12);
  EXPECT_GE(r.wall_clock_seconds, 0.0);
}

TEST(Experiments, CsvHeaderAndRows) {
  const ExperimentRecord r = run_experiment(small_lp());
  const auto lines = csv_lines(csv_string(r));
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(lines[0],
            "experiment,series,norm_json,n,k,eps,seed,stream,kmax,distortion_at_kmax,trials,"
            "whole_space_distortion,status");
  EXPECT_EQ(lines[1].rfind("lp-scaling,l2,\"{\"\"dim\"\":16,\"\"kind\"\":\"\"lp\"\",\"\"p\"\":2.0}\",16,16,0.5,1,", 0),
            0u);
  EXPECT_EQ(lines[1].substr(lines[1].size() - 3), ",ok");
}

TEST(Experiments, CsvIsReproducibleAndWorkerIndependent) {
  ExperimentConfig a = small_lp();
  ExperimentConfig b = small_lp();
  b.workers = 3;
  const std::string x = csv_string(run_experiment(a));
  EXPECT_EQ(x, csv_string(run_experiment(a)));
  EXPECT_EQ(x, csv_string(run_experiment(b)));
  a.seed = 2;
  EXPECT_NE(x, csv_string(run_experiment(a)));
}

TEST(Experiments, FailuresBecomeRows) {
  ExperimentConfig c = small_lp();
  c.n_grid = {0, 16};
  c.p_grid = {4.0};
  const ExperimentRecord r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_NE(r.rows[0].status, "ok");
  EXPECT_EQ(r.rows[1].status, "ok");
  EXPECT_TRUE(r.has_failures());
}

TEST(Experiments, LinfSmoke) {
  ExperimentConfig c = default_config("linf-logn");
  c.n_grid = {4, 16};
  c.eps = 0.5;
  c.attempts = 2;
  c.distortion_samples = 200;
  const ExperimentRecord r = run_experiment(c);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, "ok");
    EXPECT_GE(row.k, 1);
    EXPECT_FALSE(row.values[4].has_value());  // no bound at eps >= 1/32
  }
}

TEST(Experiments, LinfBoundRespectedSmall) {
  ExperimentConfig c = default_config("linf-logn");
  c.n_grid = {64, 256};
  c.attempts = 2;
  c.distortion_samples = 300;
  const ExperimentRecord r = run_experiment(c);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, "ok");
    EXPECT_NEAR(*row.values[4], 4.0 * std::log(double(row.n)) / std::log(2.0), 1e-12);
    EXPECT_LE(double(row.k), *row.values[4]);
  }
}

TEST(Experiments, FigielSmall) {
  ExperimentConfig c = default_config("figiel");
  c.n_grid = {256};
  c.k_grid = {1, 2, 8, 64, 256};
  c.eps = 0.25;
  c.attempts = 1;
  c.distortion_samples = 200;
  const ExperimentRecord r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 5u);
  EXPECT_NEAR(*r.rows[0].values[0], 1.0, 1e-12);
  EXPECT_EQ(*r.rows[0].values[2], 1.0);
  EXPECT_LE(r.summary["whole_space_distortion"].get<double>(), 2.0);
  const double k_star = r.summary["k_star"].get<double>();
  EXPECT_NEAR(r.summary["C_fit"].get<double>(), k_star / (0.0625 * 256.0), 1e-12);
  EXPECT_GE(k_star, 1.0);
}

TEST(Experiments, FigielPreconditionIsInputError) {
  ExperimentConfig c = default_config("figiel");
  c.n_grid = {100};
  c.eps = 0.25;
  EXPECT_THROW(run_experiment(c), PreconditionError);
}

TEST(Experiments, ConcentrationSmall) {
  ExperimentConfig c = default_config("concentration");
  c.n_grid = {64};
  c.samples = 5000;
  c.eps_grid = {0.3, 1.0};
  const ExperimentRecord r = run_experiment(c);
  ASSERT_EQ(r.rows.size(), 8u);
  for (const auto& row : r.rows) {
    EXPECT_EQ(row.status, "ok");
    if (row.series == "l2") EXPECT_EQ(*row.values[3], 0.0);
    EXPECT_NEAR(*row.values[1], *row.values[0] * *row.values[2], 1e-15);
  }
  EXPECT_EQ(r.summary["dominated_cells"], r.summary["cells"]);
}

TEST(Experiments, JamesDemo) {
  ExperimentConfig c = default_config("james-demo");
  c.m_grid = {16, 256};
  const ExperimentRecord r = run_experiment(c);
  EXPECT_FALSE(r.has_failures());
  for (const auto& sys : r.summary["systems"]) {
    const auto constants = sys["exact_constants"];
    if (sys["system"] == "linf-basis")
      for (const auto& v : constants) EXPECT_EQ(v.get<double>(), 1.0);
    if (sys["system"] == "aligned" && sys["m"] == 256)
      EXPECT_EQ(constants, Json::parse("[256.0, 16.0, 4.0, 2.0]"));
  }
  for (const auto& row : r.rows)
    if (row.values[4] && row.values[3]) EXPECT_LE(*row.values[3], *row.values[4] + 1e-12) << row.series;
}

TEST(Experiments, JamesDemoFlagsBadSizes) {
  ExperimentConfig c = default_config("james-demo");
  c.m_grid = {10};
  const ExperimentRecord r = run_experiment(c);
  EXPECT_TRUE(r.has_failures());
  EXPECT_EQ(r.rows.size(), 4u);
}

TEST(Experiments, RecordJsonEmbedsConfig) {
  const ExperimentRecord r = run_experiment(small_lp());
  const Json j = to_json(r);
  EXPECT_EQ(j["config"], to_json(small_lp()));
  EXPECT_EQ(j["version"], kToolkitVersion);
  EXPECT_EQ(j["rows"].size(), r.rows.size());
  EXPECT_TRUE(j["summary"]["alpha"].contains("l4"));
}

TEST(Experiments, PlotIsDeterministic) {
  const ExperimentRecord r = run_experiment(small_lp());
  EXPECT_EQ(render_svg(r.plot), render_svg(run_experiment(small_lp()).plot));
  EXPECT_NE(render_svg(r.plot).find("α = "), std::string::npos);
  ExperimentRecord empty;
  EXPECT_THROW(emit_plot(empty, "/tmp/never.svg"), InputError);
}
