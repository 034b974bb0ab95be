#include <cmath>

#include <gtest/gtest.h>

#include "dvz/json_io.hpp"
#include "dvz/svg_plot.hpp"

using namespace dvz;

TEST(JsonIo, NormRoundTrip) {
  const std::vector<NormSpec> specs = {
      NormSpec::lp(3.07, 128), NormSpec::sup(5), NormSpec::weighted_sup({1.0, 0.25, 3.0}),
      NormSpec::sum({{1.0, NormSpec::euclidean(6)}, {0.5, NormSpec::lp(kInfinity, 6)}})};
  for (const auto& s : specs) {
    const Json j = to_json(s);
    EXPECT_TRUE(norm_from_json(j) == s) << j.dump();
    EXPECT_TRUE(norm_from_json(Json::parse(norm_json_string(s))) == s);
  }
  EXPECT_EQ(to_json(NormSpec::sup(5))["p"], "inf");
  EXPECT_EQ(norm_json_string(NormSpec::lp(4.0, 3)), R"({"dim":3,"kind":"lp","p":4.0})");
}

TEST(JsonIo, NormRejectsMalformed) {
  EXPECT_THROW(norm_from_json(Json::parse(R"({"kind":"lq","p":2,"dim":3})")), InputError);
  EXPECT_THROW(norm_from_json(Json::parse(R"({"kind":"lp","dim":3})")), InputError);
  EXPECT_THROW(norm_from_json(Json::parse(R"({"kind":"lp","p":"two","dim":3})")), InputError);
  EXPECT_THROW(norm_from_json(Json::parse(R"({"kind":"lp","p":0.5,"dim":3})")), InputError);
  EXPECT_THROW(norm_from_json(Json::parse(R"({"kind":"wsup","dim":4,"weights":[1,2]})")), InputError);
  EXPECT_THROW(norm_from_json(Json::parse("[1,2]")), InputError);
}

TEST(JsonIo, NetRoundTrip) {
  RandomSource rng(1);
  const EpsNet net = build_net(3, 0.5, rng);
  const EpsNet back = net_from_json(Json::parse(to_json(net).dump()));
  EXPECT_EQ(back.points, net.points);
  EXPECT_EQ(back.k, 3);
  EXPECT_EQ(back.eps, 0.5);
  EXPECT_EQ(back.seed, net.seed);
  EXPECT_EQ(back.stream, net.stream);
  EXPECT_EQ(back.construction_budget, net.construction_budget);

  Json bad = to_json(net);
  bad["points"][0][0] = 5.0;
  EXPECT_THROW(net_from_json(bad), InputError);
  bad = to_json(net);
  bad["k"] = 4;
  EXPECT_THROW(net_from_json(bad), InputError);
}

TEST(JsonIo, FrameAndSystemRoundTrip) {
  RandomSource rng(2);
  const Frame f = sample_subspace(7, 3, rng);
  EXPECT_EQ(frame_from_json(Json::parse(to_json(f).dump())).columns(), f.columns());

  const VectorSystem sys(NormSpec::euclidean(4), sample_gaussian_matrix(4, 3, rng), 0.0);
  const VectorSystem back = vector_system_from_json(Json::parse(to_json(sys).dump()));
  EXPECT_EQ(back.vectors(), sys.vectors());
  EXPECT_TRUE(back.ambient() == sys.ambient());

  const Json sup = Json::parse(R"({"norm":{"kind":"lp","p":"inf","dim":2},"vectors":[[1,0],[0,1]],
                                   "lower_norm_bound":1})");
  EXPECT_EQ(vector_system_from_json(sup).size(), 2);
  EXPECT_THROW(vector_system_from_json(Json::parse(R"({"norm":{"kind":"lp","p":2,"dim":2},"vectors":[[1,0],[0]]})")),
               InputError);
}

TEST(JsonIo, ConstantTag) {
  BasisConstant c;
  c.value = 2.0;
  c.method = "enumeration";
  EXPECT_EQ(to_json(c)["tag"], "exact");
  c.exact = false;
  EXPECT_EQ(to_json(c)["tag"], "sampled");
}

TEST(JsonIo, InfinityHelpers) {
  EXPECT_EQ(number_or_inf(kInfinity), "inf");
  EXPECT_EQ(parse_number_or_inf(Json("inf")), kInfinity);
  EXPECT_EQ(parse_number_or_inf(Json(2.5)), 2.5);
  EXPECT_THROW(parse_number_or_inf(Json("nan")), InputError);
}

namespace {

PlotData two_points() {
  PlotData p;
  p.title = "t";
  p.x_label = "x";
  p.y_label = "y";
  PlotSeries s;
  s.label = "a";
  s.x = {1.0, 3.0};
  s.y = {2.0, 6.0};
  s.fit = LinearFit{2.0, 0.0, 0.0, 0.0, 1.0, 2};
  p.series.push_back(s);
  return p;
}

}  // namespace

TEST(Svg, Deterministic) {
  const PlotData p = two_points();
  const std::string a = render_svg(p);
  EXPECT_EQ(a, render_svg(p));
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
}

TEST(Svg, AnnotatesFittedSlope) {
  PlotData p = two_points();
  p.series[0].fit->slope = 0.624;
  p.series[0].fit->slope_stderr = 0.015;
  const std::string s = render_svg(p);
  EXPECT_NE(s.find("α = 0.624 ± 0.015"), std::string::npos);
  EXPECT_NE(s.find("stroke-dasharray"), std::string::npos);
}

TEST(Svg, LogAxesDropNonPositive) {
  PlotData p = two_points();
  p.log_x = p.log_y = true;
  p.series[0].x.push_back(-1.0);
  p.series[0].y.push_back(5.0);
  EXPECT_NO_THROW(render_svg(p));
  p.series[0].x = {1.0, -1.0};
  p.series[0].y = {1.0, 1.0};
  EXPECT_THROW(render_svg(p), InputError);
}

TEST(Svg, EmptyRecordRejected) {
  PlotData p;
  EXPECT_THROW(render_svg(p), InputError);
}

namespace {

std::string attribute(const std::string& doc, std::size_t from, const std::string& name) {
  const std::size_t a = doc.find(" " + name + "=\"", from) + name.size() + 3;
  return doc.substr(a, doc.find('"', a) - a);
}

}  // namespace

TEST(Svg, TwoPointFitPassesThroughBoth) {
  const std::string s = render_svg(two_points());
  const std::size_t c0 = s.find("<circle");
  const std::size_t c1 = s.find("<circle", c0 + 1);
  const std::size_t dashed = s.rfind("<line", s.find("stroke-dasharray"));
  EXPECT_EQ(attribute(s, dashed, "x1"), attribute(s, c0, "cx"));
  EXPECT_EQ(attribute(s, dashed, "y1"), attribute(s, c0, "cy"));
  EXPECT_EQ(attribute(s, dashed, "x2"), attribute(s, c1, "cx"));
  EXPECT_EQ(attribute(s, dashed, "y2"), attribute(s, c1, "cy"));
}
