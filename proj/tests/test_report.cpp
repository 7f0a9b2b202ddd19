#include <quantbench/report.hpp>

#include <gtest/gtest.h>

#include <regex>
#include <sstream>

using namespace quantbench;

namespace {

BenchResult cell(Technique t, Precision p, double acc, double time, double base_time = 0.0258) {
  BenchResult r;
  r.technique = t;
  r.precision = p;
  r.accuracy = acc;
  r.fit_time_s = time;
  r.fit_time_min_s = time;
  r.fit_time_max_s = time;
  if (t != Technique::None) r.time_reduction_pct = time_reduction_pct(time, base_time);
  return r;
}

std::vector<BenchResult> full_grid() {
  return {cell(Technique::None, Precision::F64, 0.9649, 0.0258),
          cell(Technique::QuantileTransform, Precision::F32, 0.9474, 0.0142),
          cell(Technique::QuantileTransform, Precision::I32, 0.6316, 0.0121),
          cell(Technique::RoundQuantize, Precision::F32, 0.9649, 0.0150),
          cell(Technique::RoundQuantize, Precision::I32, 0.9123, 0.0130),
          cell(Technique::KBinsDiscretize, Precision::F32, 0.9298, 0.0149),
          cell(Technique::KBinsDiscretize, Precision::I32, 0.9298, 0.0125)};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(TimeReduction, Formula) {
  EXPECT_NEAR(time_reduction_pct(0.0142, 0.0258), 44.96, 0.01);
  EXPECT_NEAR(time_reduction_pct(0.0025, 0.0258), 90.31, 0.01);
  EXPECT_EQ(time_reduction_pct(0.0258, 0.0258), 0.0);
  EXPECT_LT(time_reduction_pct(0.03, 0.0258), 0.0);
}

TEST(Table, FullGridLayout) {
  const auto text = render_table(full_grid(), "WDBC");
  const auto l = lines(text);
  EXPECT_EQ(l[0], "WDBC");
  EXPECT_NE(l[1].find("Acc Before %"), std::string::npos);
  EXPECT_NE(l[1].find("Time I32 s"), std::string::npos);
  // baseline values appear once, on the first technique row
  EXPECT_NE(l[3].find("QuantileTransformer"), std::string::npos);
  EXPECT_NE(l[3].find("96.49"), std::string::npos);
  EXPECT_NE(l[3].find("0.0258"), std::string::npos);
  EXPECT_NE(l[3].find("63.16"), std::string::npos);
  EXPECT_EQ(l[4].find("0.0258"), std::string::npos);
  EXPECT_NE(l[5].find("KBinsDiscretizer"), std::string::npos);
  EXPECT_NE(text.find("QuantileTransformer  F32  45.0 %"), std::string::npos);
}

TEST(Table, FooterDocumentsReferenceValues) {
  const auto text = render_table(full_grid());
  EXPECT_NE(text.find("100 x (1 - t / t_baseline)"), std::string::npos);
  EXPECT_NE(text.find("0.0258 s -> 0.0142 s is a 45.0 %"), std::string::npos);
  EXPECT_NE(text.find("90.3 %"), std::string::npos);
  EXPECT_NE(text.find("92.1 %"), std::string::npos);
  EXPECT_NE(text.find("0.0020 s"), std::string::npos);
}

TEST(Table, BaselineOnlyHasPlaceholderRow) {
  const auto l = lines(render_table({cell(Technique::None, Precision::F64, 0.85, 0.01)}));
  EXPECT_EQ(l[2].substr(0, 1), "-");
  EXPECT_NE(l[2].find("85.00"), std::string::npos);
  EXPECT_NE(l[2].find("0.0100"), std::string::npos);
}

TEST(Table, FailedCellsShowErr) {
  auto grid = full_grid();
  grid[2] = BenchResult{};
  grid[2].technique = Technique::QuantileTransform;
  grid[2].precision = Precision::I32;
  grid[2].error = "cast overflow";
  const auto l = lines(render_table(grid));
  EXPECT_NE(l[2].find("ERR"), std::string::npos);
  EXPECT_EQ(render_table(grid).find("QuantileTransformer  I32"), std::string::npos);
}

TEST(Table, MissingOrFailedBaselineIsReportError) {
  EXPECT_THROW(render_table({cell(Technique::RoundQuantize, Precision::F32, 0.9, 0.01)}), ReportError);
  auto grid = full_grid();
  grid[0].error = "boom";
  EXPECT_THROW(render_table(grid), ReportError);
}

TEST(ComparisonCsv, BaselineFirstThenCells) {
  const auto l = lines(comparison_to_csv(full_grid()));
  ASSERT_EQ(l.size(), 8u);
  EXPECT_EQ(l[0], "technique,precision,accuracy_pct,fit_time_s");
  EXPECT_EQ(l[1], "Baseline,F64,96.49,0.0258");
  EXPECT_EQ(l[3], "QuantileTransformer,I32,63.16,0.0121");
}

TEST(ComparisonSvg, TitlesParseBackToCsvValues) {
  const auto grid = full_grid();
  const auto svg = render_comparison_svg(grid);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);

  const std::regex title(R"(<title>(\S+) (F64|F32|I32) (accuracy_pct|fit_time_s)=([0-9.]+)</title>)");
  std::map<std::string, std::string> parsed;
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), title); it != std::sregex_iterator(); ++it) {
    parsed[(*it)[1].str() + "," + (*it)[2].str() + "," + (*it)[3].str()] = (*it)[4].str();
  }
  EXPECT_EQ(parsed.size(), 14u);
  for (const auto& line : lines(comparison_to_csv(grid))) {
    if (line.starts_with("technique")) continue;
    const auto parts = csv::parse(line)[0];
    EXPECT_EQ(parsed[parts[0] + "," + parts[1] + ",accuracy_pct"], parts[2]);
    EXPECT_EQ(parsed[parts[0] + "," + parts[1] + ",fit_time_s"], parts[3]);
  }
}

TEST(SweepCsv, OneColumnPerPrecision) {
  const std::vector<SweepPoint> pts{{10, Precision::F64, 0.9}, {10, Precision::I32, 0.6},
                                    {100, Precision::F64, 0.95}, {100, Precision::I32, 0.63}};
  EXPECT_EQ(sweep_to_csv(pts), "n_quantiles,accuracy_F64,accuracy_I32\n10,90.00,60.00\n100,95.00,63.00\n");
  EXPECT_THROW(sweep_to_csv({}), ReportError);
}
