#include <gtest/gtest.h>

#include <sstream>

#include "patsim/csv.hpp"
#include "patsim/error.hpp"
#include "patsim/gam/report.hpp"

namespace patsim::gam {
namespace {

FitSummary summary(int level, std::size_t linear, std::size_t smooths) {
  FitSummary s;
  s.model_level = level;
  s.n = 1000 + static_cast<std::size_t>(level);
  s.coefficients.push_back({"(Intercept)", 45.0, 0.25, normal_p_value(45.0, 0.25), "***"});
  const char* names[] = {"is_same_org", "is_sender_org", "is_receiver_org"};
  for (std::size_t j = 0; j < linear; ++j)
    s.coefficients.push_back({names[j], -0.1234 * static_cast<double>(j + 1), 0.2, 0.0, ""});
  const char* smooth_names[] = {"s(pub_date)", "s(temporal_diff_days)"};
  for (std::size_t j = 0; j < smooths; ++j) s.smooths.push_back({smooth_names[j], 3.5, 4.256});
  s.aic = 12345.678;
  s.gcv = 150.12345;
  s.dev_explained = 0.04789;
  return s;
}

TEST(Significance, StarThresholds) {
  EXPECT_EQ(significance_stars(0.0009), "***");
  EXPECT_EQ(significance_stars(0.001), "**");
  EXPECT_EQ(significance_stars(0.0099), "**");
  EXPECT_EQ(significance_stars(0.01), "*");
  EXPECT_EQ(significance_stars(0.049), "*");
  EXPECT_EQ(significance_stars(0.05), ".");
  EXPECT_EQ(significance_stars(0.099), ".");
  EXPECT_EQ(significance_stars(0.1), "");
  EXPECT_EQ(significance_stars(0.9), "");
}

TEST(Significance, NormalPValue) {
  EXPECT_NEAR(normal_p_value(1.959963984540054, 1.0), 0.05, 1e-12);
  EXPECT_NEAR(normal_p_value(-2.5758293035489, 1.0), 0.01, 1e-12);
  EXPECT_DOUBLE_EQ(normal_p_value(0.0, 3.0), 1.0);
  EXPECT_DOUBLE_EQ(normal_p_value(3.0, 2.0), normal_p_value(-3.0, 2.0));
  EXPECT_DOUBLE_EQ(normal_p_value(1.0, 0.0), 0.0);
}

TEST(FitReport, JsonRoundTrip) {
  FitSummary s = summary(2, 3, 2);
  s.dropped_rows = 17;
  s.converged = false;
  s.coefficients[1].p_value = 0.012345678901234567;
  const std::string text = to_json(s);
  EXPECT_EQ(summary_from_json(text), s);
  EXPECT_EQ(to_json(summary_from_json(text)), text);
  EXPECT_LT(text.find("\"model_level\""), text.find("\"coefficients\""));
  EXPECT_THROW(summary_from_json("{\"n\": 3}"), ValidationError);
  EXPECT_THROW(summary_from_json("not json"), ValidationError);
}

TEST(ComparisonTable, CsvLayout) {
  const std::vector<FitSummary> fits = {summary(0, 0, 1), summary(1, 0, 2), summary(2, 2, 2)};
  std::ostringstream out;
  write_comparison_csv(out, fits);
  std::istringstream in(out.str());
  csv::Reader reader(in);
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> f;
  while (reader.next(f)) rows.push_back(f);

  ASSERT_EQ(rows.size(), 1u + 3u + 2u + 4u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"term", "Model 0", "Model 1", "Model 2"}));
  EXPECT_EQ(rows[1][0], "(Intercept)");
  EXPECT_EQ(rows[1][1], "45.000 (0.250) ***");
  EXPECT_EQ(rows[2], (std::vector<std::string>{"is_same_org", "", "", "-0.123 (0.200)"}));
  EXPECT_EQ(rows[4], (std::vector<std::string>{"s(pub_date) edf", "4.26", "4.26", "4.26"}));
  EXPECT_EQ(rows[5][1], "");
  EXPECT_EQ(rows[6], (std::vector<std::string>{"n", "1000", "1001", "1002"}));
  EXPECT_EQ(rows[7][1], "12345.7");
  EXPECT_EQ(rows[8][1], "150.123");
  EXPECT_EQ(rows[9], (std::vector<std::string>{"Deviance explained", "4.79%", "4.79%", "4.79%"}));
}

TEST(ComparisonTable, Markdown) {
  const std::vector<FitSummary> fits = {summary(0, 0, 1), summary(3, 1, 1)};
  std::ostringstream out;
  write_comparison_markdown(out, fits);
  std::istringstream lines(out.str());
  std::string header, rule, first;
  std::getline(lines, header);
  std::getline(lines, rule);
  std::getline(lines, first);
  EXPECT_EQ(header, "| term | Model 0 | Model 3 |");
  EXPECT_EQ(rule, "| --- | ---: | ---: |");
  EXPECT_EQ(first, "| (Intercept) | 45.000 (0.250) *** | 45.000 (0.250) *** |");
}

TEST(PartialEffectCsv, BoundsAreTwoStandardErrors) {
  PartialEffect pe{"x", {0.0, 1.0}, {0.5, -0.25}, {0.125, 0.5}};
  std::ostringstream out;
  write_partial_effect_csv(out, pe);
  EXPECT_EQ(out.str(), "grid,f_hat,se_lower,se_upper\n0,0.5,0.25,0.75\n1,-0.25,-1.25,0.75\n");
}

}  // namespace
}  // namespace patsim::gam
