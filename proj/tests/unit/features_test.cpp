#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "patsim/error.hpp"
#include "patsim/features.hpp"
#include "support.hpp"

namespace patsim::features {
namespace {

PatentRecord patent(std::string id, Days date, AssigneeKind kind = AssigneeKind::Organization,
                    std::string assignee = "ACME", std::vector<std::string> codes = {"A01C 3/04"}) {
  PatentRecord p;
  p.patent_id = std::move(id);
  p.grant_date = date;
  p.assignee_kind = kind;
  p.assignee_id = kind == AssigneeKind::Unknown ? "" : std::move(assignee);
  for (const auto& c : codes) p.ipc_codes.push_back(ipc::parse_ipc(c));
  return p;
}

TEST(BuildFeatures, CovariatesOfOneCitation) {
  CorpusStore corpus;
  corpus.add_patent(patent("S", days_from_civil(1990, 1, 11)));
  corpus.add_patent(patent("R", days_from_civil(1990, 1, 1)));
  corpus.add_edge_unchecked({"S", "R"});
  const std::vector<embed::ScoredEdge> scored = {{{"S", "R"}, 55.5}};
  const FeatureTable t = build_features(corpus, scored);
  ASSERT_EQ(t.rows.size(), 1u);
  const FeatureRow& r = t.rows[0];
  EXPECT_EQ(r.similarity, 55.5);
  EXPECT_EQ(r.temporal_diff_days, 10.0);
  EXPECT_EQ(r.pub_date, static_cast<double>(days_from_civil(1990, 1, 11) - days_from_civil(1976, 1, 1)));
  EXPECT_EQ(r.log_sender_citations, 0.0);
  EXPECT_EQ(r.is_same_org, 1);
  EXPECT_EQ(r.is_sender_org, 1);
  EXPECT_EQ(r.is_receiver_org, 1);
  EXPECT_EQ(r.jaccard.at(ipc::Level::SubGroup), 1.0);
  EXPECT_EQ(r.sender_year(), 1990);
}

TEST(BuildFeatures, OrgFlagsAndCitationCounts) {
  CorpusStore corpus;
  corpus.add_patent(patent("S", 5000, AssigneeKind::Organization, "ACME"));
  corpus.add_patent(patent("R1", 4000, AssigneeKind::Organization, "OTHER"));
  corpus.add_patent(patent("R2", 3000, AssigneeKind::Individual, "ACME"));
  corpus.add_patent(patent("R3", 2000, AssigneeKind::Unknown));
  for (const char* r : {"R1", "R2", "R3"}) corpus.add_edge_unchecked({"S", r});
  std::vector<embed::ScoredEdge> scored;
  for (const auto& e : corpus.edges()) scored.push_back({e, 1.0});
  const FeatureTable t = build_features(corpus, scored);
  ASSERT_EQ(t.rows.size(), 3u);
  for (const FeatureRow& r : t.rows) {
    EXPECT_EQ(r.log_sender_citations, std::log(3.0));
    EXPECT_EQ(r.is_same_org, 0);
    EXPECT_EQ(r.is_sender_org, 1);
  }
  EXPECT_EQ(t.rows[0].is_receiver_org, 1);
  EXPECT_EQ(t.rows[1].is_receiver_org, 0);
  EXPECT_EQ(t.rows[2].is_receiver_org, 0);
  EXPECT_EQ(t.drops.missing_assignee, 1u);
}

TEST(BuildFeatures, DropsAndNotes) {
  CorpusStore corpus;
  corpus.add_patent(patent("A", 1000));
  corpus.add_patent(patent("B", 2000));
  corpus.add_patent(patent("C", 3000, AssigneeKind::Organization, "ACME", {}));
  const std::vector<embed::ScoredEdge> scored = {
      {{"B", "A"}, 1.0}, {{"A", "B"}, 2.0}, {{"C", "A"}, 3.0}, {{"X", "A"}, 4.0}};
  const FeatureTable t = build_features(corpus, scored, {}, 5);
  EXPECT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.drops.negative_lag, 1u);
  EXPECT_EQ(t.drops.unresolved_endpoint, 1u);
  EXPECT_EQ(t.drops.missing_embedding, 5u);
  EXPECT_EQ(t.drops.undefined_jaccard, 1u);
  EXPECT_EQ(t.rows.size() + t.drops.dropped_total(), scored.size() + 5);

  const FeatureTable kept = build_features(corpus, scored, {.keep_negative_lags = true});
  EXPECT_EQ(kept.rows.size(), 3u);
  EXPECT_EQ(kept.rows[1].temporal_diff_days, -1000.0);
}

TEST(BuildFeatures, LagIsAntisymmetric) {
  CorpusStore corpus;
  corpus.add_patent(patent("A", 1234));
  corpus.add_patent(patent("B", 5678));
  const std::vector<embed::ScoredEdge> scored = {{{"A", "B"}, 0.0}, {{"B", "A"}, 0.0}};
  const FeatureTable t = build_features(corpus, scored, {.keep_negative_lags = true});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].temporal_diff_days, -t.rows[1].temporal_diff_days);
}

TEST(BuildFeatures, CitationCountsSumToEdges) {
  const SynthCorpus s = synth_corpus(2, 300, 2000, SynthProfile::standard());
  const auto scored = synthesize_scores(s.corpus, s.profile, 2);
  const FeatureTable t = build_features(s.corpus, scored, {.keep_negative_lags = true});
  ASSERT_EQ(t.rows.size(), s.corpus.edges().size());
  std::map<std::string, double> per_sender;
  for (const FeatureRow& r : t.rows) per_sender[r.sender_id] = std::exp(r.log_sender_citations);
  double total = 0;
  for (const auto& [id, count] : per_sender) total += std::round(count);
  EXPECT_EQ(total, static_cast<double>(t.rows.size()));
  for (const FeatureRow& r : t.rows) {
    EXPECT_GE(r.similarity, -100.0);
    EXPECT_LE(r.similarity, 100.0);
  }
}

TEST(YearlyLag, MeanPerYear) {
  FeatureTable t;
  for (double lag : {100.0, 300.0}) {
    FeatureRow r;
    r.pub_date = days_from_civil(2000, 3, 1) - kCovariateEpoch;
    r.temporal_diff_days = lag;
    t.rows.push_back(r);
  }
  const auto stats = yearly_lag_stats(t);
  ASSERT_EQ(stats.size(), 1u);
  EXPECT_EQ(stats[0].year, 2000);
  EXPECT_EQ(stats[0].mean_lag_days, 200.0);
  EXPECT_EQ(stats[0].count, 2u);
  EXPECT_TRUE(yearly_lag_stats(FeatureTable{}).empty());
}

TEST(SynthesizeScores, NullProfileIsNoiseAroundIntercept) {
  const SynthCorpus s = synth_corpus(4, 500, 6000, SynthProfile::null_effects());
  const auto scored = synthesize_scores(s.corpus, s.profile, 4);
  ASSERT_EQ(scored.size(), s.corpus.edges().size());
  double sum = 0, sq = 0;
  for (const auto& e : scored) {
    sum += e.similarity;
    sq += e.similarity * e.similarity;
  }
  const double n = static_cast<double>(scored.size());
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(mean, 45.0, 4 * 12.0 / std::sqrt(n));
  EXPECT_NEAR(sd, 12.0, 0.5);
}

TEST(SynthesizeScores, Deterministic) {
  const SynthCorpus s = synth_corpus(4, 200, 1000, SynthProfile::standard());
  const auto a = synthesize_scores(s.corpus, s.profile, 9);
  const auto b = synthesize_scores(s.corpus, s.profile, 9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].similarity, b[i].similarity);
}

TEST(FeaturesCsv, RoundTripWithUndefinedJaccard) {
  CorpusStore corpus;
  corpus.add_patent(patent("A", 1000));
  corpus.add_patent(patent("B", 2000));
  corpus.add_patent(patent("C", 3000, AssigneeKind::Unknown, "", {}));
  const std::vector<embed::ScoredEdge> scored = {{{"B", "A"}, 0.1 + 0.2}, {{"C", "A"}, -3.5}};
  const FeatureTable t = build_features(corpus, scored);
  testing::TempDir dir;
  {
    std::ofstream out(dir / "f.csv");
    write_features_csv(out, t);
  }
  const std::string text = testing::read_text(dir / "f.csv");
  EXPECT_TRUE(text.starts_with(std::string(kFeatureHeader) + "\n"));
  EXPECT_NE(text.find(",NA,NA,NA,NA,NA"), std::string::npos);
  const FeatureTable back = read_features_csv(dir / "f.csv");
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].similarity, 0.1 + 0.2);
  EXPECT_TRUE(back.rows[0].jaccard.defined);
  EXPECT_FALSE(back.rows[1].jaccard.defined);
  EXPECT_EQ(back.rows[1].temporal_diff_days, 2000.0);
}

TEST(FeaturesCsv, PartialNaIsRejected) {
  testing::TempDir dir;
  testing::write_text(dir / "f.csv", std::string(kFeatureHeader) + "\nA,B,1,2,3,0,0,0,0,NA,0,0,0,0\n");
  EXPECT_THROW(read_features_csv(dir / "f.csv"), ValidationError);
}

}  // namespace
}  // namespace patsim::features
