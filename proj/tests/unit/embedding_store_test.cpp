#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "patsim/embedding_store.hpp"
#include "patsim/error.hpp"
#include "support.hpp"

namespace patsim::embed {
namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_u64(std::string& s, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put_f32(std::string& s, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  put_u32(s, bits);
}

// PSIM bytes assembled field by field, independent of write_matrix.
std::string psim_bytes(std::uint64_t count, std::uint32_t dim, const std::vector<float>& values,
                       const char* magic = "PSIM", std::uint32_t version = 1, std::uint32_t dtype = 1) {
  std::string s(magic, 4);
  put_u32(s, version);
  put_u64(s, count);
  put_u32(s, dim);
  put_u32(s, dtype);
  for (float v : values) put_f32(s, v);
  return s;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

TEST(ReadMatrix, WellFormedFile) {
  testing::TempDir dir;
  testing::write_text(dir / "m.psim", psim_bytes(2, 3, {1, 2, 3, 4, 5, 6}));
  testing::write_text(dir / "m.ids", "P1\nP2\n");
  const EmbeddingMatrix m = read_matrix(dir / "m.psim");
  EXPECT_EQ(m.count(), 2u);
  EXPECT_EQ(m.dim(), 3u);
  EXPECT_EQ(m.find("P2"), 1);
  EXPECT_EQ(m.find("P9"), -1);
  EXPECT_EQ(m.row(1)[2], 6.0f);
  EXPECT_DOUBLE_EQ(m.row_norms()[0], std::sqrt(14.0));
}

TEST(ReadMatrix, FormatErrors) {
  testing::TempDir dir;
  testing::write_text(dir / "m.ids", "P1\nP2\n");
  auto load = [&](const std::string& bytes) {
    testing::write_text(dir / "m.psim", bytes);
    return message_of([&] { read_matrix(dir / "m.psim"); });
  };
  EXPECT_NE(load(psim_bytes(2, 3, {1, 2, 3, 4, 5, 6}, "XXXX")).find("bad magic"), std::string::npos);
  EXPECT_NE(load(psim_bytes(2, 3, {1, 2, 3, 4, 5})).find("truncated"), std::string::npos);
  EXPECT_NE(load(psim_bytes(2, 3, {1, 2, 3, 4, 5, 6, 7})).find("dim/count mismatch"), std::string::npos);
  EXPECT_NE(load(psim_bytes(2, 3, {1, 2, 3, 4, 5, 6}, "PSIM", 2)).find("version"), std::string::npos);
  EXPECT_NE(load(psim_bytes(2, 3, {1, 2, 3, 4, 5, 6}, "PSIM", 1, 2)).find("dtype"), std::string::npos);
  EXPECT_NE(load(psim_bytes(2, 0, {})).find("dim must be positive"), std::string::npos);
  EXPECT_NE(load("PSI").find("truncated"), std::string::npos);
  EXPECT_NE(load(psim_bytes(2, 3, {1, 2, 3, 4, NAN, 6})).find("row 1"), std::string::npos);
  testing::write_text(dir / "m.ids", "P1\n");
  EXPECT_NE(load(psim_bytes(2, 3, {1, 2, 3, 4, 5, 6})), "");
}

TEST(WriteMatrix, RoundTripAndSidecar) {
  testing::TempDir dir;
  const EmbeddingMatrix m(2, {"A", "B", "C"}, {1, 0, 0, 1, 0.5f, -0.25f});
  write_matrix(dir / "v.psim", m);
  EXPECT_TRUE(std::filesystem::exists(dir / "v.ids"));
  EXPECT_EQ(testing::read_text(dir / "v.ids"), "A\nB\nC\n");
  EXPECT_EQ(testing::read_text(dir / "v.psim"), psim_bytes(3, 2, {1, 0, 0, 1, 0.5f, -0.25f}));
  const EmbeddingMatrix back = read_matrix(dir / "v.psim");
  EXPECT_EQ(std::vector<float>(back.data().begin(), back.data().end()),
            std::vector<float>(m.data().begin(), m.data().end()));
}

TEST(EmbeddingMatrix, RejectsDuplicateIds) {
  EXPECT_THROW(EmbeddingMatrix(1, {"A", "A"}, {1, 2}), ValidationError);
  EXPECT_THROW(EmbeddingMatrix(2, {"A"}, {1}), ValidationError);
}

TEST(MockEmbeddings, UnitNormAndKeyedBySeedAndId) {
  const std::vector<std::string> ids = {"P1", "P2"};
  const EmbeddingMatrix a = mock_embeddings(1, ids, 4);
  EXPECT_EQ(a.count(), 2u);
  for (double n : a.row_norms()) EXPECT_NEAR(n, 1.0, 1e-6);
  const std::vector<std::string> other = {"P9", "P2"};
  const EmbeddingMatrix b = mock_embeddings(1, other, 4);
  EXPECT_TRUE(std::equal(a.row(1).begin(), a.row(1).end(), b.row(1).begin()));
  EXPECT_THROW(mock_embeddings(1, ids, 0), ValidationError);
}

TEST(ScaledCosine, Examples) {
  const std::vector<float> u = {3, 4}, v = {4, 3};
  EXPECT_NEAR(scaled_cosine(u, v), 96.0, 1e-12);
  EXPECT_NEAR(scaled_cosine(u, u), 100.0, 1e-12);
  const std::vector<float> e1 = {1, 0, 0}, e2 = {0, 1, 0};
  EXPECT_EQ(scaled_cosine(e1, e2), 0.0);
}

TEST(ScaledCosine, SymmetryAndScaleInvariance) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n;
  for (int t = 0; t < 50; ++t) {
    std::vector<float> u(17), v(17), w(17);
    for (auto& x : u) x = n(rng);
    for (auto& x : v) x = n(rng);
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = 4.0f * u[i];
    EXPECT_EQ(scaled_cosine(u, v), scaled_cosine(v, u));
    EXPECT_NEAR(scaled_cosine(w, v), scaled_cosine(u, v), 1e-9);
  }
}

double naive(std::span<const float> u, std::span<const float> v) {
  double uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += static_cast<double>(u[i]) * v[i];
    uu += static_cast<double>(u[i]) * u[i];
    vv += static_cast<double>(v[i]) * v[i];
  }
  return uv / std::sqrt(uu * vv);
}

TEST(ScoreEdges, MatchesNaiveOracleForEveryChunkSizeAndWorkerCount) {
  std::mt19937_64 rng(9);
  std::normal_distribution<float> normal;
  const std::size_t n = 120, dim = 33;
  std::vector<std::string> ids;
  std::vector<float> data(n * dim);
  for (std::size_t i = 0; i < n; ++i) ids.push_back("P" + std::to_string(i));
  for (auto& x : data) x = normal(rng);
  const EmbeddingMatrix m(dim, ids, data);

  std::vector<CitationEdge> edges;
  for (int i = 0; i < 1000; ++i) edges.push_back({ids[rng() % n], ids[rng() % n]});
  edges.push_back({"P1", "MISSING"});

  std::vector<ScoredEdge> reference;
  for (std::size_t chunk : {1u, 7u, 64u, 4096u}) {
    for (unsigned workers : {1u, 3u}) {
      const ScoreResult r = score_edges(m, edges, {chunk, workers});
      ASSERT_EQ(r.scored.size(), 1000u);
      EXPECT_EQ(r.report.missing_row, 1u);
      for (std::size_t i = 0; i < 1000; ++i) {
        EXPECT_EQ(r.scored[i].edge, edges[i]);
        const double want =
            naive(m.row(static_cast<std::size_t>(m.find(edges[i].sender_id))),
                  m.row(static_cast<std::size_t>(m.find(edges[i].receiver_id))));
        EXPECT_LE(std::abs(r.scored[i].similarity / 100.0 - want), 1e-9);
      }
      if (reference.empty()) {
        reference = r.scored;
      } else {
        for (std::size_t i = 0; i < reference.size(); ++i)
          EXPECT_EQ(r.scored[i].similarity, reference[i].similarity);
      }
    }
  }
}

TEST(ScoreEdges, ZeroNormRowsAreSkippedAndCounted) {
  const EmbeddingMatrix m(2, {"A", "B", "Z"}, {1, 0, 0, 1, 0, 0});
  const std::vector<CitationEdge> edges = {{"A", "B"}, {"A", "Z"}, {"Q", "A"}};
  const ScoreResult r = score_edges(m, edges);
  EXPECT_EQ(r.report.input_edges, 3u);
  EXPECT_EQ(r.report.scored, 1u);
  EXPECT_EQ(r.report.zero_norm, 1u);
  EXPECT_EQ(r.report.missing_row, 1u);
}

TEST(ScoreEdges, StreamingSinkSeesInputOrder) {
  const EmbeddingMatrix m = mock_embeddings(5, std::vector<std::string>{"A", "B", "C", "D"}, 8);
  std::vector<CitationEdge> edges;
  for (int i = 0; i < 50; ++i) edges.push_back({std::string(1, static_cast<char>('A' + i % 4)),
                                                std::string(1, static_cast<char>('A' + (i + 1) % 4))});
  std::vector<ScoredEdge> seen;
  std::size_t calls = 0;
  score_edges_streaming(m, edges, {8, 2}, [&](std::span<const ScoredEdge> chunk) {
    ++calls;
    EXPECT_LE(chunk.size(), 8u);
    seen.insert(seen.end(), chunk.begin(), chunk.end());
  });
  EXPECT_EQ(calls, 7u);
  ASSERT_EQ(seen.size(), edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) EXPECT_EQ(seen[i].edge, edges[i]);
}

TEST(Normalize, RowsBecomeUnitAndScoresUnchanged) {
  const EmbeddingMatrix m(2, {"A", "B"}, {3, 4, 4, 3});
  const EmbeddingMatrix n = normalize(m);
  for (double r : n.row_norms()) EXPECT_NEAR(r, 1.0, 1e-7);
  EXPECT_NEAR(scaled_cosine(n.row(0), n.row(1)), 96.0, 1e-5);
}

PatentRecord dated(std::string id, int year) {
  PatentRecord p;
  p.patent_id = std::move(id);
  p.grant_date = days_from_civil(year, 6, 1);
  return p;
}

TEST(YearlyStats, MeanCountAndStddev) {
  CorpusStore corpus;
  corpus.add_patent(dated("S1", 1990));
  corpus.add_patent(dated("S2", 1990));
  corpus.add_patent(dated("S3", 1995));
  corpus.add_patent(dated("R", 1980));
  const std::vector<ScoredEdge> scored = {{{"S1", "R"}, 40.0}, {{"S2", "R"}, 60.0}, {{"S3", "R"}, 10.0}};
  const auto stats = yearly_similarity_stats(scored, corpus);
  ASSERT_EQ(stats.size(), 2u);
  EXPECT_EQ(stats[0].year, 1990);
  EXPECT_EQ(stats[0].mean, 50.0);
  EXPECT_EQ(stats[0].count, 2u);
  EXPECT_NEAR(stats[0].stddev, std::sqrt(200.0), 1e-12);
  EXPECT_EQ(stats[1].stddev, 0.0);
  EXPECT_TRUE(yearly_similarity_stats({}, corpus).empty());
}

TEST(ScoresCsv, RoundTrip) {
  testing::TempDir dir;
  const std::vector<ScoredEdge> scored = {{{"A", "B"}, 12.345678901234567}, {{"C,1", "D"}, -100.0}};
  {
    std::ofstream out(dir / "s.csv");
    write_scores_csv(out, scored);
  }
  const auto back = read_scores_csv(dir / "s.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].similarity, scored[0].similarity);
  EXPECT_EQ(back[1].edge.sender_id, "C,1");
}

}  // namespace
}  // namespace patsim::embed
