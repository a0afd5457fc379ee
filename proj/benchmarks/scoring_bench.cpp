#include <benchmark/benchmark.h>

#include <random>

#include "patsim/embedding_store.hpp"
#include "patsim/ipc.hpp"

namespace {

using namespace patsim;

struct Fixture {
  embed::EmbeddingMatrix matrix;
  std::vector<CitationEdge> edges;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture f;
    std::vector<std::string> ids;
    for (int i = 0; i < 5000; ++i) ids.push_back("US" + std::to_string(1000000 + i));
    f.matrix = embed::mock_embeddings(1, ids, 384);
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
    for (int i = 0; i < 200000; ++i) f.edges.push_back({ids[pick(rng)], ids[pick(rng)]});
    return f;
  }();
  return f;
}

void BM_ScoreEdges(benchmark::State& state) {
  const Fixture& f = fixture();
  const embed::ScoreOptions options{static_cast<std::size_t>(state.range(0)), static_cast<unsigned>(state.range(1))};
  for (auto _ : state) {
    std::size_t n = 0;
    embed::score_edges_streaming(f.matrix, f.edges, options,
                                 [&](std::span<const embed::ScoredEdge> chunk) { n += chunk.size(); });
    benchmark::DoNotOptimize(n);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.edges.size()));
}
BENCHMARK(BM_ScoreEdges)
    ->Args({4096, 1})
    ->Args({4096, 4})
    ->Args({256, 1})
    ->UseRealTime()
    ->Unit(benchmark::kMillisecond);

void BM_JaccardProfile(benchmark::State& state) {
  const std::vector<ipc::IpcCode> a = {ipc::parse_ipc("H04L 29/06"), ipc::parse_ipc("H04L 9/32"),
                                       ipc::parse_ipc("G06F 21/60")};
  const std::vector<ipc::IpcCode> b = {ipc::parse_ipc("H04L 29/08"), ipc::parse_ipc("G06F 21/62")};
  for (auto _ : state) benchmark::DoNotOptimize(ipc::jaccard_profile(a, b));
}
BENCHMARK(BM_JaccardProfile);

}  // namespace
