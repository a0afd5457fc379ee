#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patsim/corpus.hpp"

namespace patsim::embed {

/// Row-major float32 embeddings with a row -> patent id index.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Validates shape, unique ids and finiteness; throws ValidationError.
  EmbeddingMatrix(std::uint32_t dim, std::vector<std::string> ids, std::vector<float> data);

  std::uint32_t dim() const { return dim_; }
  std::size_t count() const { return ids_.size(); }
  std::span<const std::string> ids() const { return ids_; }
  std::span<const float> data() const { return data_; }

  std::span<const float> row(std::size_t index) const {
    return {data_.data() + index * dim_, dim_};
  }
  /// Row index for an id, or -1.
  std::ptrdiff_t find(std::string_view patent_id) const;

  /// Euclidean norm of each row, accumulated in double.
  const std::vector<double>& row_norms() const { return norms_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::uint32_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> data_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
};

// PSIM on-disk layout, little-endian.
inline constexpr char kPsimMagic[4] = {'P', 'S', 'I', 'M'};
inline constexpr std::uint32_t kPsimVersion = 1;
inline constexpr std::uint32_t kPsimDtypeFloat32 = 1;
inline constexpr std::size_t kPsimHeaderBytes = 4 + 4 + 8 + 4 + 4;

/// `vectors.psim` -> `vectors.ids`.
std::filesystem::path ids_path_for(const std::filesystem::path& psim_path);

/// Reads a PSIM file and its `.ids` sidecar.
EmbeddingMatrix read_matrix(const std::filesystem::path& path);

/// Writes the matrix and its sidecar; the payload goes through a temp file
/// and rename so readers never observe a partial file.
void write_matrix(const std::filesystem::path& path, const EmbeddingMatrix& matrix);

/// Copy with every non-zero row scaled to unit norm. Scoring never requires it.
EmbeddingMatrix normalize(const EmbeddingMatrix& matrix);

/// Pseudo-random unit vectors keyed by (seed, patent id): the same id gets
/// the same row in every file generated with the same seed and dim.
EmbeddingMatrix mock_embeddings(std::uint64_t seed, std::span<const std::string> ids, std::uint32_t dim);

struct ScoredEdge {
  CitationEdge edge;
  double similarity = 0.0;  // 100 * cosine, in [-100, 100]
};

enum class SkipReason { MissingRow, ZeroNorm };

struct ScoreReport {
  std::size_t input_edges = 0;
  std::size_t scored = 0;
  std::size_t missing_row = 0;
  std::size_t zero_norm = 0;
};

struct ScoreOptions {
  std::size_t chunk_size = 4096;
  unsigned workers = 1;
};

/// 100 * u.v / (|u| |v|) accumulated in double. Undefined for zero-norm input.
double scaled_cosine(std::span<const float> u, std::span<const float> v);

/// Scores edges chunk by chunk. Each chunk is split across workers and
/// handed to `sink` in input order, so results do not depend on
/// chunk_size or workers. Edges with a missing row or a zero-norm vector
/// are skipped and counted.
ScoreReport score_edges_streaming(const EmbeddingMatrix& matrix, std::span<const CitationEdge> edges,
                                  const ScoreOptions& options,
                                  const std::function<void(std::span<const ScoredEdge>)>& sink);

struct ScoreResult {
  std::vector<ScoredEdge> scored;
  ScoreReport report;
};

ScoreResult score_edges(const EmbeddingMatrix& matrix, std::span<const CitationEdge> edges,
                        const ScoreOptions& options = {});

struct YearStats {
  int year = 0;
  double mean = 0.0;
  std::size_t count = 0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
};

/// Similarity summary grouped by the sender's grant year, sorted by year.
/// Throws ValidationError if a sender is not in the corpus.
std::vector<YearStats> yearly_similarity_stats(std::span<const ScoredEdge> scored, const CorpusStore& corpus);

void write_scores_csv(std::ostream& out, std::span<const ScoredEdge> scored);
std::vector<ScoredEdge> read_scores_csv(const std::filesystem::path& path);

}  // namespace patsim::embed
