#include "patsim/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "patsim/csv.hpp"
#include "patsim/error.hpp"

namespace patsim::embed {

namespace {

static_assert(std::numeric_limits<float>::is_iec559, "PSIM stores IEEE-754 float32");

template <typename T>
T load_le(const unsigned char* p) {
  T value{};
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    auto* b = reinterpret_cast<unsigned char*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  return value;
}

template <typename T>
void store_le(std::ostream& out, T value) {
  auto* b = reinterpret_cast<unsigned char*>(&value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

// Four interleaved accumulators in a fixed summation order.
double dot(const float* a, const float* b, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += static_cast<double>(a[i]) * b[i];
    s1 += static_cast<double>(a[i + 1]) * b[i + 1];
    s2 += static_cast<double>(a[i + 2]) * b[i + 2];
    s3 += static_cast<double>(a[i + 3]) * b[i + 3];
  }
  for (; i < n; ++i) s0 += static_cast<double>(a[i]) * b[i];
  return (s0 + s1) + (s2 + s3);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::uint32_t dim, std::vector<std::string> ids, std::vector<float> data)
    : dim_(dim), ids_(std::move(ids)), data_(std::move(data)) {
  if (dim_ == 0) throw ValidationError("embedding matrix: dim must be positive");
  if (data_.size() != ids_.size() * dim_)
    throw ValidationError("embedding matrix: dim/count mismatch (" + std::to_string(data_.size()) + " values for " +
                          std::to_string(ids_.size()) + " rows of dim " + std::to_string(dim_) + ")");
  index_.reserve(ids_.size());
  norms_.resize(ids_.size());
  for (std::size_t r = 0; r < ids_.size(); ++r) {
    if (ids_[r].empty()) throw ValidationError("embedding matrix: empty id at row " + std::to_string(r));
    if (!index_.try_emplace(ids_[r], r).second)
      throw ValidationError("embedding matrix: duplicate id '" + ids_[r] + "' at row " + std::to_string(r));
    const float* row = data_.data() + r * dim_;
    for (std::uint32_t c = 0; c < dim_; ++c)
      if (!std::isfinite(row[c]))
        throw ValidationError("embedding matrix: non-finite value at row " + std::to_string(r) + ", column " +
                              std::to_string(c));
    norms_[r] = std::sqrt(dot(row, row, dim_));
  }
}

std::ptrdiff_t EmbeddingMatrix::find(std::string_view patent_id) const {
  auto it = index_.find(patent_id);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::filesystem::path ids_path_for(const std::filesystem::path& psim_path) {
  std::filesystem::path p = psim_path;
  p.replace_extension(".ids");
  return p;
}

EmbeddingMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("psim: cannot read " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string where = "psim " + path.string() + ": ";

  if (bytes.size() < 4) throw ValidationError(where + "truncated header");
  if (std::memcmp(bytes.data(), kPsimMagic, 4) != 0) throw ValidationError(where + "bad magic");
  if (bytes.size() < kPsimHeaderBytes) throw ValidationError(where + "truncated header");
  const auto version = load_le<std::uint32_t>(bytes.data() + 4);
  const auto count = load_le<std::uint64_t>(bytes.data() + 8);
  const auto dim = load_le<std::uint32_t>(bytes.data() + 16);
  const auto dtype = load_le<std::uint32_t>(bytes.data() + 20);
  if (version != kPsimVersion) throw ValidationError(where + "unsupported version " + std::to_string(version));
  if (dtype != kPsimDtypeFloat32) throw ValidationError(where + "unsupported dtype " + std::to_string(dtype));
  if (dim == 0) throw ValidationError(where + "dim must be positive");

  const std::size_t payload = bytes.size() - kPsimHeaderBytes;
  if (count > payload / (4ull * dim))
    throw ValidationError(where + "truncated (header declares " + std::to_string(count) + "x" + std::to_string(dim) +
                          " floats, payload holds " + std::to_string(payload) + " bytes)");
  if (count * dim * 4 != payload)
    throw ValidationError(where + "dim/count mismatch (" + std::to_string(payload - count * dim * 4) +
                          " trailing bytes)");

  std::vector<float> data(count * dim);
  const unsigned char* p = bytes.data() + kPsimHeaderBytes;
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = load_le<float>(p + 4 * i);

  const std::filesystem::path ids_path = ids_path_for(path);
  std::ifstream ids_in(ids_path, std::ios::binary);
  if (!ids_in) throw ValidationError(where + "missing ids sidecar " + ids_path.string());
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::string line; std::getline(ids_in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ids.push_back(std::move(line));
  }
  if (ids.size() != count)
    throw ValidationError(where + "ids sidecar has " + std::to_string(ids.size()) + " lines, header count is " +
                          std::to_string(count));
  for (std::size_t r = 0; r < count; ++r)
    for (std::uint32_t c = 0; c < dim; ++c)
      if (!std::isfinite(data[r * dim + c]))
        throw ValidationError(where + "non-finite value at row " + std::to_string(r));
  return EmbeddingMatrix(dim, std::move(ids), std::move(data));
}

void write_matrix(const std::filesystem::path& path, const EmbeddingMatrix& matrix) {
  auto write_atomically = [](const std::filesystem::path& target, auto&& body) {
    std::filesystem::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      body(out);
      if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, target);
  };
  write_atomically(path, [&](std::ostream& out) {
    out.write(kPsimMagic, 4);
    store_le<std::uint32_t>(out, kPsimVersion);
    store_le<std::uint64_t>(out, matrix.count());
    store_le<std::uint32_t>(out, matrix.dim());
    store_le<std::uint32_t>(out, kPsimDtypeFloat32);
    for (float v : matrix.data()) store_le<float>(out, v);
  });
  write_atomically(ids_path_for(path), [&](std::ostream& out) {
    for (const std::string& id : matrix.ids()) out << id << '\n';
  });
}

EmbeddingMatrix normalize(const EmbeddingMatrix& matrix) {
  std::vector<float> data(matrix.data().begin(), matrix.data().end());
  for (std::size_t r = 0; r < matrix.count(); ++r) {
    const double norm = matrix.row_norms()[r];
    if (norm == 0.0) continue;
    for (std::uint32_t c = 0; c < matrix.dim(); ++c)
      data[r * matrix.dim() + c] = static_cast<float>(data[r * matrix.dim() + c] / norm);
  }
  return EmbeddingMatrix(matrix.dim(), {matrix.ids().begin(), matrix.ids().end()}, std::move(data));
}

EmbeddingMatrix mock_embeddings(std::uint64_t seed, std::span<const std::string> ids, std::uint32_t dim) {
  if (dim == 0) throw ValidationError("mock embeddings: dim must be positive");
  std::vector<float> data(ids.size() * dim);
  std::vector<double> v(dim);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    std::mt19937_64 rng(splitmix64(seed ^ fnv1a(ids[r])));
    std::normal_distribution<double> normal(0.0, 1.0);
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& x : v) {
        x = normal(rng);
        norm2 += x * x;
      }
    } while (norm2 == 0.0);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::uint32_t c = 0; c < dim; ++c) data[r * dim + c] = static_cast<float>(v[c] * inv);
  }
  return EmbeddingMatrix(dim, {ids.begin(), ids.end()}, std::move(data));
}

double scaled_cosine(std::span<const float> u, std::span<const float> v) {
  const std::size_t n = std::min(u.size(), v.size());
  const double uv = dot(u.data(), v.data(), n);
  const double uu = dot(u.data(), u.data(), n);
  const double vv = dot(v.data(), v.data(), n);
  return 100.0 * uv / (std::sqrt(uu) * std::sqrt(vv));
}

ScoreReport score_edges_streaming(const EmbeddingMatrix& matrix, std::span<const CitationEdge> edges,
                                  const ScoreOptions& options,
                                  const std::function<void(std::span<const ScoredEdge>)>& sink) {
  const std::size_t chunk = std::max<std::size_t>(1, options.chunk_size);
  const unsigned workers = std::max(1u, options.workers);
  const std::vector<double>& norms = matrix.row_norms();
  const std::uint32_t dim = matrix.dim();

  ScoreReport report;
  report.input_edges = edges.size();

  // 0 = scored, 1 = missing row, 2 = zero norm
  std::vector<std::uint8_t> status;
  std::vector<ScoredEdge> slots;
  std::vector<ScoredEdge> emitted;

  for (std::size_t begin = 0; begin < edges.size(); begin += chunk) {
    const std::size_t end = std::min(edges.size(), begin + chunk);
    const std::size_t len = end - begin;
    status.assign(len, 0);
    slots.resize(len);

    auto score_range = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const CitationEdge& e = edges[begin + i];
        const std::ptrdiff_t a = matrix.find(e.sender_id);
        const std::ptrdiff_t b = matrix.find(e.receiver_id);
        if (a < 0 || b < 0) {
          status[i] = 1;
          continue;
        }
        const double na = norms[static_cast<std::size_t>(a)];
        const double nb = norms[static_cast<std::size_t>(b)];
        if (na == 0.0 || nb == 0.0) {
          status[i] = 2;
          continue;
        }
        const double d = dot(matrix.row(static_cast<std::size_t>(a)).data(),
                             matrix.row(static_cast<std::size_t>(b)).data(), dim);
        slots[i].edge = e;
        slots[i].similarity = 100.0 * d / (na * nb);
      }
    };

    if (workers == 1 || len < 2 * workers) {
      score_range(0, len);
    } else {
      std::vector<std::jthread> pool;
      const std::size_t step = (len + workers - 1) / workers;
      for (std::size_t lo = 0; lo < len; lo += step) pool.emplace_back(score_range, lo, std::min(len, lo + step));
    }

    emitted.clear();
    for (std::size_t i = 0; i < len; ++i) {
      switch (status[i]) {
        case 0:
          emitted.push_back(std::move(slots[i]));
          break;
        case 1:
          ++report.missing_row;
          break;
        default:
          ++report.zero_norm;
          break;
      }
    }
    report.scored += emitted.size();
    sink(emitted);
  }
  return report;
}

ScoreResult score_edges(const EmbeddingMatrix& matrix, std::span<const CitationEdge> edges,
                        const ScoreOptions& options) {
  ScoreResult result;
  result.scored.reserve(edges.size());
  result.report = score_edges_streaming(matrix, edges, options, [&](std::span<const ScoredEdge> part) {
    result.scored.insert(result.scored.end(), part.begin(), part.end());
  });
  return result;
}

std::vector<YearStats> yearly_similarity_stats(std::span<const ScoredEdge> scored, const CorpusStore& corpus) {
  struct Acc {
    std::size_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  std::map<int, Acc> groups;
  for (const ScoredEdge& s : scored) {
    const PatentRecord* sender = corpus.find(s.edge.sender_id);
    if (!sender) throw ValidationError("yearly similarity: sender '" + s.edge.sender_id + "' not in corpus");
    Acc& a = groups[year_of(sender->grant_date)];
    ++a.n;
    const double delta = s.similarity - a.mean;
    a.mean += delta / static_cast<double>(a.n);
    a.m2 += delta * (s.similarity - a.mean);
  }
  std::vector<YearStats> out;
  out.reserve(groups.size());
  for (const auto& [year, a] : groups)
    out.push_back({year, a.mean, a.n, a.n > 1 ? std::sqrt(a.m2 / static_cast<double>(a.n - 1)) : 0.0});
  return out;
}

void write_scores_csv(std::ostream& out, std::span<const ScoredEdge> scored) {
  out << "sender_id,receiver_id,similarity\n";
  for (const ScoredEdge& s : scored)
    csv::write_row(out, {s.edge.sender_id, s.edge.receiver_id, csv::format_double(s.similarity)});
}

std::vector<ScoredEdge> read_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read scores file " + path.string());
  csv::Reader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f) || f != std::vector<std::string>{"sender_id", "receiver_id", "similarity"})
    throw ValidationError(path.string() + ": malformed header (expected sender_id,receiver_id,similarity)");
  std::vector<ScoredEdge> out;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 3)
      throw ValidationError(path.string() + ": malformed row " + std::to_string(reader.record_number()));
    out.push_back({{f[0], f[1]}, csv::parse_double(f[2], "similarity")});
  }
  return out;
}

}  // namespace patsim::embed
