#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patsim/date.hpp"
#include "patsim/ipc.hpp"

namespace patsim {

enum class AssigneeKind { Organization, Individual, Unknown };

std::string_view to_string(AssigneeKind kind);

struct PatentRecord {
  std::string patent_id;
  Days grant_date = 0;
  std::string abstract_text;
  std::vector<ipc::IpcCode> ipc_codes;
  AssigneeKind assignee_kind = AssigneeKind::Unknown;
  std::string assignee_id;  // empty iff Unknown
  bool is_utility = true;

  bool operator==(const PatentRecord&) const = default;
};

/// Directed citation: sender (citing) -> receiver (cited).
struct CitationEdge {
  std::string sender_id;
  std::string receiver_id;

  auto operator<=>(const CitationEdge&) const = default;
};

struct Reject {
  std::size_t row_number = 0;  // 1-based data row, header excluded
  std::string reason;
};

struct PatentIngestReport {
  std::size_t rows_read = 0;
  std::size_t accepted = 0;
  std::vector<Reject> rejects;
};

/// raw == attached + self_citations + dangling + duplicates.
struct CitationIngestReport {
  std::size_t raw = 0;
  std::size_t attached = 0;
  std::size_t self_citations = 0;
  std::size_t dangling = 0;
  std::size_t duplicates = 0;
  std::vector<Reject> rejects;
};

struct FilterReport {
  std::size_t patents_removed = 0;
  std::size_t edges_removed = 0;
};

struct Provenance {
  std::string patents_sha256;
  std::string citations_sha256;
  std::size_t patent_rows = 0;
  std::size_t citation_rows = 0;
};

/// Validated patents and citation edges. Built through ingestion or the
/// synthetic generator; read-only once handed downstream.
class CorpusStore {
 public:
  /// False (and no insertion) when the id is already present.
  bool add_patent(PatentRecord record);

  /// Attaches an edge whose endpoints must both be present; no dedup here.
  void add_edge_unchecked(CitationEdge edge) { edges_.push_back(std::move(edge)); }

  const PatentRecord* find(std::string_view patent_id) const;
  bool contains(std::string_view patent_id) const { return find(patent_id) != nullptr; }

  std::span<const PatentRecord> patents() const { return patents_; }
  std::span<const CitationEdge> edges() const { return edges_; }

  Provenance& provenance() { return provenance_; }
  const Provenance& provenance() const { return provenance_; }

  /// Same patents and edges irrespective of insertion order.
  bool equivalent_to(const CorpusStore& other) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };

  std::vector<PatentRecord> patents_;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  std::vector<CitationEdge> edges_;
  Provenance provenance_;
};

struct IngestOptions {
  bool strict = false;
  Days run_date = today_utc();  // latest acceptable grant date
};

struct PatentIngestResult {
  CorpusStore corpus;
  PatentIngestReport report;
};

struct CitationIngestResult {
  CorpusStore corpus;
  CitationIngestReport report;
};

/// Reads patents.csv. Invalid rows are rejected into the report, or, with
/// options.strict, abort ingestion with a ValidationError naming the row.
PatentIngestResult ingest_patents(const std::filesystem::path& path, const IngestOptions& options = {});
PatentIngestResult ingest_patents(std::istream& in, const IngestOptions& options = {});

/// Raw citation rows as read from citations.csv, before validation.
std::vector<CitationEdge> read_citation_rows(const std::filesystem::path& path);
std::vector<CitationEdge> read_citation_rows(std::istream& in);

/// Attaches edges to a copy of `corpus`. Self-citations, dangling endpoints
/// and duplicates (keep first) are dropped and counted.
CitationIngestResult attach_citations(std::span<const CitationEdge> raw, const CorpusStore& corpus);
CitationIngestResult ingest_citations(const std::filesystem::path& path, const CorpusStore& corpus);

/// Removes non-utility patents and every edge touching them. Idempotent.
CorpusStore filter_utility(const CorpusStore& corpus, FilterReport* report = nullptr);

/// Validated backward-citation count per sender id.
std::unordered_map<std::string, std::size_t> out_degrees(const CorpusStore& corpus);

void write_patents_csv(std::ostream& out, const CorpusStore& corpus);
void write_citations_csv(std::ostream& out, const CorpusStore& corpus);
void write_rejects_csv(std::ostream& out, std::span<const Reject> rejects);

}  // namespace patsim
