#include "patsim/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_set>

#include "patsim/csv.hpp"
#include "patsim/digest.hpp"
#include "patsim/error.hpp"

namespace patsim {

namespace {

constexpr const char* kPatentHeader[] = {"patent_id", "grant_date",    "abstract", "ipc_codes",
                                         "assignee_kind", "assignee_id", "is_utility"};
constexpr Days kEarliestGrant = -65743;  // 1790-01-01

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_blank_record(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

void strip_bom(std::vector<std::string>& header) {
  if (!header.empty() && header[0].starts_with("\xEF\xBB\xBF")) header[0].erase(0, 3);
}

std::optional<AssigneeKind> parse_kind(std::string_view text) {
  if (text == "org") return AssigneeKind::Organization;
  if (text == "individual") return AssigneeKind::Individual;
  if (text == "unknown") return AssigneeKind::Unknown;
  return std::nullopt;
}

std::optional<bool> parse_bool(std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  return std::nullopt;
}

// Returns the rejection reason, or empty when the row is valid.
std::string parse_patent_row(const std::vector<std::string>& f, Days run_date, PatentRecord& out) {
  if (f.size() != std::size(kPatentHeader))
    return "wrong field count (" + std::to_string(f.size()) + ")";
  out = PatentRecord{};
  out.patent_id = std::string(trim(f[0]));
  if (out.patent_id.empty()) return "empty patent_id";

  const auto date = parse_iso_date(trim(f[1]));
  if (!date) return "invalid date";
  if (*date < kEarliestGrant || *date > run_date) return "date out of range";
  out.grant_date = *date;

  out.abstract_text = f[2];

  std::string_view codes = f[3];
  while (!codes.empty()) {
    const std::size_t semi = codes.find(';');
    const std::string_view piece = trim(codes.substr(0, semi));
    if (!piece.empty()) {
      try {
        out.ipc_codes.push_back(ipc::parse_ipc(piece));
      } catch (const ipc::ParseError& e) {
        return std::string("invalid ipc code: ") + e.what();
      }
    }
    if (semi == std::string_view::npos) break;
    codes.remove_prefix(semi + 1);
  }

  const auto kind = parse_kind(trim(f[4]));
  if (!kind) return "invalid assignee_kind";
  out.assignee_kind = *kind;
  out.assignee_id = std::string(trim(f[5]));
  if ((out.assignee_kind == AssigneeKind::Unknown) != out.assignee_id.empty())
    return "assignee_id must be empty iff assignee_kind is unknown";

  const auto utility = parse_bool(trim(f[6]));
  if (!utility) return "invalid is_utility";
  out.is_utility = *utility;
  return {};
}

std::string edge_key(const CitationEdge& e) { return e.sender_id + '\x1f' + e.receiver_id; }

}  // namespace

std::string_view to_string(AssigneeKind kind) {
  switch (kind) {
    case AssigneeKind::Organization: return "org";
    case AssigneeKind::Individual: return "individual";
    case AssigneeKind::Unknown: return "unknown";
  }
  return "unknown";
}

bool CorpusStore::add_patent(PatentRecord record) {
  auto [it, inserted] = index_.try_emplace(record.patent_id, patents_.size());
  if (!inserted) return false;
  patents_.push_back(std::move(record));
  return true;
}

const PatentRecord* CorpusStore::find(std::string_view patent_id) const {
  auto it = index_.find(patent_id);
  return it == index_.end() ? nullptr : &patents_[it->second];
}

bool CorpusStore::equivalent_to(const CorpusStore& other) const {
  if (patents_.size() != other.patents_.size() || edges_.size() != other.edges_.size()) return false;
  for (const PatentRecord& p : patents_) {
    const PatentRecord* q = other.find(p.patent_id);
    if (!q || !(*q == p)) return false;
  }
  std::vector<CitationEdge> a(edges_.begin(), edges_.end());
  std::vector<CitationEdge> b(other.edges_.begin(), other.edges_.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

PatentIngestResult ingest_patents(std::istream& in, const IngestOptions& options) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw ValidationError("patents.csv: empty file (missing header)");
  strip_bom(fields);
  if (fields.size() != std::size(kPatentHeader) || !std::equal(fields.begin(), fields.end(), std::begin(kPatentHeader)))
    throw ValidationError(
        "patents.csv: malformed header (expected "
        "patent_id,grant_date,abstract,ipc_codes,assignee_kind,assignee_id,is_utility)");

  PatentIngestResult result;
  std::size_t row = 0;
  PatentRecord record;
  while (reader.next(fields)) {
    if (is_blank_record(fields)) continue;
    ++row;
    std::string reason = parse_patent_row(fields, options.run_date, record);
    if (reason.empty() && result.corpus.contains(record.patent_id)) reason = "duplicate patent_id";
    if (!reason.empty()) {
      if (options.strict) throw ValidationError("patents.csv row " + std::to_string(row) + ": " + reason);
      result.report.rejects.push_back({row, std::move(reason)});
      continue;
    }
    result.corpus.add_patent(std::move(record));
  }
  result.report.rows_read = row;
  result.report.accepted = result.corpus.patents().size();
  result.corpus.provenance().patent_rows = row;
  return result;
}

PatentIngestResult ingest_patents(const std::filesystem::path& path, const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read patents file " + path.string());
  PatentIngestResult result = ingest_patents(in, options);
  result.corpus.provenance().patents_sha256 = sha256_file(path);
  return result;
}

std::vector<CitationEdge> read_citation_rows(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> fields;
  if (!reader.next(fields)) throw ValidationError("citations.csv: empty file (missing header)");
  strip_bom(fields);
  if (fields.size() != 2 || fields[0] != "sender_id" || fields[1] != "receiver_id")
    throw ValidationError("citations.csv: malformed header (expected sender_id,receiver_id)");
  std::vector<CitationEdge> rows;
  std::size_t row = 0;
  while (reader.next(fields)) {
    if (is_blank_record(fields)) continue;
    ++row;
    if (fields.size() != 2 || trim(fields[0]).empty() || trim(fields[1]).empty())
      throw ValidationError("citations.csv row " + std::to_string(row) + ": malformed row");
    rows.push_back({std::string(trim(fields[0])), std::string(trim(fields[1]))});
  }
  return rows;
}

std::vector<CitationEdge> read_citation_rows(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read citations file " + path.string());
  return read_citation_rows(in);
}

CitationIngestResult attach_citations(std::span<const CitationEdge> raw, const CorpusStore& corpus) {
  CitationIngestResult result{corpus, {}};
  CitationIngestReport& report = result.report;
  report.raw = raw.size();

  std::unordered_set<std::string> seen;
  for (const CitationEdge& e : corpus.edges()) seen.insert(edge_key(e));
  seen.reserve(seen.size() + raw.size());

  std::size_t row = 0;
  for (const CitationEdge& edge : raw) {
    ++row;
    if (edge.sender_id == edge.receiver_id) {
      ++report.self_citations;
      report.rejects.push_back({row, "self-citation"});
    } else if (!corpus.contains(edge.sender_id) || !corpus.contains(edge.receiver_id)) {
      ++report.dangling;
      report.rejects.push_back({row, "dangling endpoint"});
    } else if (!seen.insert(edge_key(edge)).second) {
      ++report.duplicates;
      report.rejects.push_back({row, "duplicate edge"});
    } else {
      ++report.attached;
      result.corpus.add_edge_unchecked(edge);
    }
  }
  result.corpus.provenance().citation_rows = raw.size();
  return result;
}

CitationIngestResult ingest_citations(const std::filesystem::path& path, const CorpusStore& corpus) {
  const std::vector<CitationEdge> raw = read_citation_rows(path);
  CitationIngestResult result = attach_citations(raw, corpus);
  result.corpus.provenance().citations_sha256 = sha256_file(path);
  return result;
}

CorpusStore filter_utility(const CorpusStore& corpus, FilterReport* report) {
  CorpusStore out;
  out.provenance() = corpus.provenance();
  FilterReport local;
  for (const PatentRecord& p : corpus.patents()) {
    if (p.is_utility)
      out.add_patent(p);
    else
      ++local.patents_removed;
  }
  for (const CitationEdge& e : corpus.edges()) {
    if (out.contains(e.sender_id) && out.contains(e.receiver_id))
      out.add_edge_unchecked(e);
    else
      ++local.edges_removed;
  }
  if (report) *report = local;
  return out;
}

std::unordered_map<std::string, std::size_t> out_degrees(const CorpusStore& corpus) {
  std::unordered_map<std::string, std::size_t> degree;
  for (const CitationEdge& e : corpus.edges()) ++degree[e.sender_id];
  return degree;
}

void write_patents_csv(std::ostream& out, const CorpusStore& corpus) {
  csv::write_row(out, {std::begin(kPatentHeader), std::end(kPatentHeader)});
  for (const PatentRecord& p : corpus.patents()) {
    std::string codes;
    for (const ipc::IpcCode& code : p.ipc_codes) {
      if (!codes.empty()) codes.push_back(';');
      codes += code.canonical();
    }
    csv::write_row(out, {p.patent_id, format_iso_date(p.grant_date), p.abstract_text, codes,
                         std::string(to_string(p.assignee_kind)), p.assignee_id, p.is_utility ? "true" : "false"});
  }
}

void write_citations_csv(std::ostream& out, const CorpusStore& corpus) {
  out << "sender_id,receiver_id\n";
  for (const CitationEdge& e : corpus.edges()) csv::write_row(out, {e.sender_id, e.receiver_id});
}

void write_rejects_csv(std::ostream& out, std::span<const Reject> rejects) {
  out << "row_number,reason\n";
  for (const Reject& r : rejects) csv::write_row(out, {std::to_string(r.row_number), r.reason});
}

}  // namespace patsim
