#include "patsim/ipc.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>

#include "patsim/corpus.hpp"

namespace patsim::ipc {

std::string_view level_name(Level level) {
  switch (level) {
    case Level::Section: return "section";
    case Level::Class: return "class";
    case Level::Subclass: return "subclass";
    case Level::MainGroup: return "maingroup";
    case Level::SubGroup: return "subgroup";
  }
  return "?";
}

Level parse_level(std::string_view name) {
  for (Level level : kAllLevels)
    if (level_name(level) == name) return level;
  throw ValidationError("unknown IPC level '" + std::string(name) + "'");
}

std::string IpcCode::key(Level level) const {
  char buf[32];
  switch (level) {
    case Level::Section:
      return std::string(1, section);
    case Level::Class:
      std::snprintf(buf, sizeof buf, "%c%02u", section, static_cast<unsigned>(class_num));
      return buf;
    case Level::Subclass:
      std::snprintf(buf, sizeof buf, "%c%02u%c", section, static_cast<unsigned>(class_num), subclass_letter);
      return buf;
    case Level::MainGroup:
      std::snprintf(buf, sizeof buf, "%c%02u%c %u/00", section, static_cast<unsigned>(class_num), subclass_letter,
                    main_group);
      return buf;
    case Level::SubGroup:
      std::snprintf(buf, sizeof buf, "%c%02u%c %u/%02u", section, static_cast<unsigned>(class_num),
                    subclass_letter, main_group, sub_group);
      return buf;
  }
  return {};
}

IpcCode parse_ipc(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch)))
      s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(ch))));

  auto fail = [&](const char* what) -> ParseError {
    return ParseError("ipc code '" + std::string(raw) + "': " + what);
  };
  auto is_digit = [](char c) { return c >= '0' && c <= '9'; };

  IpcCode code;
  std::size_t pos = 0;
  if (s.empty() || s[0] < 'A' || s[0] > 'H') throw fail("invalid section or missing group (section must be A-H)");
  code.section = s[pos++];
  if (pos + 2 > s.size() || !is_digit(s[pos]) || !is_digit(s[pos + 1]))
    throw fail("invalid class (expected two digits)");
  code.class_num = static_cast<std::uint8_t>((s[pos] - '0') * 10 + (s[pos + 1] - '0'));
  pos += 2;
  if (pos >= s.size()) throw fail("invalid section or missing group");
  if (s[pos] < 'A' || s[pos] > 'Z') throw fail("invalid subclass (expected a letter)");
  code.subclass_letter = s[pos++];
  if (pos >= s.size()) throw fail("invalid section or missing group");

  auto read_number = [&](const char* what) -> std::uint32_t {
    const std::size_t start = pos;
    std::uint64_t v = 0;
    while (pos < s.size() && is_digit(s[pos]) && pos - start < 9)
      v = v * 10 + static_cast<std::uint64_t>(s[pos++] - '0');
    if (pos == start || (pos < s.size() && is_digit(s[pos]))) throw fail(what);
    return static_cast<std::uint32_t>(v);
  };
  code.main_group = read_number("invalid main group (expected digits)");
  if (code.main_group == 0) throw fail("invalid main group (must be positive)");
  if (pos >= s.size() || s[pos] != '/') throw fail("invalid group separator (expected '/')");
  ++pos;
  code.sub_group = read_number("invalid sub group (expected digits)");
  if (pos != s.size()) throw fail("trailing characters after sub group");
  return code;
}

std::set<std::string> level_keys(std::span<const IpcCode> codes, Level level) {
  std::set<std::string> keys;
  for (const IpcCode& code : codes) keys.insert(code.key(level));
  return keys;
}

Overlap key_overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
  Overlap o;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++o.intersection;
      ++ia;
      ++ib;
    }
  }
  o.union_size = a.size() + b.size() - o.intersection;
  return o;
}

JaccardProfile jaccard_profile(std::span<const IpcCode> sender, std::span<const IpcCode> receiver) {
  JaccardProfile profile;
  profile.defined = !sender.empty() && !receiver.empty();
  for (Level level : kAllLevels) {
    const Overlap o = key_overlap(level_keys(sender, level), level_keys(receiver, level));
    profile.values[static_cast<std::size_t>(level)] = o.jaccard();
  }
  return profile;
}

JaccardProfile jaccard_profile(const PatentRecord& sender, const PatentRecord& receiver) {
  return jaccard_profile(sender.ipc_codes, receiver.ipc_codes);
}

std::vector<WithinLevelRow> within_level_citation_counts(const CorpusStore& corpus, Level level) {
  std::map<int, WithinLevelRow> by_year;
  for (const CitationEdge& edge : corpus.edges()) {
    const PatentRecord* sender = corpus.find(edge.sender_id);
    const PatentRecord* receiver = corpus.find(edge.receiver_id);
    if (!sender || !receiver) continue;
    const int year = year_of(sender->grant_date);
    WithinLevelRow& row = by_year[year];
    row.year = year;
    if (sender->ipc_codes.empty() || receiver->ipc_codes.empty()) {
      ++row.excluded;
      continue;
    }
    const Overlap o = key_overlap(level_keys(sender->ipc_codes, level), level_keys(receiver->ipc_codes, level));
    if (o.intersection > 0)
      ++row.within;
    else
      ++row.outside;
  }
  std::vector<WithinLevelRow> rows;
  rows.reserve(by_year.size());
  for (auto& [year, row] : by_year) rows.push_back(row);
  return rows;
}

}  // namespace patsim::ipc
