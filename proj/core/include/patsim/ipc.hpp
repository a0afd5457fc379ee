#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "patsim/error.hpp"

namespace patsim {
class CorpusStore;
struct PatentRecord;
}  // namespace patsim

namespace patsim::ipc {

/// The five nested levels of the International Patent Classification.
enum class Level { Section, Class, Subclass, MainGroup, SubGroup };

inline constexpr std::array<Level, 5> kAllLevels = {
    Level::Section, Level::Class, Level::Subclass, Level::MainGroup, Level::SubGroup};

std::string_view level_name(Level level);
Level parse_level(std::string_view name);

class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// One IPC symbol such as `A01C 3/04`.
struct IpcCode {
  char section = 'A';         // A-H
  std::uint8_t class_num = 0; // 00-99
  char subclass_letter = 'A';
  std::uint32_t main_group = 1;
  std::uint32_t sub_group = 0;

  /// Key identifying the code at `level`, e.g. "A01C 3/00" at MainGroup.
  /// Keys are prefix-consistent across levels.
  std::string key(Level level) const;

  /// Canonical sub-group form, e.g. "A01C 3/04".
  std::string canonical() const { return key(Level::SubGroup); }

  auto operator<=>(const IpcCode&) const = default;
};

/// Accepts any internal whitespace ("A01C3/04", "A01C  3 / 04") and lower case.
/// Throws ParseError naming the failing component.
IpcCode parse_ipc(std::string_view raw);

/// Distinct keys of `codes` at `level`.
std::set<std::string> level_keys(std::span<const IpcCode> codes, Level level);

/// Exact |A∩B| and |A∪B| of one level's key sets.
struct Overlap {
  std::size_t intersection = 0;
  std::size_t union_size = 0;
  double jaccard() const {
    return union_size == 0 ? 0.0
                           : static_cast<double>(intersection) / static_cast<double>(union_size);
  }
};

Overlap key_overlap(const std::set<std::string>& a, const std::set<std::string>& b);

/// Per-level Jaccard indices between two patents' IPC code sets.
struct JaccardProfile {
  std::array<double, 5> values{};  // indexed by Level
  bool defined = false;            // false iff either patent has no codes

  double at(Level level) const { return values[static_cast<std::size_t>(level)]; }
};

JaccardProfile jaccard_profile(std::span<const IpcCode> sender, std::span<const IpcCode> receiver);
JaccardProfile jaccard_profile(const PatentRecord& sender, const PatentRecord& receiver);

/// Citation counts inside/outside a shared IPC key, by sender grant year.
struct WithinLevelRow {
  int year = 0;
  std::size_t within = 0;
  std::size_t outside = 0;
  std::size_t excluded = 0;  // either side without IPC codes
};

std::vector<WithinLevelRow> within_level_citation_counts(const CorpusStore& corpus, Level level);

}  // namespace patsim::ipc
