#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace patsim::csv {

/// RFC-4180 record reader: quoted fields may contain commas, doubled quotes
/// and line breaks. Accepts both LF and CRLF record terminators.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record; false at end of input.
  bool next(std::vector<std::string>& fields);

  /// 1-based index of the record most recently returned.
  std::size_t record_number() const { return records_; }

 private:
  std::istream& in_;
  std::size_t records_ = 0;
};

/// Quotes a field only when it needs it.
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

/// Full-string parse; throws ValidationError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_int(std::string_view text, std::string_view what);

}  // namespace patsim::csv
