#include "patsim/csv.hpp"

#include <charconv>
#include <cmath>
#include <iterator>
#include <system_error>

#include "patsim/error.hpp"

namespace patsim::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::streambuf* buf = in_.rdbuf();
  using Traits = std::streambuf::traits_type;

  int c = buf->sgetc();
  if (c == Traits::eof()) return false;

  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (;;) {
    c = buf->sbumpc();
    if (c == Traits::eof()) {
      if (quoted) throw ValidationError("csv: unterminated quoted field in record " + std::to_string(records_ + 1));
      fields.push_back(std::move(field));
      break;
    }
    const char ch = Traits::to_char_type(c);
    if (quoted) {
      if (ch == '"') {
        if (buf->sgetc() == '"') {
          buf->sbumpc();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      break;
    } else if (ch == '\r') {
      if (buf->sgetc() == '\n') buf->sbumpc();
      fields.push_back(std::move(field));
      break;
    } else {
      field.push_back(ch);
      field_started = true;
    }
  }
  ++records_;
  return true;
}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.put(',');
    out << escape(fields[i]);
  }
  out.put('\n');
}

std::string format_double(double value) {
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (text.empty() || ec != std::errc{} || ptr != last || !std::isfinite(value))
    throw ValidationError(std::string(what) + ": not a finite number: '" + std::string(text) + "'");
  return value;
}

long long parse_int(std::string_view text, std::string_view what) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size())
    throw ValidationError(std::string(what) + ": not an integer: '" + std::string(text) + "'");
  return value;
}

}  // namespace patsim::csv
