#pragma once

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace benchtopo::csv {

/// Shortest round-trip decimal representation of a double. Used for every
/// numeric cell we emit so that identical values always serialize to
/// identical bytes.
inline std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

/// Quote a field iff RFC 4180 requires it.
inline std::string escape(std::string_view field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os << ',';
    os << escape(fields[i]);
  }
  os << '\n';
}

/// Incremental RFC-4180 parser: comma separator, double-quote quoting,
/// "" escapes, LF or CRLF endings, quoted fields may embed newlines.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// `row()` reports the 1-based record number of the last record read.
  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == std::istream::traits_type::eof()) return false;
    ++row_;
    std::string field;
    bool quoted = false;
    for (;; c = in_.get()) {
      if (quoted) {
        if (c == std::istream::traits_type::eof())
          throw std::runtime_error("row " + std::to_string(row_) + ": unterminated quoted field");
        if (c == '"') {
          int peek = in_.peek();
          if (peek == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          field.push_back(char(c));
        }
        continue;
      }
      if (c == std::istream::traits_type::eof() || c == '\n') {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(std::move(field));
        return true;
      }
      if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else {
        field.push_back(char(c));
      }
    }
  }

  std::size_t row() const { return row_; }

 private:
  std::istream& in_;
  std::size_t row_ = 0;
};

}  // namespace benchtopo::csv
