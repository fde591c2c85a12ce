#ifndef PEDACCESS_AUXDATA_CSV_HPP
#define PEDACCESS_AUXDATA_CSV_HPP

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pedaccess/error.hpp"

namespace pedaccess::csv {

using Row = std::vector<std::string>;

/// Splits RFC 4180 text into records. Quoted fields may contain commas, quotes ("")
/// and newlines; CRLF and LF line ends are both accepted; a UTF-8 BOM is skipped.
inline std::vector<Row> parse(std::string_view text, const std::string& name = "<csv>") {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<Row> rows;
  Row row;
  std::string field;
  bool quoted = false, field_started = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) throw ParseError("stray quote on line " + std::to_string(line) + " of " + name);
        quoted = field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        if (field_started || !field.empty() || !row.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        field.clear();
        row.clear();
        field_started = false;
        ++line;
        break;
      default:
        field += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field in " + name);
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Header-addressed table.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Row> rows, const std::string& name = "<csv>") : name_(name) {
    if (rows.empty()) return;
    header_ = std::move(rows.front());
    for (auto& h : header_) {
      while (!h.empty() && (h.back() == ' ' || h.back() == '\t')) h.pop_back();
      while (!h.empty() && (h.front() == ' ' || h.front() == '\t')) h.erase(h.begin());
    }
    for (std::size_t i = 0; i < header_.size(); ++i) index_.emplace(header_[i], i);
    rows_.assign(std::make_move_iterator(rows.begin() + 1), std::make_move_iterator(rows.end()));
  }

  const Row& header() const { return header_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool has(const std::string& col) const { return index_.count(col) > 0; }

  std::optional<std::size_t> column(const std::string& col) const {
    auto it = index_.find(col);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require(const std::string& col) const {
    auto c = column(col);
    if (!c) throw ParseError("missing column '" + col + "' in " + name_);
    return *c;
  }
  /// Field of a row, or "" if the row is short.
  static std::string_view field(const Row& row, std::size_t col) {
    return col < row.size() ? std::string_view(row[col]) : std::string_view();
  }

 private:
  std::string name_;
  Row header_;
  std::map<std::string, std::size_t> index_;
  std::vector<Row> rows_;
};

inline Table read_table(std::string_view text, const std::string& name = "<csv>") { return Table(parse(text, name), name); }

inline Table read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_table(text, path);
}

inline std::optional<double> to_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<long long> to_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline void write_row(std::ostream& out, const Row& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out << ',';
    out << escape(row[i]);
  }
  out << '\n';
}

/// Shortest round-trip decimal form; empty for NaN (written as a missing value).
inline std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace pedaccess::csv

#endif  // PEDACCESS_AUXDATA_CSV_HPP
