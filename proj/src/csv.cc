#include "lodcov/csv.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "lodcov/error.h"

namespace lodcov {

const char *error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return "io";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kDuplicateKey: return "duplicate-key";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kArgument: return "argument";
    case ErrorKind::kTransport: return "transport";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kIncompatibleSnapshot: return "incompatible-snapshot";
    case ErrorKind::kEmptyMatrix: return "empty-matrix";
    case ErrorKind::kInsufficientData: return "insufficient-data";
    case ErrorKind::kUndefinedMetric: return "undefined-metric";
    case ErrorKind::kDegenerateFit: return "degenerate-fit";
    case ErrorKind::kEmptyIntersection: return "empty-intersection";
  }
  return "unknown";
}

namespace {

std::vector<std::vector<std::string>> parse_records(std::string_view text,
                                                    char delim) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  bool line_has_content = false;

  auto end_field = [&]() {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&]() {
    end_field();
    // Blank lines are skipped.
    if (line_has_content) records.push_back(std::move(record));
    record.clear();
    line_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
      line_has_content = true;
    } else if (c == delim) {
      end_field();
      line_has_content = true;
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      end_record();
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
      line_has_content = true;
    }
  }
  if (in_quotes) {
    throw Error(ErrorKind::kParse, "unterminated quoted field");
  }
  if (line_has_content || !field.empty()) end_record();
  return records;
}

}  // namespace

Table Table::parse(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  Table table;
  std::string_view first_line = text.substr(0, text.find('\n'));
  table.delimiter_ = first_line.find('\t') != std::string_view::npos ? '\t' : ',';

  auto records = parse_records(text, table.delimiter_);
  if (records.empty()) {
    throw Error(ErrorKind::kSchema, "missing header row");
  }
  table.header_ = std::move(records.front());
  for (auto &h : table.header_) h = trim(h);
  for (std::size_t i = 1; i < records.size(); ++i) {
    auto &row = records[i];
    if (row.size() > table.header_.size()) {
      throw Error(ErrorKind::kSchema,
                  "row " + std::to_string(i) + " has " +
                      std::to_string(row.size()) + " fields, header has " +
                      std::to_string(table.header_.size()));
    }
    row.resize(table.header_.size());
    table.rows_.push_back(std::move(row));
  }
  return table;
}

Table Table::read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  Table table;
  try {
    table = parse(buffer.str());
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
  table.source_ = path;
  return table;
}

std::optional<std::size_t> Table::column(std::string_view name) const {
  std::string wanted = to_lower(name);
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (to_lower(header_[i]) == wanted) return i;
  }
  return std::nullopt;
}

std::size_t Table::require_column(std::string_view name) const {
  if (auto idx = column(name)) return *idx;
  std::string msg = "missing required column '" + std::string(name) + "'";
  if (!source_.empty()) msg += " in " + source_;
  throw Error(ErrorKind::kSchema, msg);
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(field);
  }
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::optional<unsigned long long> parse_count(std::string_view text) {
  std::string t = trim(text);
  if (t.empty()) return std::nullopt;
  unsigned long long value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) return std::nullopt;
  return value;
}

std::string trim(std::string_view text) {
  auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return std::string(text);
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string format_real(double value) {
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace lodcov
