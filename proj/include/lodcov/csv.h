#ifndef LODCOV_CSV_H_
#define LODCOV_CSV_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lodcov {

// A character-separated table with a mandatory header row. The delimiter is
// a tab when the header line contains one, otherwise a comma. Quoted fields
// follow RFC 4180 (doubled quotes, embedded delimiters and newlines).
class Table {
 public:
  static Table parse(std::string_view text);
  static Table read_file(const std::string &path);

  const std::vector<std::string> &header() const { return header_; }
  const std::vector<std::vector<std::string>> &rows() const { return rows_; }
  char delimiter() const { return delimiter_; }

  // Case-insensitive header lookup.
  std::optional<std::size_t> column(std::string_view name) const;

  // Like column(), but raises a schema error naming the column (and the
  // source, when known) if it is absent.
  std::size_t require_column(std::string_view name) const;

  void set_source(std::string source) { source_ = std::move(source); }
  const std::string &source() const { return source_; }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
  char delimiter_ = ',';
  std::string source_;
};

// Quotes a field for comma-separated output when needed.
std::string csv_escape(std::string_view field);

// Parses a non-negative decimal integer; rejects signs, blanks and garbage.
std::optional<unsigned long long> parse_count(std::string_view text);

std::string trim(std::string_view text);
std::string to_lower(std::string_view text);
std::vector<std::string> split(std::string_view text, char sep);

// Fixed float formatting used by every CSV/JSON emitter: 9 significant
// digits, '.' decimal separator regardless of locale.
std::string format_real(double value);

}  // namespace lodcov

#endif  // LODCOV_CSV_H_
