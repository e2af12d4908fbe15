#pragma once

#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace vqmorl {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Comma-separated writer with RFC 4180 quoting. Fields containing a comma,
/// quote, or line break are quoted and embedded quotes doubled.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void write_row(const std::vector<std::string>& fields);
  void write_row(std::initializer_list<std::string_view> fields);

 private:
  void write_field(std::string_view field);
  std::ostream& out_;
};

/// Minimal parser for the files CsvWriter produces. Returns rows of fields.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

}  // namespace vqmorl
