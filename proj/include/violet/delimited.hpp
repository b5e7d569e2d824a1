#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace violet {

// Reader for comma/tab separated text. Quoted fields may contain the
// delimiter, line breaks and doubled quotes.
class DelimitedReader {
 public:
  DelimitedReader(std::istream& in, char delimiter);

  // Returns false at end of input. `line()` afterwards holds the 1-based
  // line number on which the returned row started.
  bool next(std::vector<std::string>& fields);
  std::size_t line() const noexcept { return row_line_; }

 private:
  std::istream& in_;
  char delim_;
  std::size_t line_ = 1;
  std::size_t row_line_ = 0;
};

// Quotes a field only when it needs it.
std::string quote_field(std::string_view field, char delimiter);
void write_row(std::ostream& out, const std::vector<std::string>& fields,
               char delimiter);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace violet
