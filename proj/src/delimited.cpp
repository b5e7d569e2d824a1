#include "violet/delimited.hpp"

#include <cctype>
#include <istream>
#include <ostream>

#include "violet/error.hpp"

namespace violet {

DelimitedReader::DelimitedReader(std::istream& in, char delimiter)
    : in_(in), delim_(delimiter) {}

bool DelimitedReader::next(std::vector<std::string>& fields) {
  fields.clear();
  if (in_.peek() == std::char_traits<char>::eof()) return false;
  row_line_ = line_;

  std::string field;
  bool quoted = false;
  bool field_started_quoted = false;
  for (;;) {
    int c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      if (quoted) {
        throw DataError("line " + std::to_string(row_line_) +
                        ": unterminated quoted field");
      }
      fields.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line_;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
    } else if (ch == delim_) {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
    } else if (ch == '\r' && in_.peek() == '\n') {
      // CRLF; the '\n' terminates the row on the next iteration.
    } else if (ch == '\n') {
      ++line_;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
  }
}

std::string quote_field(std::string_view field, char delimiter) {
  bool needs = field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) !=
               std::string_view::npos;
  if (!needs) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields,
               char delimiter) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << delimiter;
    out << quote_field(fields[i], delimiter);
  }
  out << '\n';
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    std::size_t pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace violet
