#include <algorithm>
#include <cstdio>
#include <sstream>

#include "violet/relations.hpp"

namespace violet {

namespace {

std::string fixed3(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", x);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void heading(std::ostringstream& out, const std::string& title) {
  out << '\n' << title << '\n' << std::string(title.size(), '-') << '\n';
}

std::string label(const ReportInput& in, const std::string& token) {
  return in.catalog ? in.catalog->label_of(token) : token;
}

std::string join_ranked(const ReportInput& in, const std::vector<Ranked>& list) {
  std::string s;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) s += ", ";
    s += label(in, list[i].token);
  }
  return s;
}

void render_matrix(std::ostringstream& out, const ReportInput& in, const NamedMatrix& nm) {
  const SimilarityMatrix& m = nm.matrix;
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header{nm.corner};
  for (const auto& c : m.col_labels) header.push_back(label(in, c));
  cells.push_back(header);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::string> row{label(in, m.row_labels[r])};
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::string v = fixed3(m.at(r, c));
      const bool col_max = !m.col_max_row.empty() && m.col_max_row[c] == r;
      const bool row_max = !m.row_max_col.empty() && m.row_max_col[r] == c;
      if (col_max) v = "**" + v + "**";
      if (row_max) v = "_" + v + "_";
      row.push_back(v);
    }
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : cells) {
    out << "  ";
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i + 1 < row.size() ? pad(row[i], width[i] + 2) : row[i]);
    }
    out << '\n';
  }
  out << "  _x_ = largest value in its row; **x** = largest value in its column\n";
}

}  // namespace

std::string render_report(const ReportInput& in) {
  std::ostringstream out;
  out << "Violation keyword analysis\n==========================\n";
  out << "upper quartile: 75th percentile, linear interpolation, " << to_string(in.scope)
      << " scope\n";
  out << "chain list length k: " << in.k << '\n';

  if (in.stats) {
    const ViolationStats& s = *in.stats;
    heading(out, "Violation types");
    for (const auto& [type, count] : s.count_by_type) {
      out << "  " << pad(to_string(type), 32) << count << '\n';
    }
    out << "  " << pad("total records", 32) << s.total_records << '\n';
    out << "  " << pad("violations with comments", 32) << s.selected_records << '\n';

    heading(out, "Violations per year");
    if (s.count_by_year.empty()) out << "  (none)\n";
    for (const auto& [year, count] : s.count_by_year) {
      out << "  " << year << "  " << count << '\n';
    }

    heading(out, "Most frequent violations");
    if (s.top_codes.empty()) out << "  (none)\n";
    for (std::size_t i = 0; i < s.top_codes.size(); ++i) {
      out << "  (" << i + 1 << ") \"" << s.top_codes[i].description << "\" ("
          << s.top_codes[i].count << " occurrences)\n";
    }
  }

  if (!in.top_words.empty() || in.unique_tokens > 0) {
    heading(out, "Most frequent words");
    if (in.unique_tokens > 0) out << "  unique tokens: " << in.unique_tokens << '\n';
    for (std::size_t i = 0; i < in.top_words.size(); ++i) {
      out << "  " << pad(std::to_string(i + 1) + ".", 5) << pad(in.top_words[i].token, 20)
          << in.top_words[i].count << '\n';
    }
  }

  if (in.catalog) {
    heading(out, "Keyword categories");
    for (KeywordCategory c : kAllCategories) {
      out << "  " << pad(to_string(c), 13);
      const auto& list = in.catalog->category(c);
      if (list.empty()) out << "(empty)";
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out << ", ";
        out << "('" << list[i].label << "', " << list[i].frequency << ")";
      }
      out << '\n';
    }
    if (!in.rejections.empty()) {
      out << "  rejected:\n";
      for (const auto& r : in.rejections) {
        out << "    " << to_string(r.category) << " '" << r.label << "'";
        if (r.token != r.label) out << " [" << r.token << "]";
        out << ": " << r.reason << '\n';
      }
    }
  }

  for (const auto& nm : in.matrices) {
    heading(out, nm.title);
    render_matrix(out, in, nm);
  }

  heading(out, "Location -> Operation -> Contaminant");
  if (in.chains.empty()) {
    out << "  No relations above quartile.\n";
  } else {
    for (const auto& chain : in.chains) {
      out << "  " << label(in, chain.location) << "  [" << join_ranked(in, chain.contaminants)
          << "]\n";
      for (const auto& op : chain.operations) {
        out << "    -> " << pad(label(in, op.operation), 12) << "[" << join_ranked(in, op.contaminants)
            << "]\n";
      }
    }
  }
  return out.str();
}

}  // namespace violet
