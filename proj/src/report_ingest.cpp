#include "violet/report_ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "violet/delimited.hpp"
#include "violet/error.hpp"

namespace violet {

namespace chr = std::chrono;

const char* to_string(ViolationType type) {
  switch (type) {
    case ViolationType::None: return "None";
    case ViolationType::Administrative: return "Administrative";
    case ViolationType::EnvironmentalHealthSafety: return "Environmental Health & Safety";
  }
  return "?";
}

const char* key_name(ViolationType type) {
  switch (type) {
    case ViolationType::None: return "none";
    case ViolationType::Administrative: return "administrative";
    case ViolationType::EnvironmentalHealthSafety: return "ehs";
  }
  return "?";
}

std::optional<ViolationType> parse_type_key(std::string_view key) {
  std::string k = to_lower(trim(key));
  for (ViolationType t : kAllViolationTypes) {
    if (k == key_name(t)) return t;
  }
  return std::nullopt;
}

std::map<std::string, ViolationType> ColumnMap::default_aliases() {
  return {{"none", ViolationType::None},
          {"administrative", ViolationType::Administrative},
          {"environmental health & safety", ViolationType::EnvironmentalHealthSafety}};
}

void ColumnMap::validate() const {
  std::vector<std::pair<const char*, const std::string*>> fields = {
      {"record_id", &record_id},
      {"inspection_date", &inspection_date},
      {"violation_type", &violation_type},
      {"violation_code", &violation_code},
      {"violation_description", &violation_description},
      {"inspection_comment", &inspection_comment}};
  std::map<std::string, const char*> seen;
  for (auto [name, column] : fields) {
    if (column->empty()) {
      if (std::string_view(name) == "record_id") continue;
      throw UsageError(std::string("column map: no source column for ") + name);
    }
    auto [it, inserted] = seen.emplace(*column, name);
    if (!inserted) {
      throw UsageError("column map: '" + *column + "' is mapped to both " +
                       it->second + " and " + name);
    }
  }
}

namespace {

// Reads 1..max_digits decimal digits.
bool read_number(std::string_view text, std::size_t& pos, int max_digits, int& value) {
  int digits = 0;
  value = 0;
  while (pos < text.size() && digits < max_digits &&
         text[pos] >= '0' && text[pos] <= '9') {
    value = value * 10 + (text[pos] - '0');
    ++pos;
    ++digits;
  }
  return digits > 0;
}

void append_padded(std::string& out, int value, int width) {
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width) {
    out.append(width - digits.size(), '0');
  }
  out += digits;
}

}  // namespace

std::optional<chr::year_month_day> parse_date(std::string_view text,
                                              std::string_view format) {
  text = trim(text);
  int year = -1, month = -1, day = -1;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < format.size(); ++i) {
    char f = format[i];
    if (f == '%' && i + 1 < format.size()) {
      char spec = format[++i];
      bool ok = true;
      switch (spec) {
        case 'Y': ok = read_number(text, pos, 4, year); break;
        case 'm': ok = read_number(text, pos, 2, month); break;
        case 'd': ok = read_number(text, pos, 2, day); break;
        case '%': ok = pos < text.size() && text[pos++] == '%'; break;
        default: return std::nullopt;
      }
      if (!ok) return std::nullopt;
    } else {
      if (pos >= text.size() || text[pos] != f) return std::nullopt;
      ++pos;
    }
  }
  if (pos != text.size() || year < 0 || month < 0 || day < 0) return std::nullopt;
  chr::year_month_day date{chr::year{year}, chr::month{static_cast<unsigned>(month)},
                           chr::day{static_cast<unsigned>(day)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_date(const chr::year_month_day& date, std::string_view format) {
  std::string out;
  for (std::size_t i = 0; i < format.size(); ++i) {
    if (format[i] == '%' && i + 1 < format.size()) {
      switch (format[++i]) {
        case 'Y': append_padded(out, static_cast<int>(date.year()), 4); break;
        case 'm': append_padded(out, static_cast<int>(static_cast<unsigned>(date.month())), 2); break;
        case 'd': append_padded(out, static_cast<int>(static_cast<unsigned>(date.day())), 2); break;
        default: out.push_back(format[i]); break;
      }
    } else {
      out.push_back(format[i]);
    }
  }
  return out;
}

ParseResult parse_report(std::istream& in, const ColumnMap& map,
                         const ParseOptions& options) {
  map.validate();
  DelimitedReader reader(in, options.delimiter);
  std::vector<std::string> row;
  if (!reader.next(row)) {
    throw DataError("report has no header row");
  }

  std::unordered_map<std::string, std::size_t> header;
  for (std::size_t i = 0; i < row.size(); ++i) {
    header.emplace(std::string(trim(row[i])), i);
  }
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    if (name.empty()) return std::nullopt;
    auto it = header.find(name);
    if (it == header.end()) throw DataError("missing header column '" + name + "'");
    return it->second;
  };
  const auto id_col = column(map.record_id);
  const std::size_t date_col = *column(map.inspection_date);
  const std::size_t type_col = *column(map.violation_type);
  const std::size_t code_col = *column(map.violation_code);
  const std::size_t desc_col = *column(map.violation_description);
  const std::size_t comment_col = *column(map.inspection_comment);

  std::map<std::string, ViolationType> aliases;
  for (const auto& [alias, type] : map.type_aliases) {
    aliases.emplace(to_lower(trim(alias)), type);
  }

  ParseResult result;
  std::size_t data_row = 0;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    ++data_row;
    const std::size_t line = reader.line();
    // Short rows are tolerated; absent cells read as empty.
    auto field = [&](std::size_t col) -> std::string {
      return col < row.size() ? row[col] : std::string();
    };

    ComplianceRecord rec;
    rec.record_id = id_col ? field(*id_col) : "row-" + std::to_string(data_row);

    const std::string type_text = field(type_col);
    auto alias = aliases.find(to_lower(trim(type_text)));
    if (alias == aliases.end()) {
      result.errors.push_back({line, "unknown violation type '" + type_text + "'"});
      continue;
    }
    rec.violation_type = alias->second;

    const std::string date_text = field(date_col);
    if (!trim(date_text).empty()) {
      rec.inspection_date = parse_date(date_text, options.date_format);
      if (!rec.inspection_date) {
        result.errors.push_back({line, "unparseable date '" + date_text + "'"});
        continue;
      }
    }
    rec.violation_code = field(code_col);
    rec.violation_description = field(desc_col);
    rec.inspection_comment = field(comment_col);
    result.records.push_back(std::move(rec));
  }
  return result;
}

void write_report(std::ostream& out, const std::vector<ComplianceRecord>& records,
                  const ColumnMap& map, const ParseOptions& options) {
  map.validate();
  const char d = options.delimiter;
  std::vector<std::string> header;
  if (!map.record_id.empty()) header.push_back(map.record_id);
  header.insert(header.end(), {map.inspection_date, map.violation_type, map.violation_code,
                               map.violation_description, map.inspection_comment});
  write_row(out, header, d);
  for (const auto& rec : records) {
    std::vector<std::string> row;
    if (!map.record_id.empty()) row.push_back(rec.record_id);
    row.push_back(rec.inspection_date ? format_date(*rec.inspection_date, options.date_format)
                                      : std::string());
    row.push_back(to_string(rec.violation_type));
    row.push_back(rec.violation_code);
    row.push_back(rec.violation_description);
    row.push_back(rec.inspection_comment);
    write_row(out, row, d);
  }
}

bool has_comment(const ComplianceRecord& record) {
  return !trim(record.inspection_comment).empty();
}

std::vector<ComplianceRecord> filter_records(const std::vector<ComplianceRecord>& records,
                                             ViolationType type, bool require_comment) {
  std::vector<ComplianceRecord> out;
  for (const auto& rec : records) {
    if (rec.violation_type != type) continue;
    if (require_comment && !has_comment(rec)) continue;
    out.push_back(rec);
  }
  return out;
}

std::vector<CodeCount> top_violation_codes(const std::vector<ComplianceRecord>& records,
                                           std::size_t n) {
  std::map<std::string, std::size_t> counts;
  for (const auto& rec : records) {
    if (rec.violation_type == ViolationType::None) continue;
    if (rec.violation_description.empty()) continue;
    ++counts[rec.violation_description];
  }
  std::vector<CodeCount> ranked;
  ranked.reserve(counts.size());
  for (auto& [desc, count] : counts) ranked.push_back({desc, count});
  // std::map iteration is already lexicographic, so a stable sort on count
  // gives the documented tie-break.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const CodeCount& a, const CodeCount& b) { return a.count > b.count; });
  if (ranked.size() > n) ranked.resize(n);
  return ranked;
}

ViolationStats compute_stats(const std::vector<ComplianceRecord>& records,
                             std::size_t top_n) {
  ViolationStats stats;
  for (ViolationType t : kAllViolationTypes) stats.count_by_type[t] = 0;
  for (const auto& rec : records) {
    ++stats.count_by_type[rec.violation_type];
    if (rec.violation_type == ViolationType::None) continue;
    if (rec.inspection_date) {
      ++stats.count_by_year[static_cast<int>(rec.inspection_date->year())];
    }
    if (has_comment(rec)) ++stats.selected_records;
  }
  stats.total_records = records.size();
  stats.top_codes = top_violation_codes(records, top_n);
  return stats;
}

void write_stats_delimited(std::ostream& out, const ViolationStats& stats, char d) {
  write_row(out, {"# violation_type"}, d);
  write_row(out, {"violation_type", "count"}, d);
  for (const auto& [type, count] : stats.count_by_type) {
    write_row(out, {to_string(type), std::to_string(count)}, d);
  }
  out << '\n';
  write_row(out, {"# violations_by_year"}, d);
  write_row(out, {"year", "count"}, d);
  for (const auto& [year, count] : stats.count_by_year) {
    write_row(out, {std::to_string(year), std::to_string(count)}, d);
  }
  out << '\n';
  write_row(out, {"# top_violations"}, d);
  write_row(out, {"rank", "violation_description", "count"}, d);
  for (std::size_t i = 0; i < stats.top_codes.size(); ++i) {
    write_row(out, {std::to_string(i + 1), stats.top_codes[i].description,
                    std::to_string(stats.top_codes[i].count)}, d);
  }
  out << '\n';
  write_row(out, {"# totals"}, d);
  write_row(out, {"total_records", "selected_records"}, d);
  write_row(out, {std::to_string(stats.total_records), std::to_string(stats.selected_records)}, d);
}

void write_stats_json(std::ostream& out, const ViolationStats& stats) {
  nlohmann::ordered_json doc;
  nlohmann::ordered_json by_type = nlohmann::ordered_json::object();
  for (const auto& [type, count] : stats.count_by_type) by_type[to_string(type)] = count;
  nlohmann::ordered_json by_year = nlohmann::ordered_json::object();
  for (const auto& [year, count] : stats.count_by_year) by_year[std::to_string(year)] = count;
  nlohmann::ordered_json top = nlohmann::ordered_json::array();
  for (const auto& c : stats.top_codes) {
    top.push_back({{"description", c.description}, {"count", c.count}});
  }
  doc["total_records"] = stats.total_records;
  doc["selected_records"] = stats.selected_records;
  doc["count_by_type"] = std::move(by_type);
  doc["count_by_year"] = std::move(by_year);
  doc["top_codes"] = std::move(top);
  out << doc.dump(2) << '\n';
}

}  // namespace violet
