#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace violet {

enum class ViolationType { None, Administrative, EnvironmentalHealthSafety };

inline constexpr ViolationType kAllViolationTypes[] = {
    ViolationType::None, ViolationType::Administrative,
    ViolationType::EnvironmentalHealthSafety};

// Canonical display name ("None", "Administrative",
// "Environmental Health & Safety").
const char* to_string(ViolationType type);
// Short config name ("none", "administrative", "ehs").
const char* key_name(ViolationType type);
std::optional<ViolationType> parse_type_key(std::string_view key);

struct ComplianceRecord {
  std::string record_id;
  std::optional<std::chrono::year_month_day> inspection_date;
  ViolationType violation_type = ViolationType::None;
  std::string violation_code;
  std::string violation_description;
  std::string inspection_comment;

  bool operator==(const ComplianceRecord&) const = default;
};

// Source column names for each logical field plus the value aliases used to
// translate violation-type strings. An empty record_id column means ids are
// synthesized from the data row number.
struct ColumnMap {
  std::string record_id;
  std::string inspection_date = "INSPECTION_DATE";
  std::string violation_type = "VIOLATION_TYPE";
  std::string violation_code = "VIOLATION_CODE";
  std::string violation_description = "VIOLATION_DESCRIPTION";
  std::string inspection_comment = "INSPECTION_COMMENT";

  // Matched case-insensitively after trimming.
  std::map<std::string, ViolationType> type_aliases = default_aliases();

  // Throws UsageError if two logical fields share a source column.
  void validate() const;

  static std::map<std::string, ViolationType> default_aliases();
};

struct ParseOptions {
  char delimiter = ',';
  // Supports %Y, %m, %d and %% plus literal characters.
  std::string date_format = "%Y-%m-%d";
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

struct ParseResult {
  std::vector<ComplianceRecord> records;
  std::vector<RowError> errors;
};

// Parses a delimited export. A missing mapped column throws DataError naming
// the column; bad rows are collected in `errors` and skipped.
ParseResult parse_report(std::istream& in, const ColumnMap& map,
                         const ParseOptions& options = {});

// Writes records back out with a header built from `map`.
void write_report(std::ostream& out, const std::vector<ComplianceRecord>& records,
                  const ColumnMap& map, const ParseOptions& options = {});

std::optional<std::chrono::year_month_day> parse_date(std::string_view text,
                                                      std::string_view format);
std::string format_date(const std::chrono::year_month_day& date,
                        std::string_view format);

std::vector<ComplianceRecord> filter_records(
    const std::vector<ComplianceRecord>& records, ViolationType type,
    bool require_comment);

bool has_comment(const ComplianceRecord& record);

struct CodeCount {
  std::string description;
  std::size_t count = 0;
  bool operator==(const CodeCount&) const = default;
};

struct ViolationStats {
  std::map<ViolationType, std::size_t> count_by_type;
  // Violations (non-None records) per inspection year.
  std::map<int, std::size_t> count_by_year;
  std::vector<CodeCount> top_codes;
  std::size_t total_records = 0;
  // Violations (non-None) with a non-blank comment.
  std::size_t selected_records = 0;
};

ViolationStats compute_stats(const std::vector<ComplianceRecord>& records,
                             std::size_t top_n = 5);

// Most frequent violation descriptions among non-None records; ties are broken
// lexicographically. Records with an empty description are not counted.
std::vector<CodeCount> top_violation_codes(
    const std::vector<ComplianceRecord>& records, std::size_t n);

// One section per statistic, header row per section.
void write_stats_delimited(std::ostream& out, const ViolationStats& stats,
                           char delimiter = ',');
void write_stats_json(std::ostream& out, const ViolationStats& stats);

}  // namespace violet
