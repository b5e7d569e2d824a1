#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "violet/relations.hpp"
#include "violet/report_ingest.hpp"
#include "violet/skipgram.hpp"
#include "violet/text_preprocess.hpp"

namespace violet {

struct ConfigKey {
  std::string key;
  std::string default_value;
  std::string help;
  bool is_path = false;
};

// Every recognised key with its default, in help order.
const std::vector<ConfigKey>& config_keys();

using ConfigValues = std::map<std::string, std::string>;

// "key=value" lines; '#' comment lines and blank lines are ignored. Relative
// paths in path-valued keys are resolved against `base_dir`. Unknown keys
// throw UsageError.
ConfigValues parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ConfigValues read_config_file(const std::filesystem::path& file);

struct PipelineConfig {
  std::vector<std::filesystem::path> input_paths;
  ColumnMap columns;
  ParseOptions parse;
  ViolationType filter_type = ViolationType::EnvironmentalHealthSafety;
  bool require_comment = true;
  std::size_t stats_top_n = 5;

  PreprocessConfig preprocess;
  std::uint64_t min_count = 1;
  TrainingConfig training;

  std::filesystem::path catalog;  // empty = bundled catalog
  std::uint64_t threshold = 30;
  std::size_t k = 3;
  QuartileScope scope = QuartileScope::PerRow;
  VectorSource vectors = VectorSource::Input;
  std::filesystem::path model;  // defaults to <out>/model.vec
  std::filesystem::path vocab;  // defaults to <out>/vocab.tsv
  std::size_t top_words = 20;

  std::filesystem::path output_dir = "out";

  // Builds typed settings on top of the defaults. Throws UsageError for
  // malformed values or invariant violations of nested configs.
  static PipelineConfig from_values(const ConfigValues& values);
};

// File names written under the output directory.
namespace artifacts {
inline constexpr const char* kStatsCsv = "stats.csv";
inline constexpr const char* kStatsJson = "stats.json";
inline constexpr const char* kParseErrors = "parse_errors.tsv";
inline constexpr const char* kVocab = "vocab.tsv";
inline constexpr const char* kModel = "model.vec";
inline constexpr const char* kContextModel = "model.ctx.vec";
inline constexpr const char* kTrainLog = "train.log";
inline constexpr const char* kKeywords = "keywords.tsv";
inline constexpr const char* kRejections = "keyword_rejections.tsv";
inline constexpr const char* kLocCont = "sim_location_contaminant.tsv";
inline constexpr const char* kOpCont = "sim_operation_contaminant.tsv";
inline constexpr const char* kLocOp = "sim_location_operation.tsv";
inline constexpr const char* kChains = "chains.tsv";
inline constexpr const char* kReport = "report.txt";
}  // namespace artifacts

// Each command validates the configuration before writing anything and
// returns 0 on success, 1 for usage/config errors, 2 for data errors and 3
// for internal invariant violations; diagnostics go to `err`.
int cmd_stats(const PipelineConfig& config, std::ostream& err);
int cmd_train(const PipelineConfig& config, std::ostream& err);
int cmd_analyze(const PipelineConfig& config, std::ostream& err);
int cmd_report(const PipelineConfig& config, std::ostream& err);

// Loads and filters every input file, then preprocesses the comments.
std::vector<ComplianceRecord> load_records(const PipelineConfig& config, std::ostream& err,
                                           std::vector<RowError>* errors = nullptr);
std::vector<TokenStream> build_corpus(const PipelineConfig& config,
                                      const std::vector<ComplianceRecord>& records);

}  // namespace violet
