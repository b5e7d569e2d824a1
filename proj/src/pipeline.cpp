#include "violet/pipeline.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "violet/delimited.hpp"
#include "violet/error.hpp"
#include "violet/resources.hpp"
#include "violet/similarity.hpp"
#include "violet/vocabulary.hpp"

namespace fs = std::filesystem;

namespace violet {

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"seed", "1", "random seed for every stochastic step"},
      {"output.dir", "out", "directory receiving all artifacts", true},
      {"input.paths", "", "comma-separated compliance report exports", true},
      {"input.delimiter", "comma", "field delimiter: comma or tab"},
      {"input.date_format", "%Y-%m-%d", "inspection date format (%Y %m %d)"},
      {"columns.record_id", "", "record id column (empty: use row numbers)"},
      {"columns.inspection_date", "INSPECTION_DATE", "inspection date column"},
      {"columns.violation_type", "VIOLATION_TYPE", "violation type column"},
      {"columns.violation_code", "VIOLATION_CODE", "violation code column"},
      {"columns.violation_description", "VIOLATION_DESCRIPTION", "violation description column"},
      {"columns.inspection_comment", "INSPECTION_COMMENT", "inspection comment column"},
      {"types.none", "None", "'|'-separated source strings meaning no violation"},
      {"types.administrative", "Administrative", "'|'-separated strings for administrative violations"},
      {"types.ehs", "Environmental Health & Safety", "'|'-separated strings for EHS violations"},
      {"filter.type", "ehs", "violation type used for the corpus: none, administrative, ehs"},
      {"filter.require_comment", "true", "drop records with a blank comment"},
      {"stats.top_n", "5", "number of most frequent violations listed"},
      {"preprocess.stopwords", "bundled", "stopword list file, one word per line", true},
      {"preprocess.lemma_lexicon", "bundled", "lemma exceptions file, surface<TAB>lemma", true},
      {"preprocess.remove_stopwords", "true", "enable stopword removal"},
      {"preprocess.lemmatize", "true", "enable lemmatization"},
      {"preprocess.stem", "true", "enable Porter stemming"},
      {"preprocess.order", "lemmatize_first", "lemmatize_first or stem_first"},
      {"preprocess.keep_numbers", "true", "keep all-digit tokens"},
      {"preprocess.punctuation", "ascii", "characters stripped from text ('ascii' = ASCII punctuation)"},
      {"vocab.min_count", "1", "minimum token frequency kept in the vocabulary"},
      {"train.dimension", "100", "embedding dimension"},
      {"train.window", "5", "maximum context window radius"},
      {"train.epochs", "5", "passes over the corpus"},
      {"train.learning_rate", "0.025", "initial learning rate"},
      {"train.min_learning_rate", "0", "final learning rate (0: 1e-4 x initial)"},
      {"train.objective", "negative_sampling", "negative_sampling or full_softmax"},
      {"train.negatives", "5", "noise samples per pair"},
      {"train.subsample", "0", "frequent-word subsampling threshold (0: off)"},
      {"train.dynamic_window", "true", "draw the window radius uniformly per position"},
      {"train.shuffle", "false", "shuffle comment order each epoch"},
      {"train.log_interval", "0", "progress line every N pairs (0: per epoch)"},
      {"analyze.catalog", "bundled", "keyword catalog file, category<TAB>keyword", true},
      {"analyze.threshold", "30", "keywords need a frequency strictly above this"},
      {"analyze.k", "3", "entries kept per relation list"},
      {"analyze.quartile_scope", "row", "row or global upper-quartile threshold"},
      {"analyze.vectors", "input", "input or mean (average of input and output vectors)"},
      {"analyze.model", "", "model file (default: <output.dir>/model.vec)", true},
      {"analyze.vocab", "", "vocabulary file (default: <output.dir>/vocab.tsv)", true},
      {"analyze.top_words", "20", "number of most frequent words in the report"},
  };
  return keys;
}

namespace {

const ConfigKey* find_key(const std::string& key) {
  for (const auto& k : config_keys()) {
    if (k.key == key) return &k;
  }
  return nullptr;
}

std::string resolve_path(const std::string& value, const fs::path& base) {
  if (value.empty() || value == "bundled" || base.empty()) return value;
  fs::path p(value);
  return p.is_absolute() ? value : (base / p).lexically_normal().string();
}

bool parse_bool(const std::string& key, const std::string& v) {
  std::string s = to_lower(v);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw UsageError(key + ": expected true or false, got '" + v + "'");
}

std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& v) {
  double out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw UsageError(key + ": expected a number, got '" + v + "'");
  }
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + path.string() + "'");
  return in;
}

void require_file(const fs::path& path, const std::string& what) {
  if (!fs::is_regular_file(path)) {
    throw UsageError(what + " '" + path.string() + "' does not exist");
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

int run_guarded(std::ostream& err, const char* command, auto&& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    err << "violet " << command << ": " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "violet " << command << ": internal error: " << e.what() << '\n';
    return static_cast<int>(ErrorKind::Invariant);
  }
}

void validate_inputs(const PipelineConfig& config) {
  if (config.input_paths.empty()) throw UsageError("input.paths is not set");
  for (const auto& p : config.input_paths) require_file(p, "input file");
}

fs::path model_path(const PipelineConfig& c) {
  return c.model.empty() ? c.output_dir / artifacts::kModel : c.model;
}

fs::path vocab_path(const PipelineConfig& c) {
  return c.vocab.empty() ? c.output_dir / artifacts::kVocab : c.vocab;
}

fs::path context_path(const fs::path& model) {
  fs::path p = model;
  p.replace_extension(".ctx.vec");
  return p;
}

void validate_analyze(const PipelineConfig& c) {
  require_file(model_path(c), "model file");
  require_file(vocab_path(c), "vocabulary file");
  if (c.vectors == VectorSource::InputOutputMean) {
    require_file(context_path(model_path(c)), "output-vector file");
  }
  if (!c.catalog.empty()) require_file(c.catalog, "catalog file");
  if (c.k == 0) throw UsageError("analyze.k must be at least 1");
}

struct AnalysisResult {
  Vocabulary vocab;
  CatalogLoadResult catalog;
  std::vector<NamedMatrix> matrices;
  std::vector<RelationChain> chains;
};

void write_tsv_rows(const fs::path& path, const std::vector<std::vector<std::string>>& rows) {
  auto out = open_output(path);
  for (const auto& r : rows) write_row(out, r, '\t');
}

// Replaces normalized tokens by catalog labels so exports read naturally.
void relabel(SimilarityMatrix& m, const KeywordCatalog& catalog) {
  for (auto& l : m.row_labels) l = catalog.label_of(l);
  for (auto& l : m.col_labels) l = catalog.label_of(l);
}

AnalysisResult run_analysis(const PipelineConfig& c, std::ostream& err) {
  AnalysisResult result;
  {
    auto in = open_input(vocab_path(c));
    result.vocab = read_vocabulary(in);
  }
  EmbeddingModel model;
  {
    auto in = open_input(model_path(c));
    model = load_model(in);
  }
  if (c.vectors == VectorSource::InputOutputMean) {
    auto in = open_input(context_path(model_path(c)));
    load_output_layer(in, model);
  }

  std::vector<CatalogEntry> entries;
  if (c.catalog.empty()) {
    std::istringstream in{std::string(resources::keyword_catalog())};
    entries = read_catalog_entries(in);
  } else {
    auto in = open_input(c.catalog);
    entries = read_catalog_entries(in);
  }
  const PreprocessConfig& pp = c.preprocess;
  result.catalog = load_keyword_catalog(
      entries, result.vocab, c.threshold,
      [&pp](std::string_view label) { return normalize_token(label, pp); });
  for (const auto& r : result.catalog.rejections) {
    err << "keyword rejected: " << to_string(r.category) << " '" << r.label << "': " << r.reason
        << '\n';
  }

  KeywordCatalog& catalog = result.catalog.catalog;
  // Keywords that passed the frequency check but have no vector.
  for (KeywordCategory cat : kAllCategories) {
    auto& list = catalog.category(cat);
    std::vector<Keyword> kept;
    for (auto& kw : list) {
      if (model.vocab.contains(kw.token)) {
        kept.push_back(kw);
      } else {
        err << "keyword has no vector: " << kw.label << '\n';
        result.catalog.rejections.push_back(
            {cat, kw.label, kw.token, kw.frequency, "not in model"});
      }
    }
    list = std::move(kept);
    if (list.empty()) throw DataError(std::string("empty category: ") + to_string(cat));
  }

  auto matrix = [&](KeywordCategory rows, KeywordCategory cols, std::string title,
                    std::string corner) {
    auto pr = pairwise_matrix(model, catalog.tokens(rows), catalog.tokens(cols), c.vectors);
    relabel(pr.matrix, catalog);
    return NamedMatrix{std::move(title), std::move(corner), std::move(pr.matrix)};
  };
  result.matrices.push_back(matrix(KeywordCategory::Location, KeywordCategory::Contaminant,
                                   "Location and contaminant similarity",
                                   "Location \\ Contaminant"));
  result.matrices.push_back(matrix(KeywordCategory::Operation, KeywordCategory::Contaminant,
                                   "Operation and contaminant similarity",
                                   "Operation \\ Contaminant"));
  result.matrices.push_back(matrix(KeywordCategory::Location, KeywordCategory::Operation,
                                   "Location and operation similarity",
                                   "Location \\ Operation"));

  result.chains = build_chains(result.matrices[0].matrix, result.matrices[2].matrix,
                               result.matrices[1].matrix, c.k, c.scope);
  validate_chains(result.chains, catalog, c.k);
  return result;
}

void write_analysis(const PipelineConfig& c, const AnalysisResult& a) {
  std::vector<std::vector<std::string>> rows{{"category", "keyword", "token", "frequency"}};
  for (KeywordCategory cat : kAllCategories) {
    for (const auto& kw : a.catalog.catalog.category(cat)) {
      rows.push_back({to_string(cat), kw.label, kw.token, std::to_string(kw.frequency)});
    }
  }
  write_tsv_rows(c.output_dir / artifacts::kKeywords, rows);

  rows = {{"category", "keyword", "token", "frequency", "reason"}};
  for (const auto& r : a.catalog.rejections) {
    rows.push_back({to_string(r.category), r.label, r.token, std::to_string(r.frequency), r.reason});
  }
  write_tsv_rows(c.output_dir / artifacts::kRejections, rows);

  const char* names[] = {artifacts::kLocCont, artifacts::kOpCont, artifacts::kLocOp};
  for (std::size_t i = 0; i < 3; ++i) {
    const fs::path path = c.output_dir / names[i];
    {
      auto out = open_output(path);
      write_matrix(out, a.matrices[i].matrix, a.matrices[i].corner);
    }
    fs::path ann = path;
    ann.replace_extension(".annotations.tsv");
    auto out = open_output(ann);
    write_annotations(out, a.matrices[i].matrix);
  }
  auto out = open_output(c.output_dir / artifacts::kChains);
  write_chains(out, a.chains);
}

}  // namespace

ConfigValues parse_config(std::istream& in, const fs::path& base_dir) {
  ConfigValues values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(trim(view.substr(0, eq)));
    std::string value(trim(view.substr(eq + 1)));
    const ConfigKey* spec = find_key(key);
    if (!spec) {
      throw UsageError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (spec->is_path) {
      if (key == "input.paths") {
        std::string joined;
        for (const auto& part : split(value, ',')) {
          std::string p(trim(part));
          if (p.empty()) continue;
          if (!joined.empty()) joined += ',';
          joined += resolve_path(p, base_dir);
        }
        value = joined;
      } else {
        value = resolve_path(value, base_dir);
      }
    }
    values[key] = value;
  }
  return values;
}

ConfigValues read_config_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw UsageError("cannot open config file '" + file.string() + "'");
  return parse_config(in, file.parent_path());
}

PipelineConfig PipelineConfig::from_values(const ConfigValues& given) {
  for (const auto& [key, value] : given) {
    if (!find_key(key)) throw UsageError("unknown config key '" + key + "'");
  }
  auto get = [&](const std::string& key) -> std::string {
    auto it = given.find(key);
    if (it != given.end()) return it->second;
    return find_key(key)->default_value;
  };

  PipelineConfig c;
  for (const auto& p : split(get("input.paths"), ',')) {
    if (!trim(p).empty()) c.input_paths.emplace_back(std::string(trim(p)));
  }
  const std::string delim = to_lower(get("input.delimiter"));
  if (delim == "comma" || delim == ",") {
    c.parse.delimiter = ',';
  } else if (delim == "tab" || delim == "\\t") {
    c.parse.delimiter = '\t';
  } else {
    throw UsageError("input.delimiter: expected comma or tab, got '" + delim + "'");
  }
  c.parse.date_format = get("input.date_format");

  c.columns.record_id = get("columns.record_id");
  c.columns.inspection_date = get("columns.inspection_date");
  c.columns.violation_type = get("columns.violation_type");
  c.columns.violation_code = get("columns.violation_code");
  c.columns.violation_description = get("columns.violation_description");
  c.columns.inspection_comment = get("columns.inspection_comment");
  c.columns.type_aliases.clear();
  for (ViolationType t : kAllViolationTypes) {
    const std::string key = std::string("types.") + key_name(t);
    for (const auto& alias : split(get(key), '|')) {
      std::string a = to_lower(trim(alias));
      auto [it, inserted] = c.columns.type_aliases.emplace(a, t);
      if (!inserted && it->second != t) {
        throw UsageError(key + ": alias '" + a + "' already maps to " + to_string(it->second));
      }
    }
  }
  c.columns.validate();

  auto type = parse_type_key(get("filter.type"));
  if (!type) throw UsageError("filter.type: expected none, administrative or ehs");
  c.filter_type = *type;
  c.require_comment = parse_bool("filter.require_comment", get("filter.require_comment"));
  c.stats_top_n = parse_uint("stats.top_n", get("stats.top_n"));
  if (c.stats_top_n == 0) throw UsageError("stats.top_n must be at least 1");

  c.preprocess = PreprocessConfig::defaults();
  if (std::string p = get("preprocess.stopwords"); p != "bundled") {
    auto in = open_input(p);
    c.preprocess.stopwords = read_word_list(in);
  }
  if (std::string p = get("preprocess.lemma_lexicon"); p != "bundled") {
    auto in = open_input(p);
    c.preprocess.lemma_exceptions = read_lemma_lexicon(in);
  }
  c.preprocess.remove_stopwords = parse_bool("preprocess.remove_stopwords", get("preprocess.remove_stopwords"));
  c.preprocess.lemmatize = parse_bool("preprocess.lemmatize", get("preprocess.lemmatize"));
  c.preprocess.stem = parse_bool("preprocess.stem", get("preprocess.stem"));
  const std::string order = get("preprocess.order");
  if (order == "lemmatize_first") {
    c.preprocess.order = StageOrder::LemmatizeThenStem;
  } else if (order == "stem_first") {
    c.preprocess.order = StageOrder::StemThenLemmatize;
  } else {
    throw UsageError("preprocess.order: expected lemmatize_first or stem_first");
  }
  c.preprocess.keep_numbers = parse_bool("preprocess.keep_numbers", get("preprocess.keep_numbers"));
  if (std::string p = get("preprocess.punctuation"); p != "ascii") c.preprocess.punctuation = p;
  c.preprocess.validate();

  c.min_count = parse_uint("vocab.min_count", get("vocab.min_count"));
  if (c.min_count == 0) throw UsageError("vocab.min_count must be at least 1");

  TrainingConfig& t = c.training;
  t.seed = parse_uint("seed", get("seed"));
  t.dimension = parse_uint("train.dimension", get("train.dimension"));
  t.window = parse_uint("train.window", get("train.window"));
  t.epochs = parse_uint("train.epochs", get("train.epochs"));
  t.learning_rate = parse_real("train.learning_rate", get("train.learning_rate"));
  t.min_learning_rate = parse_real("train.min_learning_rate", get("train.min_learning_rate"));
  const std::string objective = get("train.objective");
  if (objective == "negative_sampling") {
    t.objective = Objective::NegativeSampling;
  } else if (objective == "full_softmax") {
    t.objective = Objective::FullSoftmax;
  } else {
    throw UsageError("train.objective: expected negative_sampling or full_softmax");
  }
  t.negatives = parse_uint("train.negatives", get("train.negatives"));
  t.subsample = parse_real("train.subsample", get("train.subsample"));
  t.dynamic_window = parse_bool("train.dynamic_window", get("train.dynamic_window"));
  t.shuffle = parse_bool("train.shuffle", get("train.shuffle"));
  t.log_interval = parse_uint("train.log_interval", get("train.log_interval"));
  t.validate();

  if (std::string p = get("analyze.catalog"); p != "bundled") c.catalog = p;
  c.threshold = parse_uint("analyze.threshold", get("analyze.threshold"));
  c.k = parse_uint("analyze.k", get("analyze.k"));
  if (c.k == 0) throw UsageError("analyze.k must be at least 1");
  const std::string scope = get("analyze.quartile_scope");
  if (scope == "row") {
    c.scope = QuartileScope::PerRow;
  } else if (scope == "global") {
    c.scope = QuartileScope::Global;
  } else {
    throw UsageError("analyze.quartile_scope: expected row or global");
  }
  const std::string vectors = get("analyze.vectors");
  if (vectors == "input") {
    c.vectors = VectorSource::Input;
  } else if (vectors == "mean") {
    c.vectors = VectorSource::InputOutputMean;
  } else {
    throw UsageError("analyze.vectors: expected input or mean");
  }
  c.model = get("analyze.model");
  c.vocab = get("analyze.vocab");
  c.top_words = parse_uint("analyze.top_words", get("analyze.top_words"));
  c.output_dir = get("output.dir");
  if (c.output_dir.empty()) throw UsageError("output.dir must not be empty");
  return c;
}

std::vector<ComplianceRecord> load_records(const PipelineConfig& config, std::ostream& err,
                                           std::vector<RowError>* errors) {
  std::vector<ComplianceRecord> records;
  for (const auto& path : config.input_paths) {
    auto in = open_input(path);
    ParseResult parsed;
    try {
      parsed = parse_report(in, config.columns, config.parse);
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    for (const auto& e : parsed.errors) {
      err << path.string() << ":" << e.line << ": " << e.message << '\n';
      if (errors) errors->push_back(e);
    }
    records.insert(records.end(), std::make_move_iterator(parsed.records.begin()),
                   std::make_move_iterator(parsed.records.end()));
  }
  return records;
}

std::vector<TokenStream> build_corpus(const PipelineConfig& config,
                                      const std::vector<ComplianceRecord>& records) {
  std::vector<TokenStream> corpus;
  for (const auto& rec : filter_records(records, config.filter_type, config.require_comment)) {
    corpus.push_back(preprocess(rec.inspection_comment, config.preprocess, rec.record_id));
  }
  return corpus;
}

int cmd_stats(const PipelineConfig& config, std::ostream& err) {
  return run_guarded(err, "stats", [&] {
    validate_inputs(config);
    std::vector<RowError> row_errors;
    auto records = load_records(config, err, &row_errors);
    ViolationStats stats = compute_stats(records, config.stats_top_n);

    fs::create_directories(config.output_dir);
    {
      auto out = open_output(config.output_dir / artifacts::kStatsCsv);
      write_stats_delimited(out, stats, config.parse.delimiter);
    }
    {
      auto out = open_output(config.output_dir / artifacts::kStatsJson);
      write_stats_json(out, stats);
    }
    std::vector<std::vector<std::string>> rows{{"line", "message"}};
    for (const auto& e : row_errors) rows.push_back({std::to_string(e.line), e.message});
    write_tsv_rows(config.output_dir / artifacts::kParseErrors, rows);
  });
}

int cmd_train(const PipelineConfig& config, std::ostream& err) {
  return run_guarded(err, "train", [&] {
    validate_inputs(config);
    auto records = load_records(config, err);
    auto corpus = build_corpus(config, records);
    Vocabulary vocab = build_vocabulary(corpus, config.min_count);

    std::ostringstream log;
    log << "corpus: " << corpus.size() << " comments, " << vocab.total_token_count()
        << " tokens, " << vocab.unique_token_count() << " unique, " << vocab.size()
        << " in vocabulary\n";
    EmbeddingModel model = train(corpus, vocab, config.training, nullptr, &log);

    fs::create_directories(config.output_dir);
    {
      auto out = open_output(config.output_dir / artifacts::kVocab);
      write_vocabulary(out, vocab);
    }
    {
      auto out = open_output(config.output_dir / artifacts::kModel);
      save_model(out, model, Layer::Input);
    }
    {
      auto out = open_output(config.output_dir / artifacts::kContextModel);
      save_model(out, model, Layer::Output);
    }
    auto out = open_output(config.output_dir / artifacts::kTrainLog);
    out << log.str();
  });
}

int cmd_analyze(const PipelineConfig& config, std::ostream& err) {
  return run_guarded(err, "analyze", [&] {
    validate_analyze(config);
    AnalysisResult analysis = run_analysis(config, err);
    fs::create_directories(config.output_dir);
    write_analysis(config, analysis);
  });
}

int cmd_report(const PipelineConfig& config, std::ostream& err) {
  return run_guarded(err, "report", [&] {
    validate_analyze(config);
    for (const auto& p : config.input_paths) require_file(p, "input file");
    AnalysisResult analysis = run_analysis(config, err);

    std::optional<ViolationStats> stats;
    if (!config.input_paths.empty()) {
      stats = compute_stats(load_records(config, err), config.stats_top_n);
    }
    ReportInput input;
    input.stats = stats ? &*stats : nullptr;
    input.top_words = top_frequent(analysis.vocab, config.top_words);
    input.unique_tokens = analysis.vocab.unique_token_count();
    input.catalog = &analysis.catalog.catalog;
    input.rejections = analysis.catalog.rejections;
    input.matrices = analysis.matrices;
    input.chains = analysis.chains;
    input.k = config.k;
    input.scope = config.scope;
    const std::string text = render_report(input);

    fs::create_directories(config.output_dir);
    write_analysis(config, analysis);
    auto out = open_output(config.output_dir / artifacts::kReport);
    out << text;
  });
}

}  // namespace violet
