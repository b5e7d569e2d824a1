#include "violet/vocabulary.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "violet/delimited.hpp"
#include "violet/error.hpp"

namespace violet {

namespace {

bool by_frequency(const TokenCount& a, const TokenCount& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.token < b.token;
}

}  // namespace

Vocabulary Vocabulary::build(const std::vector<TokenStream>& streams,
                             std::uint64_t min_count) {
  if (min_count == 0) throw UsageError("min_count must be positive");
  std::unordered_map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;
  for (const auto& stream : streams) {
    for (const auto& token : stream.tokens) {
      ++counts[token];
      ++total;
    }
  }
  if (total == 0) throw DataError("empty corpus: no tokens to build a vocabulary from");

  std::vector<TokenCount> kept;
  for (auto& [token, count] : counts) {
    if (count >= min_count) kept.push_back({token, count});
  }
  Vocabulary vocab = from_counts(std::move(kept), total, counts.size());
  vocab.min_count_ = min_count;
  return vocab;
}

Vocabulary Vocabulary::from_counts(std::vector<TokenCount> counts,
                                   std::optional<std::uint64_t> total_tokens,
                                   std::optional<std::uint64_t> unique_tokens) {
  std::sort(counts.begin(), counts.end(), by_frequency);
  Vocabulary vocab;
  std::uint64_t sum = 0;
  vocab.tokens_.reserve(counts.size());
  vocab.counts_.reserve(counts.size());
  vocab.min_count_ = counts.empty() ? 1 : std::max<std::uint64_t>(1, counts.back().count);
  for (auto& entry : counts) {
    auto id = static_cast<TokenId>(vocab.tokens_.size());
    if (!vocab.index_.emplace(entry.token, id).second) {
      throw DataError("duplicate vocabulary token '" + entry.token + "'");
    }
    sum += entry.count;
    vocab.counts_.push_back(entry.count);
    vocab.tokens_.push_back(std::move(entry.token));
  }
  vocab.total_tokens_ = total_tokens.value_or(sum);
  vocab.unique_tokens_ = unique_tokens.value_or(vocab.tokens_.size());
  if (sum > vocab.total_tokens_) {
    throw DataError("vocabulary frequencies exceed the stated total token count");
  }
  return vocab;
}

Vocabulary Vocabulary::in_order(std::vector<TokenCount> counts) {
  Vocabulary vocab;
  std::uint64_t sum = 0;
  for (auto& entry : counts) {
    auto id = static_cast<TokenId>(vocab.tokens_.size());
    if (!vocab.index_.emplace(entry.token, id).second) {
      throw DataError("duplicate vocabulary token '" + entry.token + "'");
    }
    sum += entry.count;
    vocab.counts_.push_back(entry.count);
    vocab.tokens_.push_back(std::move(entry.token));
  }
  vocab.total_tokens_ = sum;
  vocab.unique_tokens_ = vocab.tokens_.size();
  return vocab;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<TokenId> Vocabulary::encode(const TokenStream& stream) const {
  std::vector<TokenId> ids;
  ids.reserve(stream.tokens.size());
  for (const auto& token : stream.tokens) {
    if (auto id = find(token)) ids.push_back(*id);
  }
  return ids;
}

std::vector<TokenCount> top_frequent(const Vocabulary& vocab, std::size_t n) {
  // Id order already is the required ranking.
  std::vector<TokenCount> out;
  const std::size_t take = std::min(n, vocab.size());
  out.reserve(take);
  for (TokenId id = 0; id < take; ++id) {
    out.push_back({vocab.token(id), vocab.frequency(id)});
  }
  return out;
}

void write_vocabulary(std::ostream& out, const Vocabulary& vocab) {
  out << "# total_tokens=" << vocab.total_token_count()
      << " unique_tokens=" << vocab.unique_token_count() << '\n';
  for (TokenId id = 0; id < vocab.size(); ++id) {
    out << vocab.token(id) << '\t' << vocab.frequency(id) << '\n';
  }
}

Vocabulary read_vocabulary(std::istream& in) {
  std::vector<TokenCount> counts;
  std::optional<std::uint64_t> total, unique;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream meta(line.substr(1));
      std::string item;
      while (meta >> item) {
        auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        std::string key = item.substr(0, eq);
        try {
          std::uint64_t value = std::stoull(item.substr(eq + 1));
          if (key == "total_tokens") total = value;
          if (key == "unique_tokens") unique = value;
        } catch (const std::exception&) {
          throw DataError("vocabulary line " + std::to_string(line_no) + ": bad value");
        }
      }
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError("vocabulary line " + std::to_string(line_no) +
                      ": expected token<TAB>frequency");
    }
    std::uint64_t count = 0;
    try {
      std::size_t used = 0;
      std::string field = line.substr(tab + 1);
      count = std::stoull(field, &used);
      if (used != field.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw DataError("vocabulary line " + std::to_string(line_no) + ": bad frequency");
    }
    counts.push_back({line.substr(0, tab), count});
  }
  return Vocabulary::from_counts(std::move(counts), total, unique);
}

const char* to_string(KeywordCategory category) {
  switch (category) {
    case KeywordCategory::Contaminant: return "Contaminant";
    case KeywordCategory::Location: return "Location";
    case KeywordCategory::Operation: return "Operation";
  }
  return "?";
}

std::optional<KeywordCategory> parse_category(std::string_view name) {
  std::string n = to_lower(trim(name));
  if (n == "contaminant") return KeywordCategory::Contaminant;
  if (n == "location") return KeywordCategory::Location;
  if (n == "operation") return KeywordCategory::Operation;
  return std::nullopt;
}

std::vector<std::string> KeywordCatalog::tokens(KeywordCategory c) const {
  std::vector<std::string> out;
  for (const auto& kw : category(c)) out.push_back(kw.token);
  return out;
}

std::optional<KeywordCategory> KeywordCatalog::category_of(std::string_view token) const {
  for (KeywordCategory c : kAllCategories) {
    for (const auto& kw : category(c)) {
      if (kw.token == token || kw.label == token) return c;
    }
  }
  return std::nullopt;
}

std::string KeywordCatalog::label_of(std::string_view token) const {
  for (const auto& list : lists_) {
    for (const auto& kw : list) {
      if (kw.token == token) return kw.label;
    }
  }
  return std::string(token);
}

std::size_t KeywordCatalog::size() const {
  return lists_[0].size() + lists_[1].size() + lists_[2].size();
}

void KeywordCatalog::check_disjoint() const {
  std::map<std::string, KeywordCategory> seen;
  for (KeywordCategory c : kAllCategories) {
    for (const auto& kw : category(c)) {
      auto [it, inserted] = seen.emplace(kw.token, c);
      if (!inserted && it->second != c) {
        throw InvariantError("keyword '" + kw.token + "' is in both " +
                             to_string(it->second) + " and " + to_string(c));
      }
    }
  }
}

std::vector<CatalogEntry> read_catalog_entries(std::istream& in) {
  std::vector<CatalogEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = view.find('\t');
    if (tab == std::string_view::npos) {
      throw DataError("catalog line " + std::to_string(line_no) +
                      ": expected category<TAB>keyword");
    }
    auto category = parse_category(view.substr(0, tab));
    if (!category) {
      throw DataError("catalog line " + std::to_string(line_no) + ": unknown category '" +
                      std::string(trim(view.substr(0, tab))) + "'");
    }
    std::string keyword = to_lower(trim(view.substr(tab + 1)));
    if (keyword.empty()) {
      throw DataError("catalog line " + std::to_string(line_no) + ": empty keyword");
    }
    entries.push_back({*category, std::move(keyword), line_no});
  }
  return entries;
}

CatalogLoadResult load_keyword_catalog(std::istream& in, const Vocabulary& vocab,
                                       std::uint64_t threshold,
                                       const TokenNormalizer& normalize) {
  return load_keyword_catalog(read_catalog_entries(in), vocab, threshold, normalize);
}

CatalogLoadResult load_keyword_catalog(const std::vector<CatalogEntry>& entries,
                                       const Vocabulary& vocab, std::uint64_t threshold,
                                       const TokenNormalizer& normalize) {
  CatalogLoadResult result;
  // token -> (category, label) of its first occurrence
  std::map<std::string, std::pair<KeywordCategory, std::string>> owner;
  for (const auto& entry : entries) {
    std::string token = normalize ? normalize(entry.label) : entry.label;
    auto [it, inserted] = owner.emplace(token, std::make_pair(entry.category, entry.label));
    if (!inserted) {
      if (it->second.first != entry.category) {
        throw DataError("catalog line " + std::to_string(entry.line) + ": keyword '" +
                        entry.label + "' (" + token + ") is already listed under " +
                        to_string(it->second.first) + " as '" + it->second.second + "'");
      }
      result.rejections.push_back({entry.category, entry.label, token, 0, "duplicate"});
      continue;
    }
    auto id = vocab.find(token);
    if (!id) {
      result.rejections.push_back({entry.category, entry.label, token, 0, "out of vocabulary"});
      continue;
    }
    std::uint64_t freq = vocab.frequency(*id);
    if (freq <= threshold) {
      result.rejections.push_back({entry.category, entry.label, token, freq,
                                   "frequency " + std::to_string(freq) +
                                       " not above threshold " + std::to_string(threshold)});
      continue;
    }
    result.catalog.category(entry.category).push_back({entry.label, token, freq});
  }
  for (KeywordCategory c : kAllCategories) {
    auto& list = result.catalog.category(c);
    std::stable_sort(list.begin(), list.end(), [](const Keyword& a, const Keyword& b) {
      return a.frequency > b.frequency;
    });
  }
  result.catalog.check_disjoint();
  return result;
}

}  // namespace violet
