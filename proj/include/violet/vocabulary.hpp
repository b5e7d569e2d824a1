#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "violet/text_preprocess.hpp"

namespace violet {

using TokenId = std::uint32_t;

struct TokenCount {
  std::string token;
  std::uint64_t count = 0;
  bool operator==(const TokenCount&) const = default;
};

// Dense token <-> id mapping. Ids are assigned by descending frequency,
// ties broken lexicographically, so id 0 is the most frequent token.
class Vocabulary {
 public:
  Vocabulary() = default;

  // Throws DataError when the corpus has no tokens at all.
  static Vocabulary build(const std::vector<TokenStream>& streams,
                          std::uint64_t min_count = 1);

  // `counts` need not be sorted. `total_tokens` defaults to the sum of counts.
  static Vocabulary from_counts(std::vector<TokenCount> counts,
                                std::optional<std::uint64_t> total_tokens = std::nullopt,
                                std::optional<std::uint64_t> unique_tokens = std::nullopt);

  // Keeps the given order as the id order.
  static Vocabulary in_order(std::vector<TokenCount> counts);

  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }
  std::optional<TokenId> find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::string& token(TokenId id) const { return tokens_.at(id); }
  std::uint64_t frequency(TokenId id) const { return counts_.at(id); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  const std::vector<std::uint64_t>& frequencies() const noexcept { return counts_; }

  // All tokens seen while building, including those below min_count.
  std::uint64_t total_token_count() const noexcept { return total_tokens_; }
  std::uint64_t unique_token_count() const noexcept { return unique_tokens_; }
  std::uint64_t min_count() const noexcept { return min_count_; }

  // Maps a stream to ids, dropping tokens outside the vocabulary.
  std::vector<TokenId> encode(const TokenStream& stream) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
  std::uint64_t total_tokens_ = 0;
  std::uint64_t unique_tokens_ = 0;
  std::uint64_t min_count_ = 1;
};

inline Vocabulary build_vocabulary(const std::vector<TokenStream>& streams,
                                   std::uint64_t min_count = 1) {
  return Vocabulary::build(streams, min_count);
}

// Descending frequency, lexicographic tie-break.
std::vector<TokenCount> top_frequent(const Vocabulary& vocab, std::size_t n);

// "token<TAB>frequency" in id order, preceded by a '#' totals line.
void write_vocabulary(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary(std::istream& in);

enum class KeywordCategory { Contaminant = 0, Location = 1, Operation = 2 };

inline constexpr std::array<KeywordCategory, 3> kAllCategories = {
    KeywordCategory::Contaminant, KeywordCategory::Location, KeywordCategory::Operation};

const char* to_string(KeywordCategory category);
std::optional<KeywordCategory> parse_category(std::string_view name);

struct Keyword {
  std::string label;  // as written in the catalog file
  std::string token;  // normalized form used for vocabulary lookup
  std::uint64_t frequency = 0;
  bool operator==(const Keyword&) const = default;
};

// Three disjoint keyword lists, each sorted by descending frequency.
class KeywordCatalog {
 public:
  const std::vector<Keyword>& category(KeywordCategory c) const {
    return lists_[static_cast<std::size_t>(c)];
  }
  std::vector<Keyword>& category(KeywordCategory c) {
    return lists_[static_cast<std::size_t>(c)];
  }
  std::vector<std::string> tokens(KeywordCategory c) const;
  // Matches either the normalized token or the label.
  std::optional<KeywordCategory> category_of(std::string_view token) const;
  // Label for a normalized token, or the token itself if unknown.
  std::string label_of(std::string_view token) const;
  std::size_t size() const;

  // Throws InvariantError if a token appears in two categories.
  void check_disjoint() const;

 private:
  std::array<std::vector<Keyword>, 3> lists_;
};

struct CatalogEntry {
  KeywordCategory category;
  std::string label;
  std::size_t line = 0;
};

struct CatalogRejection {
  KeywordCategory category;
  std::string label;
  std::string token;
  std::uint64_t frequency = 0;
  std::string reason;
};

struct CatalogLoadResult {
  KeywordCatalog catalog;
  std::vector<CatalogRejection> rejections;
};

// "category<TAB>keyword" lines; '#' starts a comment line.
std::vector<CatalogEntry> read_catalog_entries(std::istream& in);

using TokenNormalizer = std::function<std::string(std::string_view)>;

// Keeps keywords whose vocabulary frequency is strictly greater than
// `threshold`; the rest are reported as rejections. A keyword that lands in
// two categories (after normalization) throws DataError.
CatalogLoadResult load_keyword_catalog(std::istream& in, const Vocabulary& vocab,
                                       std::uint64_t threshold,
                                       const TokenNormalizer& normalize = {});
CatalogLoadResult load_keyword_catalog(const std::vector<CatalogEntry>& entries,
                                       const Vocabulary& vocab, std::uint64_t threshold,
                                       const TokenNormalizer& normalize = {});

}  // namespace violet
