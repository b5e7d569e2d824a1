#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace violet {

struct TokenStream {
  std::vector<std::string> tokens;
  std::string source_id;

  bool operator==(const TokenStream&) const = default;
};

enum class StageOrder { LemmatizeThenStem, StemThenLemmatize };

inline constexpr std::string_view kAsciiPunctuation =
    "!\"#$%&'()*+,-./:;<=>?@[\\]^_`{|}~";

struct PreprocessConfig {
  std::unordered_set<std::string> stopwords;
  std::string punctuation{kAsciiPunctuation};
  bool remove_stopwords = true;
  bool lemmatize = true;
  bool stem = true;
  StageOrder order = StageOrder::LemmatizeThenStem;
  // When false, tokens made only of digits are dropped.
  bool keep_numbers = true;
  std::unordered_map<std::string, std::string> lemma_exceptions;

  // Bundled English stopword list and lemma lexicon.
  static PreprocessConfig defaults();

  // Throws UsageError if a stopword is not lowercase or contains a
  // punctuation character.
  void validate() const;
};

// Lowercases, removes punctuation characters and splits on whitespace runs.
TokenStream tokenize(std::string_view text,
                     std::string_view punctuation = kAsciiPunctuation);

// Returns the stream unchanged when config.remove_stopwords is false.
TokenStream remove_stopwords(const TokenStream& stream, const PreprocessConfig& config);

// Porter suffix stripping (the reference C implementation, including its
// "bli" and "logi" rules). Tokens of one or two characters are returned as is.
std::string stem(std::string_view token);

// Exception lexicon first, then conservative plural/inflection stripping.
std::string lemmatize(std::string_view token, const PreprocessConfig& config);

// Applies the enabled lemmatize/stem stages in configured order, repeated
// until the token stops changing.
std::string normalize_token(std::string_view token, const PreprocessConfig& config);

// tokenize -> remove_stopwords -> normalize. Tokens whose normalized form is
// a stopword are dropped as well, which keeps the pipeline idempotent.
TokenStream preprocess(std::string_view text, const PreprocessConfig& config,
                       std::string source_id = {});

// One entry per line; blank lines and lines starting with '#' are skipped.
std::unordered_set<std::string> read_word_list(std::istream& in);
// "surface<TAB>lemma" per line.
std::unordered_map<std::string, std::string> read_lemma_lexicon(std::istream& in);

std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ");

}  // namespace violet
