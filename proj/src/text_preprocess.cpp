#include "violet/text_preprocess.hpp"

#include <cctype>
#include <istream>
#include <sstream>

#include "violet/delimited.hpp"
#include "violet/error.hpp"
#include "violet/resources.hpp"

namespace violet {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool has_vowel(std::string_view s) {
  for (char c : s) {
    if (is_vowel(c) || c == 'y') return true;
  }
  return false;
}

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool consonant_at(std::string_view s, std::size_t i) {
  if (is_vowel(s[i])) return false;
  if (s[i] == 'y') return i == 0 || !consonant_at(s, i - 1);
  return true;
}

// Number of vowel-consonant sequences, as in the Porter measure.
int measure(std::string_view s) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const bool c = consonant_at(s, i);
    if (c && prev_vowel) ++m;
    prev_vowel = !c;
  }
  return m;
}

bool ends_cvc(std::string_view s) {
  const std::size_t n = s.size();
  if (n < 3) return false;
  if (!consonant_at(s, n - 1) || consonant_at(s, n - 2) || !consonant_at(s, n - 3)) {
    return false;
  }
  const char last = s[n - 1];
  return last != 'w' && last != 'x' && last != 'y';
}

// Restores the base form after "-ed"/"-ing" removal: "hopp" -> "hop",
// "cas" -> "case", "excavat" -> "excavate"; "spill" keeps its double letter.
std::string restore_base(std::string s) {
  const std::size_t n = s.size();
  if (ends_with(s, "at") || ends_with(s, "bl") || ends_with(s, "iz")) return s + "e";
  if (n >= 2 && s[n - 1] == s[n - 2] && consonant_at(s, n - 1) && s[n - 1] != 'l' &&
      s[n - 1] != 's' && s[n - 1] != 'z') {
    s.pop_back();
    return s;
  }
  if (measure(s) == 1 && ends_cvc(s)) return s + "e";
  return s;
}

std::string strip_inflection(std::string_view t) {
  const std::size_t n = t.size();
  if (n <= 3) return std::string(t);

  if (ends_with(t, "ies") && n > 4) return std::string(t.substr(0, n - 3)) + "y";
  if (ends_with(t, "sses")) return std::string(t.substr(0, n - 2));
  if (ends_with(t, "xes") || ends_with(t, "ches") || ends_with(t, "shes") ||
      ends_with(t, "zzes")) {
    return std::string(t.substr(0, n - 2));
  }
  if (t.back() == 's' && !ends_with(t, "ss") && !ends_with(t, "us") &&
      !ends_with(t, "is")) {
    return std::string(t.substr(0, n - 1));
  }

  if (ends_with(t, "ied") && n > 4) return std::string(t.substr(0, n - 3)) + "y";
  if (ends_with(t, "ed") && !ends_with(t, "eed")) {
    std::string_view base = t.substr(0, n - 2);
    if (base.size() >= 2 && has_vowel(base)) return restore_base(std::string(base));
  }
  if (ends_with(t, "ing")) {
    std::string_view base = t.substr(0, n - 3);
    if (base.size() >= 2 && has_vowel(base)) return restore_base(std::string(base));
  }
  return std::string(t);
}

}  // namespace

PreprocessConfig PreprocessConfig::defaults() {
  PreprocessConfig config;
  std::istringstream stop{std::string(resources::stopwords())};
  config.stopwords = read_word_list(stop);
  std::istringstream lex{std::string(resources::lemma_exceptions())};
  config.lemma_exceptions = read_lemma_lexicon(lex);
  return config;
}

void PreprocessConfig::validate() const {
  for (const auto& word : stopwords) {
    if (word.empty()) throw UsageError("stopword list contains an empty entry");
    for (char c : word) {
      if (std::isupper(static_cast<unsigned char>(c)) ||
          punctuation.find(c) != std::string::npos || is_space(c)) {
        throw UsageError("stopword '" + word + "' is not lowercase and punctuation-free");
      }
    }
  }
}

TokenStream tokenize(std::string_view text, std::string_view punctuation) {
  TokenStream stream;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) stream.tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : text) {
    if (is_space(c)) {
      flush();
    } else if (punctuation.find(c) == std::string_view::npos) {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return stream;
}

TokenStream remove_stopwords(const TokenStream& stream, const PreprocessConfig& config) {
  if (!config.remove_stopwords) return stream;
  TokenStream out;
  out.source_id = stream.source_id;
  for (const auto& token : stream.tokens) {
    if (!config.stopwords.contains(token)) out.tokens.push_back(token);
  }
  return out;
}

std::string lemmatize(std::string_view token, const PreprocessConfig& config) {
  if (auto it = config.lemma_exceptions.find(std::string(token));
      it != config.lemma_exceptions.end()) {
    return it->second;
  }
  std::string out = strip_inflection(token);
  return out.empty() ? std::string(token) : out;
}

std::string normalize_token(std::string_view token, const PreprocessConfig& config) {
  auto once = [&](std::string t) {
    if (config.order == StageOrder::LemmatizeThenStem) {
      if (config.lemmatize) t = lemmatize(t, config);
      if (config.stem) t = stem(t);
    } else {
      if (config.stem) t = stem(t);
      if (config.lemmatize) t = lemmatize(t, config);
    }
    return t;
  };
  // Porter output is not always a fixed point of Porter itself
  // ("agreed" -> "agre" -> "agr"), so passes repeat until nothing changes.
  std::string current(token);
  for (int pass = 0; pass < 32; ++pass) {
    std::string next = once(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

TokenStream preprocess(std::string_view text, const PreprocessConfig& config,
                       std::string source_id) {
  TokenStream stream = tokenize(text, config.punctuation);
  stream.source_id = std::move(source_id);
  stream = remove_stopwords(stream, config);

  if (!config.remove_stopwords) return stream;
  TokenStream out;
  out.source_id = stream.source_id;
  for (const auto& token : stream.tokens) {
    if (!config.keep_numbers && all_digits(token)) continue;
    std::string norm = normalize_token(token, config);
    if (config.remove_stopwords && config.stopwords.contains(norm)) continue;
    out.tokens.push_back(std::move(norm));
  }
  return out;
}

std::unordered_set<std::string> read_word_list(std::istream& in) {
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string_view word = trim(line);
    if (word.empty() || word.front() == '#') continue;
    words.emplace(word);
  }
  return words;
}

std::unordered_map<std::string, std::string> read_lemma_lexicon(std::istream& in) {
  std::unordered_map<std::string, std::string> lexicon;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view entry = trim(line);
    if (entry.empty() || entry.front() == '#') continue;
    auto tab = entry.find('\t');
    if (tab == std::string_view::npos) {
      throw UsageError("lemma lexicon line " + std::to_string(line_no) +
                       ": expected surface<TAB>lemma");
    }
    std::string_view surface = trim(entry.substr(0, tab));
    std::string_view lemma = trim(entry.substr(tab + 1));
    if (surface.empty() || lemma.empty()) {
      throw UsageError("lemma lexicon line " + std::to_string(line_no) + ": empty field");
    }
    lexicon[std::string(surface)] = std::string(lemma);
  }
  return lexicon;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

}  // namespace violet
