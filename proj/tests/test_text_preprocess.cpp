#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>

#include "support.hpp"
#include "violet/error.hpp"
#include "violet/text_preprocess.hpp"

using namespace violet;

namespace {

using Tokens = std::vector<std::string>;

PreprocessConfig config_with(std::initializer_list<const char*> stop) {
  PreprocessConfig c = PreprocessConfig::defaults();
  c.stopwords.clear();
  for (auto* w : stop) c.stopwords.insert(w);
  return c;
}

}  // namespace

TEST_SUITE("text_preprocess") {

TEST_CASE("tokenize lowercases and drops punctuation") {
  CHECK(tokenize("Brine, spilled; on the PAD!").tokens ==
        Tokens{"brine", "spilled", "on", "the", "pad"});
  CHECK(tokenize("  \t\n ").tokens.empty());
  CHECK(tokenize("").tokens.empty());
  CHECK(tokenize("E&S plan 102.4").tokens == Tokens{"es", "plan", "1024"});
  CHECK(tokenize("!!! ... ,,,").tokens.empty());
}

TEST_CASE("stopword removal") {
  auto c = config_with({"the", "is", "on"});
  TokenStream s{{"the", "spill", "is", "on", "the", "pad"}, "r1"};
  auto out = remove_stopwords(s, c);
  CHECK(out.tokens == Tokens{"spill", "pad"});
  CHECK(out.source_id == "r1");
  c.remove_stopwords = false;
  CHECK(remove_stopwords(s, c).tokens == s.tokens);
}

TEST_CASE("bundled stopwords are valid") {
  auto c = PreprocessConfig::defaults();
  CHECK_NOTHROW(c.validate());
  CHECK(c.stopwords.count("the"));
  CHECK(c.stopwords.count("was"));
  CHECK_FALSE(c.stopwords.count("well"));
  c.stopwords.insert("Bad");
  CHECK_THROWS_AS(c.validate(), UsageError);
}

TEST_CASE("porter stemmer matches reference vectors") {
  std::ifstream in(testing::data_dir() / "porter_vectors.tsv");
  REQUIRE(in);
  std::string line;
  std::size_t n = 0, bad = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    auto word = line.substr(0, tab), want = line.substr(tab + 1);
    auto got = stem(word);
    if (got != want) {
      ++bad;
      if (bad <= 10) MESSAGE(word << ": got " << got << " want " << want);
    }
    ++n;
  }
  CHECK(n > 5000);
  CHECK(bad == 0);
}

TEST_CASE("porter classic examples") {
  CHECK(stem("caresses") == "caress");
  CHECK(stem("ponies") == "poni");
  CHECK(stem("relational") == "relat");
  CHECK(stem("excavate") == "excav");
  CHECK(stem("gas") == "ga");
  CHECK(stem("is") == "is");
}

TEST_CASE("lemmatizer") {
  auto c = PreprocessConfig::defaults();
  CHECK(lemmatize("cars", c) == "car");
  CHECK(lemmatize("ate", c) == "eat");
  CHECK(lemmatize("gases", c) == "gas");
  CHECK(lemmatize("pads", c) == "pad");
  CHECK(lemmatize("spilled", c) == "spill");
  CHECK(lemmatize("casing", c) == "case");
  CHECK(lemmatize("leaking", c) == "leak");
  CHECK(lemmatize("ponies", c) == "pony");
  CHECK(lemmatize("boxes", c) == "box");
  CHECK(lemmatize("bus", c) == "bus");
  CHECK(lemmatize("gas", c) == "gas");
}

TEST_CASE("full pipeline on a sentence") {
  auto c = PreprocessConfig::defaults();
  CHECK(preprocess("The brine was spilled on pads", c).tokens == Tokens{"brine", "spill", "pad"});
}

TEST_CASE("stage toggles and order") {
  auto c = PreprocessConfig::defaults();
  c.lemmatize = false;
  c.stem = false;
  CHECK(preprocess("Spilled pads", c).tokens == Tokens{"spilled", "pads"});
  c.stem = true;
  CHECK(preprocess("Spilled pads", c).tokens == Tokens{"spill", "pad"});
  c.lemmatize = true;
  c.order = StageOrder::StemThenLemmatize;
  CHECK(preprocess("Spilled pads", c).tokens == Tokens{"spill", "pad"});
  c.keep_numbers = false;
  CHECK(preprocess("20 gallons", c).tokens == Tokens{"gallon"});
}

TEST_CASE("catalog forms normalize consistently with their inflections") {
  auto c = PreprocessConfig::defaults();
  CHECK(normalize_token("casing", c) == normalize_token("case", c));
  CHECK(normalize_token("excavated", c) == normalize_token("excavate", c));
  CHECK(normalize_token("disposed", c) == normalize_token("dispose", c));
  CHECK(normalize_token("impoundment", c) == "impound");
  CHECK(normalize_token("tanks", c) == "tank");
}

TEST_CASE("preprocess is idempotent and total") {
  auto c = PreprocessConfig::defaults();
  std::mt19937 gen(11);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz  ,.;'\"!0123456789ABCXYZ\t\n-";
  std::ifstream in(testing::data_dir() / "porter_vectors.tsv");
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') words.push_back(line.substr(0, line.find('\t')));
  for (int round = 0; round < 300; ++round) {
    std::string text;
    for (int i = 0; i < 20; ++i) {
      if (gen() % 2) {
        text += words[gen() % words.size()];
        text += ' ';
      } else {
        text += alphabet[gen() % alphabet.size()];
      }
    }
    auto once = preprocess(text, c);
    for (auto& t : once.tokens) CHECK_FALSE(t.empty());
    auto twice = preprocess(join(once.tokens), c);
    CHECK(twice.tokens == once.tokens);
  }
  for (auto& w : words) {
    auto n = normalize_token(w, c);
    CHECK(normalize_token(n, c) == n);
  }
}

TEST_CASE("word list and lexicon readers") {
  std::istringstream words("# header\nthe\n\n  and  \n");
  CHECK(read_word_list(words) == std::unordered_set<std::string>{"the", "and"});
  std::istringstream lex("# comment\nmice\tmouse\n");
  auto m = read_lemma_lexicon(lex);
  CHECK(m.at("mice") == "mouse");
  std::istringstream bad("mice mouse\n");
  CHECK_THROWS_AS(read_lemma_lexicon(bad), UsageError);
}

}
