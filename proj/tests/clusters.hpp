#pragma once

#include <string>
#include <vector>

#include "violet/similarity.hpp"
#include "violet/skipgram.hpp"

namespace violet::testing {

// Comments drawn from {a,b,c} or from {x,y,z}, never mixed; 10 000 tokens.
inline std::vector<TokenStream> two_cluster_corpus(std::uint64_t seed) {
  const std::vector<std::string> left = {"a", "b", "c"}, right = {"x", "y", "z"};
  Rng rng(seed * 7919 + 1);
  std::vector<TokenStream> docs;
  for (int d = 0; d < 500; ++d) {
    const auto& pool = d % 2 ? right : left;
    TokenStream s;
    for (int i = 0; i < 20; ++i) s.tokens.push_back(pool[rng.below(3)]);
    docs.push_back(std::move(s));
  }
  return docs;
}

inline TrainingConfig two_cluster_config(std::uint64_t seed) {
  TrainingConfig cfg;
  cfg.dimension = 16;
  cfg.window = 2;
  cfg.epochs = 3;
  cfg.learning_rate = 0.025;
  cfg.negatives = 5;
  cfg.seed = seed;
  return cfg;
}

struct ClusterScore {
  double intra = 0.0;
  double inter = 0.0;
};

inline ClusterScore cluster_score(const EmbeddingModel& m) {
  const std::vector<std::string> left = {"a", "b", "c"}, right = {"x", "y", "z"};
  auto vec = [&](const std::string& t) { return embedding(m, *m.vocab.find(t)); };
  ClusterScore s;
  int n_intra = 0, n_inter = 0;
  for (const auto* group : {&left, &right})
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j) {
        s.intra += cosine(vec((*group)[i]), vec((*group)[j]));
        ++n_intra;
      }
  for (const auto& l : left)
    for (const auto& r : right) {
      s.inter += cosine(vec(l), vec(r));
      ++n_inter;
    }
  s.intra /= n_intra;
  s.inter /= n_inter;
  return s;
}

}  // namespace violet::testing
