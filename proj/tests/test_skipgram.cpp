#include <cmath>
#include <numeric>
#include <sstream>

#include <doctest.h>

#include "gradcheck.hpp"
#include "support.hpp"
#include "violet/error.hpp"
#include "violet/skipgram.hpp"

using namespace violet;

namespace {

Vocabulary abc() { return Vocabulary::in_order({{"a", 3}, {"b", 2}, {"c", 1}}); }

EmbeddingModel zero_model(std::size_t v, std::size_t d) {
  auto m = testing::random_model(v, d, 1);
  m.input = Matrix(v, d);
  m.output = Matrix(v, d);
  return m;
}

std::vector<TokenStream> toy_corpus() {
  std::vector<TokenStream> docs;
  for (int i = 0; i < 30; ++i) {
    docs.push_back({{"brine", "spill", "pad", "brine", "leak", "tank"}, {}});
    docs.push_back({{"gas", "vent", "well", "methane", "vent", "well"}, {}});
  }
  return docs;
}

}  // namespace

TEST_SUITE("skipgram") {

TEST_CASE("pairs for a three token window") {
  Rng rng(1);
  std::vector<TokenId> ids = {0, 1, 2};
  auto pairs = generate_pairs(ids, 1, rng, false);
  std::vector<TrainingPair> want = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  CHECK(pairs == want);
  CHECK(generate_pairs(std::vector<TokenId>{0}, 5, rng, false).empty());
  CHECK(generate_pairs(std::vector<TokenId>{}, 5, rng, false).empty());
}

TEST_CASE("dynamic window stays inside the fixed one") {
  Rng rng(9);
  std::vector<TokenId> ids(50);
  std::iota(ids.begin(), ids.end(), 0);
  Rng fixed_rng(9);
  auto full = generate_pairs(ids, 4, fixed_rng, false);
  auto dyn = generate_pairs(ids, 4, rng, true);
  CHECK(dyn.size() <= full.size());
  for (auto& p : dyn) {
    auto gap = p.center > p.context ? p.center - p.context : p.context - p.center;
    CHECK(gap >= 1);
    CHECK(gap <= 4);
  }
}

TEST_CASE("softmax of two logits") {
  auto m = zero_model(2, 1);
  m.input(0, 0) = 1.0;
  m.output(0, 0) = 0.0;
  m.output(1, 0) = std::log(3.0);
  auto p = softmax_distribution(m, 0);
  CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("softmax is uniform for zero weights and sums to one") {
  auto m = zero_model(4, 3);
  for (double x : softmax_distribution(m, 2)) CHECK(x == doctest::Approx(0.25));
  auto r = testing::random_model(50, 8, 4, 5.0);
  for (TokenId c = 0; c < 50; ++c) {
    auto p = softmax_distribution(r, c);
    double s = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(std::abs(s - 1.0) < 1e-12);
  }
}

TEST_CASE("full softmax gradient matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = testing::random_model(7, 4, seed);
    for (TokenId c = 0; c < 7; ++c) {
      TrainingPair pair{c, static_cast<TokenId>((c + seed) % 7)};
      auto g = full_softmax_gradient(m, pair);
      auto res = testing::check_gradient(
          m, c, [&](const EmbeddingModel& x) { return full_softmax_loss(x, pair); }, g);
      CHECK(res.max_rel_error < 1e-4);
    }
  }
}

TEST_CASE("negative sampling gradient matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto m = testing::random_model(7, 4, seed + 100);
    TrainingPair pair{1, 2};
    std::vector<TokenId> negs = {3, 5, 3, 0};  // repeated negative on purpose
    auto g = negative_sampling_gradient(m, pair, negs);
    auto res = testing::check_gradient(
        m, pair.center,
        [&](const EmbeddingModel& x) { return negative_sampling_loss(x, pair, negs); }, g);
    CHECK(res.max_rel_error < 1e-4);
  }
}

TEST_CASE("zero learning rate leaves weights unchanged") {
  auto m = testing::random_model(5, 3, 2);
  auto before = m;
  step_full_softmax(m, {0, 1}, 0.0);
  std::vector<TokenId> negs = {2, 3};
  step_negative_sampling(m, {0, 1}, negs, 0.0);
  CHECK(m.input == before.input);
  CHECK(m.output == before.output);
}

TEST_CASE("a small step lowers the pair loss") {
  auto m = testing::random_model(6, 4, 8);
  TrainingPair pair{2, 4};
  double before = full_softmax_loss(m, pair);
  step_full_softmax(m, pair, 0.01);
  CHECK(full_softmax_loss(m, pair) < before);
  std::vector<TokenId> negs = {0, 5};
  before = negative_sampling_loss(m, pair, negs);
  step_negative_sampling(m, pair, negs, 0.01);
  CHECK(negative_sampling_loss(m, pair, negs) < before);
}

TEST_CASE("repeated negative sampling steps saturate the positive score") {
  auto m = testing::random_model(5, 4, 6, 0.1);
  TrainingPair pair{0, 1};
  std::vector<TokenId> negs = {2, 3, 4};
  for (int i = 0; i < 2000; ++i) step_negative_sampling(m, pair, negs, 0.1);
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += m.output(1, i) * m.input(0, i);
  CHECK(1.0 / (1.0 + std::exp(-s)) > 0.99);
}

TEST_CASE("noise distribution") {
  auto v = Vocabulary::in_order({{"a", 16}, {"b", 1}});
  NoiseDistribution noise(v);
  const double a = std::pow(16.0, 0.75), b = 1.0;
  CHECK(noise.probability(0) == doctest::Approx(a / (a + b)));
  Rng rng(3);
  for (auto id : noise.draw(rng, 20, 0)) CHECK(id == 1);
  auto single = Vocabulary::in_order({{"a", 3}});
  CHECK(NoiseDistribution(single).draw(rng, 5, 0).empty());
}

TEST_CASE("full softmax epoch loss does not increase early on") {
  auto docs = toy_corpus();
  auto vocab = Vocabulary::build(docs);
  TrainingConfig cfg;
  cfg.dimension = 10;
  cfg.window = 2;
  cfg.epochs = 3;
  cfg.learning_rate = 0.05;
  cfg.objective = Objective::FullSoftmax;
  cfg.dynamic_window = false;
  TrainingReport rep;
  train(docs, vocab, cfg, &rep);
  REQUIRE(rep.epoch_mean_loss.size() == 3);
  CHECK(rep.epoch_mean_loss[1] <= rep.epoch_mean_loss[0]);
  CHECK(rep.epoch_mean_loss[2] <= rep.epoch_mean_loss[1]);
}

TEST_CASE("training is deterministic for a fixed seed") {
  auto docs = toy_corpus();
  auto vocab = Vocabulary::build(docs);
  TrainingConfig cfg;
  cfg.dimension = 8;
  cfg.epochs = 2;
  cfg.subsample = 1e-2;
  cfg.shuffle = true;
  auto a = train(docs, vocab, cfg);
  auto b = train(docs, vocab, cfg);
  CHECK(a.input == b.input);
  CHECK(a.output == b.output);
  cfg.seed = 2;
  CHECK_FALSE(train(docs, vocab, cfg).input == a.input);
}

TEST_CASE("one token corpus trains without pairs") {
  std::vector<TokenStream> docs = {{{"spill"}, {}}};
  auto vocab = Vocabulary::build(docs);
  TrainingConfig cfg;
  cfg.dimension = 3;
  TrainingReport rep;
  auto m = train(docs, vocab, cfg, &rep);
  CHECK(rep.pairs_processed == 0);
  CHECK(m.input.rows() == 1);
}

TEST_CASE("invalid training settings") {
  TrainingConfig cfg;
  cfg.dimension = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.window = 0;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
  cfg = {};
  cfg.learning_rate = -1;
  CHECK_THROWS_AS(cfg.validate(), UsageError);
}

TEST_CASE("model save and load") {
  auto m = testing::random_model(4, 3, 12);
  std::ostringstream out;
  save_model(out, m);
  std::istringstream in(out.str());
  auto back = load_model(in);
  CHECK(back.vocab.tokens() == m.vocab.tokens());
  CHECK(back.input == m.input);
  std::ostringstream ctx;
  save_model(ctx, m, Layer::Output);
  std::istringstream ctx_in(ctx.str());
  load_output_layer(ctx_in, back);
  CHECK(back.output == m.output);
}

TEST_CASE("model with one token and one dimension") {
  std::istringstream in("1 1\nspill 0.5\n");
  auto m = load_model(in);
  CHECK(m.vocab.token(0) == "spill");
  CHECK(m.input(0, 0) == 0.5);
}

TEST_CASE("malformed model files") {
  std::istringstream too_many("3 4\na 1 2 3 4 5\nb 1 2 3 4\nc 1 2 3 4\n");
  try {
    load_model(too_many);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream too_few_rows("2 1\na 1\n");
  CHECK_THROWS_AS(load_model(too_few_rows), DataError);
  std::istringstream bad_header("x y\n");
  CHECK_THROWS_AS(load_model(bad_header), DataError);
  std::istringstream bad_value("1 1\na nope\n");
  CHECK_THROWS_AS(load_model(bad_value), DataError);
}

}
