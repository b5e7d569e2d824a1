#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "violet/vocabulary.hpp"

namespace violet {

// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Seeded generator with portable helpers (the standard distributions are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  // Uniform in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

enum class Objective { FullSoftmax, NegativeSampling };

const char* to_string(Objective objective);

struct TrainingConfig {
  std::size_t dimension = 100;
  std::size_t window = 5;
  std::size_t epochs = 5;
  double learning_rate = 0.025;
  // Zero means 1e-4 * learning_rate.
  double min_learning_rate = 0.0;
  Objective objective = Objective::NegativeSampling;
  std::size_t negatives = 5;
  // Frequent-word subsampling threshold; 0 disables it.
  double subsample = 0.0;
  std::uint64_t seed = 1;
  // Shrink the window uniformly at random per position.
  bool dynamic_window = true;
  bool shuffle = false;
  // Progress line every this many pairs (0 = per epoch only).
  std::uint64_t log_interval = 0;

  double final_learning_rate() const {
    return min_learning_rate > 0.0 ? min_learning_rate : 1e-4 * learning_rate;
  }
  // Throws UsageError on invalid settings.
  void validate() const;
};

struct EmbeddingModel {
  Vocabulary vocab;
  Matrix input;   // V x d, the embeddings
  Matrix output;  // V x d, context weights
  TrainingConfig config;

  std::size_t dimension() const noexcept { return input.cols(); }
  // Zero-initialised output weights and uniform input weights in
  // [-0.5/d, 0.5/d].
  static EmbeddingModel initialize(Vocabulary vocab, const TrainingConfig& config, Rng& rng);
};

struct TrainingPair {
  TokenId center = 0;
  TokenId context = 0;
  bool operator==(const TrainingPair&) const = default;
};

// For each position i a radius b is drawn from 1..window (or fixed to
// window), and (ids[i], ids[j]) is emitted for every j != i within b.
std::vector<TrainingPair> generate_pairs(std::span<const TokenId> ids, std::size_t window,
                                         Rng& rng, bool dynamic_window = true);

// Softmax over W_out * W_in[center], max-subtracted.
std::vector<double> softmax_distribution(const EmbeddingModel& model, TokenId center);

// Gradient of a single-pair loss. Output rows are listed once each.
struct PairGradient {
  std::vector<double> center;
  std::vector<std::pair<TokenId, std::vector<double>>> output_rows;
};

// -log p(context | center)
double full_softmax_loss(const EmbeddingModel& model, const TrainingPair& pair);
PairGradient full_softmax_gradient(const EmbeddingModel& model, const TrainingPair& pair);

// -log s(u_c . v) - sum log s(-u_n . v)
double negative_sampling_loss(const EmbeddingModel& model, const TrainingPair& pair,
                              std::span<const TokenId> negatives);
PairGradient negative_sampling_gradient(const EmbeddingModel& model,
                                        const TrainingPair& pair,
                                        std::span<const TokenId> negatives);

// One SGD step; both return the loss before the update.
double step_full_softmax(EmbeddingModel& model, const TrainingPair& pair, double learning_rate);
double step_negative_sampling(EmbeddingModel& model, const TrainingPair& pair,
                              std::span<const TokenId> negatives, double learning_rate);

// Unigram counts raised to 0.75, sampled by inverse CDF.
class NoiseDistribution {
 public:
  explicit NoiseDistribution(const Vocabulary& vocab, double power = 0.75);
  TokenId sample(Rng& rng) const;
  // k draws, none equal to `exclude`. Returns fewer when the vocabulary has
  // no other token.
  std::vector<TokenId> draw(Rng& rng, std::size_t k, TokenId exclude) const;
  double probability(TokenId id) const;

 private:
  std::vector<double> cdf_;
};

struct TrainingReport {
  std::vector<double> epoch_mean_loss;
  std::uint64_t pairs_processed = 0;
};

// Single-threaded and bit-reproducible for a fixed config and seed.
// Throws DataError on an empty corpus and InvariantError if training produces
// a non-finite weight.
EmbeddingModel train(const std::vector<TokenStream>& streams, const Vocabulary& vocab,
                     const TrainingConfig& config, TrainingReport* report = nullptr,
                     std::ostream* progress = nullptr);

enum class Layer { Input, Output };

// Text format: "V d" header, then "token v1 ... vd" per row in id order.
void save_model(std::ostream& out, const EmbeddingModel& model, Layer layer = Layer::Input);
// Reads input vectors; frequencies are unknown and set to zero.
EmbeddingModel load_model(std::istream& in);
// Reads a second file of output vectors into `model`; rows must list the same
// tokens in the same order.
void load_output_layer(std::istream& in, EmbeddingModel& model);

}  // namespace violet
