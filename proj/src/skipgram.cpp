#include "violet/skipgram.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "violet/error.hpp"

namespace violet {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// log(1 + exp(-x)) without overflow.
double softplus_neg(double x) {
  return x > 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

void check_pair(const EmbeddingModel& model, const TrainingPair& pair) {
  const std::size_t v = model.vocab.size();
  if (pair.center >= v || pair.context >= v) {
    throw InvariantError("training pair id out of range");
  }
}

void apply(EmbeddingModel& model, TokenId center, const PairGradient& grad, double lr) {
  if (lr == 0.0) return;
  auto v = model.input.row(center);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * grad.center[i];
  for (const auto& [id, g] : grad.output_rows) {
    auto u = model.output.row(id);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= lr * g[i];
  }
}

bool finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(),
                     [](double x) { return std::isfinite(x); });
}

}  // namespace

std::uint64_t Rng::below(std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

const char* to_string(Objective objective) {
  return objective == Objective::FullSoftmax ? "full_softmax" : "negative_sampling";
}

void TrainingConfig::validate() const {
  if (dimension < 1) throw UsageError("train.dimension must be at least 1");
  if (window < 1) throw UsageError("train.window must be at least 1");
  if (epochs < 1) throw UsageError("train.epochs must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("train.learning_rate must be positive");
  }
  if (min_learning_rate < 0.0 || !(final_learning_rate() < learning_rate)) {
    throw UsageError("train.min_learning_rate must be positive and below train.learning_rate");
  }
  if (objective == Objective::NegativeSampling && negatives < 1) {
    throw UsageError("train.negatives must be at least 1");
  }
  if (subsample < 0.0) throw UsageError("train.subsample must be non-negative");
}

EmbeddingModel EmbeddingModel::initialize(Vocabulary vocab, const TrainingConfig& config,
                                          Rng& rng) {
  EmbeddingModel model;
  const std::size_t v = vocab.size();
  const std::size_t d = config.dimension;
  model.vocab = std::move(vocab);
  model.config = config;
  model.input = Matrix(v, d);
  model.output = Matrix(v, d, 0.0);
  const double half = 0.5 / static_cast<double>(d);
  for (double& x : model.input.data()) x = (rng.unit() * 2.0 - 1.0) * half;
  return model;
}

std::vector<TrainingPair> generate_pairs(std::span<const TokenId> ids, std::size_t window,
                                         Rng& rng, bool dynamic_window) {
  std::vector<TrainingPair> pairs;
  const std::size_t n = ids.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = dynamic_window ? 1 + rng.below(window) : window;
    const std::size_t lo = i >= b ? i - b : 0;
    const std::size_t hi = std::min(n - 1, i + b);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) pairs.push_back({ids[i], ids[j]});
    }
  }
  return pairs;
}

std::vector<double> softmax_distribution(const EmbeddingModel& model, TokenId center) {
  const std::size_t v = model.vocab.size();
  auto h = model.input.row(center);
  std::vector<double> p(v);
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < v; ++j) {
    p[j] = dot(h, model.output.row(j));
    max_score = std::max(max_score, p[j]);
  }
  double sum = 0.0;
  for (double& x : p) {
    x = std::exp(x - max_score);
    sum += x;
  }
  for (double& x : p) x /= sum;
  return p;
}

double full_softmax_loss(const EmbeddingModel& model, const TrainingPair& pair) {
  check_pair(model, pair);
  const std::size_t v = model.vocab.size();
  auto h = model.input.row(pair.center);
  std::vector<double> scores(v);
  double max_score = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < v; ++j) {
    scores[j] = dot(h, model.output.row(j));
    max_score = std::max(max_score, scores[j]);
  }
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - max_score);
  return max_score + std::log(sum) - scores[pair.context];
}

PairGradient full_softmax_gradient(const EmbeddingModel& model, const TrainingPair& pair) {
  check_pair(model, pair);
  const std::size_t v = model.vocab.size();
  const std::size_t d = model.dimension();
  auto h = model.input.row(pair.center);
  std::vector<double> p = softmax_distribution(model, pair.center);

  PairGradient grad;
  grad.center.assign(d, 0.0);
  grad.output_rows.reserve(v);
  for (std::size_t j = 0; j < v; ++j) {
    const double err = p[j] - (j == pair.context ? 1.0 : 0.0);
    auto u = model.output.row(j);
    std::vector<double> gu(d);
    for (std::size_t i = 0; i < d; ++i) {
      grad.center[i] += err * u[i];
      gu[i] = err * h[i];
    }
    grad.output_rows.emplace_back(static_cast<TokenId>(j), std::move(gu));
  }
  return grad;
}

double negative_sampling_loss(const EmbeddingModel& model, const TrainingPair& pair,
                              std::span<const TokenId> negatives) {
  check_pair(model, pair);
  auto h = model.input.row(pair.center);
  double loss = softplus_neg(dot(h, model.output.row(pair.context)));
  for (TokenId n : negatives) loss += softplus_neg(-dot(h, model.output.row(n)));
  return loss;
}

PairGradient negative_sampling_gradient(const EmbeddingModel& model,
                                        const TrainingPair& pair,
                                        std::span<const TokenId> negatives) {
  check_pair(model, pair);
  const std::size_t d = model.dimension();
  auto h = model.input.row(pair.center);

  // Accumulate per output row so duplicate negatives combine.
  std::map<TokenId, std::vector<double>> rows;
  PairGradient grad;
  grad.center.assign(d, 0.0);
  auto add = [&](TokenId id, double coeff) {
    auto u = model.output.row(id);
    auto& gu = rows[id];
    if (gu.empty()) gu.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      grad.center[i] += coeff * u[i];
      gu[i] += coeff * h[i];
    }
  };
  add(pair.context, sigmoid(dot(h, model.output.row(pair.context))) - 1.0);
  for (TokenId n : negatives) {
    if (n >= model.vocab.size()) throw InvariantError("negative sample id out of range");
    add(n, sigmoid(dot(h, model.output.row(n))));
  }
  grad.output_rows.reserve(rows.size());
  for (auto& [id, g] : rows) grad.output_rows.emplace_back(id, std::move(g));
  return grad;
}

double step_full_softmax(EmbeddingModel& model, const TrainingPair& pair,
                         double learning_rate) {
  const double loss = full_softmax_loss(model, pair);
  apply(model, pair.center, full_softmax_gradient(model, pair), learning_rate);
  return loss;
}

double step_negative_sampling(EmbeddingModel& model, const TrainingPair& pair,
                              std::span<const TokenId> negatives, double learning_rate) {
  const double loss = negative_sampling_loss(model, pair, negatives);
  apply(model, pair.center, negative_sampling_gradient(model, pair, negatives),
        learning_rate);
  return loss;
}

NoiseDistribution::NoiseDistribution(const Vocabulary& vocab, double power) {
  cdf_.reserve(vocab.size());
  double total = 0.0;
  for (std::uint64_t f : vocab.frequencies()) {
    total += std::pow(static_cast<double>(std::max<std::uint64_t>(f, 1)), power);
    cdf_.push_back(total);
  }
  for (double& c : cdf_) c /= total;
  if (!cdf_.empty()) cdf_.back() = 1.0;
}

TokenId NoiseDistribution::sample(Rng& rng) const {
  const double u = rng.unit();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it == cdf_.end()) --it;
  return static_cast<TokenId>(it - cdf_.begin());
}

std::vector<TokenId> NoiseDistribution::draw(Rng& rng, std::size_t k, TokenId exclude) const {
  std::vector<TokenId> out;
  if (cdf_.size() < 2) return out;
  out.reserve(k);
  while (out.size() < k) {
    TokenId id = sample(rng);
    if (id != exclude) out.push_back(id);
  }
  return out;
}

double NoiseDistribution::probability(TokenId id) const {
  return id == 0 ? cdf_.at(0) : cdf_.at(id) - cdf_.at(id - 1);
}

EmbeddingModel train(const std::vector<TokenStream>& streams, const Vocabulary& vocab,
                     const TrainingConfig& config, TrainingReport* report,
                     std::ostream* progress) {
  config.validate();
  if (vocab.empty()) throw DataError("empty corpus: vocabulary has no tokens");

  std::vector<std::vector<TokenId>> corpus;
  corpus.reserve(streams.size());
  std::uint64_t corpus_tokens = 0;
  for (const auto& stream : streams) {
    auto ids = vocab.encode(stream);
    corpus_tokens += ids.size();
    if (!ids.empty()) corpus.push_back(std::move(ids));
  }
  if (corpus_tokens == 0) throw DataError("empty corpus: no in-vocabulary tokens");

  Rng rng(config.seed);
  EmbeddingModel model = EmbeddingModel::initialize(vocab, config, rng);
  const NoiseDistribution noise(vocab);

  std::vector<double> keep_prob;
  if (config.subsample > 0.0) {
    const double total = static_cast<double>(vocab.total_token_count());
    keep_prob.resize(vocab.size());
    for (TokenId id = 0; id < vocab.size(); ++id) {
      const double f = static_cast<double>(vocab.frequency(id)) / total;
      const double t = config.subsample;
      keep_prob[id] = std::min(1.0, (std::sqrt(f / t) + 1.0) * t / f);
    }
  }

  const double lr0 = config.learning_rate;
  const double lr_min = config.final_learning_rate();
  const auto epochs = static_cast<double>(config.epochs);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainingReport local;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) {
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
      }
    }
    std::vector<TrainingPair> pairs;
    for (std::size_t s : order) {
      const auto& ids = corpus[s];
      if (keep_prob.empty()) {
        auto p = generate_pairs(ids, config.window, rng, config.dynamic_window);
        pairs.insert(pairs.end(), p.begin(), p.end());
      } else {
        std::vector<TokenId> kept;
        for (TokenId id : ids) {
          if (rng.unit() < keep_prob[id]) kept.push_back(id);
        }
        auto p = generate_pairs(kept, config.window, rng, config.dynamic_window);
        pairs.insert(pairs.end(), p.begin(), p.end());
      }
    }

    double loss_sum = 0.0;
    const auto n = static_cast<double>(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const double progress_frac = (static_cast<double>(epoch) + static_cast<double>(i) / n) / epochs;
      const double lr = lr0 - (lr0 - lr_min) * progress_frac;
      const TrainingPair& pair = pairs[i];
      double loss = 0.0;
      if (config.objective == Objective::FullSoftmax) {
        loss = step_full_softmax(model, pair, lr);
      } else {
        auto negs = noise.draw(rng, config.negatives, pair.context);
        loss = step_negative_sampling(model, pair, negs, lr);
      }
      loss_sum += loss;
      ++local.pairs_processed;

      if (!std::isfinite(loss) || !finite(model.input.row(pair.center))) {
        std::ostringstream msg;
        msg << "non-finite value at step " << local.pairs_processed << " (epoch "
            << epoch + 1 << ", center '" << vocab.token(pair.center) << "', context '"
            << vocab.token(pair.context) << "', learning rate " << lr << ")";
        throw InvariantError(msg.str());
      }
      if (progress && config.log_interval > 0 &&
          local.pairs_processed % config.log_interval == 0) {
        *progress << "pairs=" << local.pairs_processed << " lr=" << lr
                  << " loss=" << loss_sum / static_cast<double>(i + 1) << '\n';
      }
    }
    const double mean = pairs.empty() ? 0.0 : loss_sum / n;
    local.epoch_mean_loss.push_back(mean);
    if (progress) {
      *progress << "epoch=" << epoch + 1 << " pairs=" << local.pairs_processed
                << " lr=" << lr0 - (lr0 - lr_min) * (static_cast<double>(epoch + 1) / epochs)
                << " loss=" << mean << '\n';
    }
  }
  if (!finite(model.input.data()) || !finite(model.output.data())) {
    throw InvariantError("non-finite weight after training");
  }
  if (report) *report = std::move(local);
  return model;
}

namespace {

std::string format_double(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

bool parse_double(std::string_view s, double& out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

struct VectorFile {
  std::vector<std::string> tokens;
  Matrix values;
};

VectorFile read_vector_file(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError("model file line 1: missing header");
  std::size_t v = 0, d = 0;
  {
    std::istringstream header(line);
    std::string extra;
    if (!(header >> v >> d) || (header >> extra) || d == 0) {
      throw DataError("model file line 1: expected header \"V d\"");
    }
  }
  VectorFile file;
  file.values = Matrix(v, d);
  file.tokens.reserve(v);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "model file line " + std::to_string(line_no);
    if (file.tokens.size() == v) throw DataError(where + ": more rows than the header declares");
    std::istringstream row(line);
    std::string token, field;
    row >> token;
    std::size_t col = 0;
    const std::size_t r = file.tokens.size();
    while (row >> field) {
      if (col == d) throw DataError(where + ": more than " + std::to_string(d) + " values");
      double x;
      if (!parse_double(field, x) || !std::isfinite(x)) {
        throw DataError(where + ": bad value '" + field + "'");
      }
      file.values(r, col++) = x;
    }
    if (col != d) {
      throw DataError(where + ": expected " + std::to_string(d) + " values, found " +
                      std::to_string(col));
    }
    file.tokens.push_back(std::move(token));
  }
  if (file.tokens.size() != v) {
    throw DataError("model file: header declares " + std::to_string(v) + " rows, found " +
                    std::to_string(file.tokens.size()));
  }
  return file;
}

}  // namespace

void save_model(std::ostream& out, const EmbeddingModel& model, Layer layer) {
  const Matrix& m = layer == Layer::Input ? model.input : model.output;
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << model.vocab.token(static_cast<TokenId>(r));
    for (double x : m.row(r)) out << ' ' << format_double(x);
    out << '\n';
  }
}

EmbeddingModel load_model(std::istream& in) {
  VectorFile file = read_vector_file(in);
  std::vector<TokenCount> counts;
  counts.reserve(file.tokens.size());
  for (auto& t : file.tokens) counts.push_back({std::move(t), 0});
  EmbeddingModel model;
  model.vocab = Vocabulary::in_order(std::move(counts));
  model.output = Matrix(file.values.rows(), file.values.cols(), 0.0);
  model.input = std::move(file.values);
  model.config.dimension = model.input.cols();
  return model;
}

void load_output_layer(std::istream& in, EmbeddingModel& model) {
  VectorFile file = read_vector_file(in);
  if (file.values.rows() != model.input.rows() || file.values.cols() != model.input.cols()) {
    throw DataError("output vectors: shape does not match the input vectors");
  }
  for (std::size_t r = 0; r < file.tokens.size(); ++r) {
    if (file.tokens[r] != model.vocab.token(static_cast<TokenId>(r))) {
      throw DataError("output vectors: row " + std::to_string(r + 1) + " is '" +
                      file.tokens[r] + "', expected '" +
                      model.vocab.token(static_cast<TokenId>(r)) + "'");
    }
  }
  model.output = std::move(file.values);
}

}  // namespace violet
