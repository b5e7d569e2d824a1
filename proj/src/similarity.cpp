#include "violet/similarity.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string_view>

#include "violet/delimited.hpp"
#include "violet/error.hpp"

namespace violet {

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("cosine: vectors differ in dimension");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) throw DataError("cosine: zero-norm vector");
  const double c = ab / (std::sqrt(aa) * std::sqrt(bb));
  return std::clamp(c, -1.0, 1.0);
}

std::size_t SimilarityMatrix::row_index(const std::string& label) const {
  auto it = std::find(row_labels.begin(), row_labels.end(), label);
  return it == row_labels.end() ? std::string::npos
                                : static_cast<std::size_t>(it - row_labels.begin());
}

std::size_t SimilarityMatrix::col_index(const std::string& label) const {
  auto it = std::find(col_labels.begin(), col_labels.end(), label);
  return it == col_labels.end() ? std::string::npos
                                : static_cast<std::size_t>(it - col_labels.begin());
}

void annotate_extremes(SimilarityMatrix& m) {
  const std::size_t rows = m.values.rows(), cols = m.values.cols();
  m.row_max_col.assign(rows, 0);
  m.col_max_row.assign(cols, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 1; c < cols; ++c) {
      if (m.values(r, c) > m.values(r, m.row_max_col[r])) m.row_max_col[r] = c;
    }
  }
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 1; r < rows; ++r) {
      if (m.values(r, c) > m.values(m.col_max_row[c], c)) m.col_max_row[c] = r;
    }
  }
}

std::vector<double> embedding(const EmbeddingModel& model, TokenId id, VectorSource source) {
  auto in = model.input.row(id);
  std::vector<double> v(in.begin(), in.end());
  if (source == VectorSource::InputOutputMean) {
    auto out = model.output.row(id);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (v[i] + out[i]);
  }
  return v;
}

PairwiseResult pairwise_matrix(const EmbeddingModel& model,
                               const std::vector<std::string>& row_tokens,
                               const std::vector<std::string>& col_tokens,
                               VectorSource source) {
  PairwiseResult result;
  auto resolve = [&](const std::vector<std::string>& tokens, std::vector<std::string>& labels) {
    std::vector<std::vector<double>> vecs;
    for (const auto& t : tokens) {
      auto id = model.vocab.find(t);
      if (!id) {
        result.dropped.push_back(t);
        continue;
      }
      labels.push_back(t);
      vecs.push_back(embedding(model, *id, source));
    }
    return vecs;
  };
  auto rows = resolve(row_tokens, result.matrix.row_labels);
  auto cols = resolve(col_tokens, result.matrix.col_labels);
  if (rows.empty()) throw DataError("similarity matrix: every row token is out of vocabulary");
  if (cols.empty()) throw DataError("similarity matrix: every column token is out of vocabulary");

  result.matrix.values = Matrix(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      result.matrix.values(r, c) = cosine(rows[r], cols[c]);
    }
  }
  annotate_extremes(result.matrix);
  return result;
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, const std::string& token,
                                        std::size_t n, VectorSource source) {
  auto query_id = model.vocab.find(token);
  if (!query_id) throw DataError("'" + token + "' is not in the vocabulary");
  const auto query = embedding(model, *query_id, source);
  std::vector<std::pair<double, TokenId>> scored;
  for (TokenId id = 0; id < model.vocab.size(); ++id) {
    if (id == *query_id) continue;
    scored.emplace_back(cosine(query, embedding(model, id, source)), id);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  if (scored.size() > n) scored.resize(n);
  std::vector<Neighbor> out;
  for (auto [sim, id] : scored) out.push_back({model.vocab.token(id), sim});
  return out;
}

namespace {

std::string format_value(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

void write_matrix(std::ostream& out, const SimilarityMatrix& m, const std::string& corner,
                  char delimiter) {
  std::vector<std::string> header{corner};
  header.insert(header.end(), m.col_labels.begin(), m.col_labels.end());
  write_row(out, header, delimiter);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::string> row{m.row_labels[r]};
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(format_value(m.values(r, c)));
    write_row(out, row, delimiter);
  }
}

SimilarityMatrix read_matrix(std::istream& in, char delimiter) {
  DelimitedReader reader(in, delimiter);
  std::vector<std::string> fields;
  if (!reader.next(fields) || fields.size() < 2) {
    throw DataError("similarity matrix: missing header row");
  }
  SimilarityMatrix m;
  m.col_labels.assign(fields.begin() + 1, fields.end());
  std::vector<double> values;
  while (reader.next(fields)) {
    if (fields.size() == 1 && fields[0].empty()) continue;
    if (fields.size() != m.col_labels.size() + 1) {
      throw DataError("similarity matrix line " + std::to_string(reader.line()) +
                      ": expected " + std::to_string(m.col_labels.size() + 1) + " fields");
    }
    m.row_labels.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      double x;
      const std::string& f = fields[c];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw DataError("similarity matrix line " + std::to_string(reader.line()) +
                        ": bad value '" + f + "'");
      }
      values.push_back(x);
    }
  }
  m.values = Matrix(m.row_labels.size(), m.col_labels.size());
  std::copy(values.begin(), values.end(), m.values.data().begin());
  annotate_extremes(m);
  return m;
}

void write_annotations(std::ostream& out, const SimilarityMatrix& m) {
  out << "kind\tlabel\tmax_at\tvalue\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const std::size_t c = m.row_max_col[r];
    out << "row_max\t" << m.row_labels[r] << '\t' << m.col_labels[c] << '\t'
        << format_value(m.values(r, c)) << '\n';
  }
  for (std::size_t c = 0; c < m.cols(); ++c) {
    const std::size_t r = m.col_max_row[c];
    out << "col_max\t" << m.col_labels[c] << '\t' << m.row_labels[r] << '\t'
        << format_value(m.values(r, c)) << '\n';
  }
}

}  // namespace violet
