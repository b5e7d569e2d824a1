#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "violet/skipgram.hpp"

namespace violet {

// dot(a, b) / (|a| |b|), clamped to [-1, 1]. Throws DataError for a zero
// vector or mismatched sizes.
double cosine(std::span<const double> a, std::span<const double> b);

enum class VectorSource { Input, InputOutputMean };

struct SimilarityMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  Matrix values;
  std::vector<std::size_t> row_max_col;
  std::vector<std::size_t> col_max_row;

  std::size_t rows() const noexcept { return row_labels.size(); }
  std::size_t cols() const noexcept { return col_labels.size(); }
  double at(std::size_t r, std::size_t c) const { return values(r, c); }
  std::size_t row_index(const std::string& label) const;  // npos if absent
  std::size_t col_index(const std::string& label) const;
  bool operator==(const SimilarityMatrix&) const = default;
};

// Fills row_max_col / col_max_row; ties go to the lowest index.
void annotate_extremes(SimilarityMatrix& matrix);

struct PairwiseResult {
  SimilarityMatrix matrix;
  std::vector<std::string> dropped;  // tokens missing from the model
};

// Embedding used for similarity: the input row, or the mean of input and
// output rows.
std::vector<double> embedding(const EmbeddingModel& model, TokenId id,
                              VectorSource source = VectorSource::Input);

// values[i][j] = cosine(row_i, col_j) over the model's vectors. Tokens absent
// from the model are dropped and listed in `dropped`; throws DataError if no
// row (or no column) token survives.
PairwiseResult pairwise_matrix(const EmbeddingModel& model,
                               const std::vector<std::string>& row_tokens,
                               const std::vector<std::string>& col_tokens,
                               VectorSource source = VectorSource::Input);

struct Neighbor {
  std::string token;
  double similarity = 0.0;
};

// The n most similar other tokens, descending (ties by id).
std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, const std::string& token,
                                        std::size_t n,
                                        VectorSource source = VectorSource::Input);

// Delimited matrix with a header row and a label column. `corner` names the
// top-left cell.
void write_matrix(std::ostream& out, const SimilarityMatrix& matrix,
                  const std::string& corner, char delimiter = '\t');
SimilarityMatrix read_matrix(std::istream& in, char delimiter = '\t');
// Lines "row_max<TAB>row<TAB>col<TAB>value" and "col_max<TAB>col<TAB>row<TAB>value".
void write_annotations(std::ostream& out, const SimilarityMatrix& matrix);

}  // namespace violet
