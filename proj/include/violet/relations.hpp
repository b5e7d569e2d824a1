#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "violet/report_ingest.hpp"
#include "violet/similarity.hpp"
#include "violet/vocabulary.hpp"

namespace violet {

// Threshold scope for upper-quartile selection.
enum class QuartileScope { PerRow, Global };

const char* to_string(QuartileScope scope);

// q-th quantile (0..1) by linear interpolation between closest ranks:
// sorted x, position q * (n - 1).
double percentile_linear(std::vector<double> values, double q);

struct Ranked {
  std::string token;
  double value = 0.0;
  bool operator==(const Ranked&) const = default;
};

// Columns of `row` whose value is at least the 75th percentile (of the row,
// or of the whole matrix for QuartileScope::Global), by descending value with
// ties in column order.
std::vector<Ranked> upper_quartile_select(const SimilarityMatrix& matrix, std::size_t row,
                                          QuartileScope scope = QuartileScope::PerRow);

struct OperationLink {
  std::string operation;
  double value = 0.0;  // location-operation similarity
  std::vector<Ranked> contaminants;
  bool operator==(const OperationLink&) const = default;
};

struct RelationChain {
  std::string location;
  std::vector<Ranked> contaminants;
  std::vector<OperationLink> operations;
  bool operator==(const RelationChain&) const = default;
};

// One chain per row of `loc_cont`, in row order. Requires loc_cont and loc_op
// to share row labels, loc_op columns to match op_cont rows and loc_cont
// columns to match op_cont columns; a mismatch throws DataError naming the
// label. Lists are upper-quartile selections truncated to k.
std::vector<RelationChain> build_chains(const SimilarityMatrix& loc_cont,
                                        const SimilarityMatrix& loc_op,
                                        const SimilarityMatrix& op_cont, std::size_t k = 3,
                                        QuartileScope scope = QuartileScope::PerRow);

// Throws InvariantError if a chain token is not in its catalog category or a
// list breaks the ordering/length contract.
void validate_chains(const std::vector<RelationChain>& chains, const KeywordCatalog& catalog,
                     std::size_t k);

// Columns: location, operation_rank, operation, contaminant_rank, contaminant,
// similarity. Rank 0 with an empty name marks the location's own link.
void write_chains(std::ostream& out, const std::vector<RelationChain>& chains);
std::vector<RelationChain> read_chains(std::istream& in);

struct NamedMatrix {
  std::string title;
  std::string corner;  // e.g. "Location \\ Contaminant"
  SimilarityMatrix matrix;
};

struct ReportInput {
  const ViolationStats* stats = nullptr;
  std::vector<TokenCount> top_words;
  const KeywordCatalog* catalog = nullptr;
  std::vector<CatalogRejection> rejections;
  std::vector<NamedMatrix> matrices;
  std::vector<RelationChain> chains;
  std::size_t k = 3;
  QuartileScope scope = QuartileScope::PerRow;
  std::uint64_t unique_tokens = 0;
};

// Plain-text report. Row maxima are wrapped in underscores and column maxima
// in double asterisks. Output depends only on the input.
std::string render_report(const ReportInput& input);

}  // namespace violet
