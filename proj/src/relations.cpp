#include "violet/relations.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "violet/delimited.hpp"
#include "violet/error.hpp"

namespace violet {

const char* to_string(QuartileScope scope) {
  return scope == QuartileScope::PerRow ? "per-row" : "global";
}

double percentile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw InvariantError("percentile of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  const double p = values[lo] + frac * (values[hi] - values[lo]);
  return std::clamp(p, values[lo], values[hi]);
}

namespace {

std::vector<Ranked> select_above(const SimilarityMatrix& m, std::size_t row, double threshold) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    if (m.at(row, c) >= threshold) cols.push_back(c);
  }
  std::stable_sort(cols.begin(), cols.end(), [&](std::size_t a, std::size_t b) {
    return m.at(row, a) > m.at(row, b);
  });
  std::vector<Ranked> out;
  out.reserve(cols.size());
  for (std::size_t c : cols) out.push_back({m.col_labels[c], m.at(row, c)});
  return out;
}

double threshold_for(const SimilarityMatrix& m, std::size_t row, QuartileScope scope) {
  if (scope == QuartileScope::Global) {
    auto all = m.values.data();
    return percentile_linear({all.begin(), all.end()}, 0.75);
  }
  auto r = m.values.row(row);
  return percentile_linear({r.begin(), r.end()}, 0.75);
}

// Upper-quartile selection, first occurrence of each label, at most k.
std::vector<Ranked> top_k(const SimilarityMatrix& m, std::size_t row, std::size_t k,
                          double threshold) {
  std::vector<Ranked> out;
  std::set<std::string> seen;
  for (auto& r : select_above(m, row, threshold)) {
    if (out.size() == k) break;
    if (seen.insert(r.token).second) out.push_back(std::move(r));
  }
  return out;
}

void require_same_labels(const std::vector<std::string>& a, const std::string& a_name,
                         const std::vector<std::string>& b, const std::string& b_name) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  for (const auto& x : sa) {
    if (!sb.contains(x)) {
      throw DataError("label '" + x + "' appears in " + a_name + " but not in " + b_name);
    }
  }
  for (const auto& x : sb) {
    if (!sa.contains(x)) {
      throw DataError("label '" + x + "' appears in " + b_name + " but not in " + a_name);
    }
  }
}

}  // namespace

std::vector<Ranked> upper_quartile_select(const SimilarityMatrix& matrix, std::size_t row,
                                          QuartileScope scope) {
  if (row >= matrix.rows()) throw InvariantError("upper_quartile_select: row out of range");
  if (matrix.cols() == 0) return {};
  return select_above(matrix, row, threshold_for(matrix, row, scope));
}

std::vector<RelationChain> build_chains(const SimilarityMatrix& loc_cont,
                                        const SimilarityMatrix& loc_op,
                                        const SimilarityMatrix& op_cont, std::size_t k,
                                        QuartileScope scope) {
  if (k == 0) throw UsageError("k must be at least 1");
  require_same_labels(loc_cont.row_labels, "location-contaminant rows", loc_op.row_labels,
                      "location-operation rows");
  require_same_labels(loc_op.col_labels, "location-operation columns", op_cont.row_labels,
                      "operation-contaminant rows");
  require_same_labels(loc_cont.col_labels, "location-contaminant columns",
                      op_cont.col_labels, "operation-contaminant columns");

  std::vector<RelationChain> chains;
  if (loc_cont.cols() == 0 || loc_op.cols() == 0) return chains;
  for (std::size_t r = 0; r < loc_cont.rows(); ++r) {
    RelationChain chain;
    chain.location = loc_cont.row_labels[r];
    chain.contaminants = top_k(loc_cont, r, k, threshold_for(loc_cont, r, scope));

    const std::size_t op_row = loc_op.row_index(chain.location);
    for (auto& op : top_k(loc_op, op_row, k, threshold_for(loc_op, op_row, scope))) {
      OperationLink link;
      link.operation = op.token;
      link.value = op.value;
      const std::size_t oc_row = op_cont.row_index(op.token);
      link.contaminants = top_k(op_cont, oc_row, k, threshold_for(op_cont, oc_row, scope));
      chain.operations.push_back(std::move(link));
    }
    chains.push_back(std::move(chain));
  }
  return chains;
}

void validate_chains(const std::vector<RelationChain>& chains, const KeywordCatalog& catalog,
                     std::size_t k) {
  auto expect = [&](const std::string& token, KeywordCategory c) {
    auto actual = catalog.category_of(token);
    if (!actual || *actual != c) {
      throw InvariantError("chain token '" + token + "' is not a " + to_string(c) + " keyword");
    }
  };
  auto check_list = [&](const std::vector<Ranked>& list) {
    if (list.size() > k) throw InvariantError("chain list longer than k");
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i].value > list[i - 1].value) throw InvariantError("chain list not descending");
    }
  };
  for (const auto& chain : chains) {
    expect(chain.location, KeywordCategory::Location);
    check_list(chain.contaminants);
    for (const auto& c : chain.contaminants) expect(c.token, KeywordCategory::Contaminant);
    if (chain.operations.size() > k) throw InvariantError("chain list longer than k");
    for (std::size_t i = 0; i < chain.operations.size(); ++i) {
      const auto& op = chain.operations[i];
      if (i > 0 && op.value > chain.operations[i - 1].value) {
        throw InvariantError("chain list not descending");
      }
      expect(op.operation, KeywordCategory::Operation);
      check_list(op.contaminants);
      for (const auto& c : op.contaminants) expect(c.token, KeywordCategory::Contaminant);
    }
  }
}

namespace {

std::string format_value(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

}  // namespace

void write_chains(std::ostream& out, const std::vector<RelationChain>& chains) {
  const char d = '\t';
  write_row(out, {"location", "operation_rank", "operation", "contaminant_rank", "contaminant",
                  "similarity"}, d);
  for (const auto& chain : chains) {
    for (std::size_t i = 0; i < chain.contaminants.size(); ++i) {
      write_row(out, {chain.location, "0", "", std::to_string(i + 1),
                      chain.contaminants[i].token, format_value(chain.contaminants[i].value)}, d);
    }
    for (std::size_t o = 0; o < chain.operations.size(); ++o) {
      const auto& op = chain.operations[o];
      const std::string rank = std::to_string(o + 1);
      write_row(out, {chain.location, rank, op.operation, "0", "", format_value(op.value)}, d);
      for (std::size_t i = 0; i < op.contaminants.size(); ++i) {
        write_row(out, {chain.location, rank, op.operation, std::to_string(i + 1),
                        op.contaminants[i].token, format_value(op.contaminants[i].value)}, d);
      }
    }
  }
}

std::vector<RelationChain> read_chains(std::istream& in) {
  DelimitedReader reader(in, '\t');
  std::vector<std::string> f;
  if (!reader.next(f) || f.size() != 6 || f[0] != "location") {
    throw DataError("chain export: missing header");
  }
  std::vector<RelationChain> chains;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    const std::string where = "chain export line " + std::to_string(reader.line());
    if (f.size() != 6) throw DataError(where + ": expected 6 fields");
    std::size_t op_rank = 0, cont_rank = 0;
    double value = 0.0;
    auto parse = [&](const std::string& s, auto& out) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DataError(where + ": bad number '" + s + "'");
      }
    };
    parse(f[1], op_rank);
    parse(f[3], cont_rank);
    parse(f[5], value);

    if (chains.empty() || chains.back().location != f[0]) {
      chains.push_back({f[0], {}, {}});
    }
    RelationChain& chain = chains.back();
    if (op_rank == 0) {
      if (cont_rank != chain.contaminants.size() + 1) throw DataError(where + ": rank out of order");
      chain.contaminants.push_back({f[4], value});
    } else if (cont_rank == 0) {
      if (op_rank != chain.operations.size() + 1) throw DataError(where + ": rank out of order");
      chain.operations.push_back({f[2], value, {}});
    } else {
      if (chain.operations.size() != op_rank || chain.operations.back().operation != f[2]) {
        throw DataError(where + ": contaminant row before its operation row");
      }
      auto& conts = chain.operations.back().contaminants;
      if (cont_rank != conts.size() + 1) throw DataError(where + ": rank out of order");
      conts.push_back({f[4], value});
    }
  }
  return chains;
}

}  // namespace violet
