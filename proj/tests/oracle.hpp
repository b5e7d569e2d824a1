#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "violet/relations.hpp"

namespace violet::testing {

// numpy.percentile(x, 75) with the default linear method.
inline double p75(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double h = 0.75 * static_cast<double>(x.size() - 1);
  const double lo = std::floor(h);
  const std::size_t i = static_cast<std::size_t>(lo);
  if (i + 1 >= x.size()) return x[i];
  return x[i] + (h - lo) * (x[i + 1] - x[i]);
}

// (label, value) at or above the row's 75th percentile; descending value,
// equal values in column order.
inline std::vector<std::pair<std::string, double>> oracle_select(
    const std::vector<std::string>& labels, const std::vector<double>& row, double threshold) {
  std::vector<std::pair<std::size_t, double>> picked;
  for (std::size_t c = 0; c < row.size(); ++c)
    if (row[c] >= threshold) picked.emplace_back(c, row[c]);
  std::sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::pair<std::string, double>> out;
  for (auto& [c, v] : picked) out.emplace_back(labels[c], v);
  return out;
}

inline std::vector<double> row_of(const SimilarityMatrix& m, std::size_t r) {
  std::vector<double> out;
  for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(m.at(r, c));
  return out;
}

inline std::vector<std::pair<std::string, double>> oracle_top(const SimilarityMatrix& m,
                                                              const std::string& row_label,
                                                              std::size_t k) {
  std::size_t r = 0;
  while (m.row_labels[r] != row_label) ++r;
  auto row = row_of(m, r);
  auto sel = oracle_select(m.col_labels, row, p75(row));
  if (sel.size() > k) sel.resize(k);
  return sel;
}

struct OracleChain {
  std::string location;
  std::vector<std::pair<std::string, double>> contaminants;
  std::vector<std::pair<std::pair<std::string, double>,
                        std::vector<std::pair<std::string, double>>>>
      operations;
};

// Per-row scope, distinct labels assumed.
inline std::vector<OracleChain> oracle_chains(const SimilarityMatrix& lc,
                                              const SimilarityMatrix& lo,
                                              const SimilarityMatrix& oc, std::size_t k) {
  std::vector<OracleChain> out;
  for (const auto& loc : lc.row_labels) {
    OracleChain ch;
    ch.location = loc;
    ch.contaminants = oracle_top(lc, loc, k);
    for (auto& op : oracle_top(lo, loc, k)) ch.operations.push_back({op, oracle_top(oc, op.first, k)});
    out.push_back(std::move(ch));
  }
  return out;
}

inline bool same(const std::vector<Ranked>& got,
                 const std::vector<std::pair<std::string, double>>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i)
    if (got[i].token != want[i].first || got[i].value != want[i].second) return false;
  return true;
}

inline bool same(const std::vector<RelationChain>& got, const std::vector<OracleChain>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const auto& g = got[i];
    const auto& w = want[i];
    if (g.location != w.location || !same(g.contaminants, w.contaminants)) return false;
    if (g.operations.size() != w.operations.size()) return false;
    for (std::size_t j = 0; j < g.operations.size(); ++j) {
      const auto& go = g.operations[j];
      const auto& wo = w.operations[j];
      if (go.operation != wo.first.first || go.value != wo.first.second) return false;
      if (!same(go.contaminants, wo.second)) return false;
    }
  }
  return true;
}

inline SimilarityMatrix labeled(std::vector<std::string> rows, std::vector<std::string> cols,
                                const std::vector<std::vector<double>>& values) {
  SimilarityMatrix m;
  m.row_labels = std::move(rows);
  m.col_labels = std::move(cols);
  m.values = Matrix(m.row_labels.size(), m.col_labels.size());
  for (std::size_t r = 0; r < values.size(); ++r)
    for (std::size_t c = 0; c < values[r].size(); ++c) m.values(r, c) = values[r][c];
  annotate_extremes(m);
  return m;
}

}  // namespace violet::testing
