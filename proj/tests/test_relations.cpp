#include <algorithm>
#include <random>
#include <sstream>

#include <doctest.h>

#include "oracle.hpp"
#include "violet/error.hpp"
#include "violet/relations.hpp"

using namespace violet;
using testing::labeled;

namespace {

std::vector<std::string> names(const char* prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

SimilarityMatrix random_matrix(std::vector<std::string> rows, std::vector<std::string> cols,
                               std::mt19937& gen) {
  std::vector<std::vector<double>> v(rows.size(), std::vector<double>(cols.size()));
  // multiples of 1/16 so that ties occur and interpolation is exact
  for (auto& r : v)
    for (auto& x : r) x = static_cast<int>(gen() % 33) / 16.0 - 1.0;
  return labeled(std::move(rows), std::move(cols), v);
}

KeywordCatalog catalog_for(const std::vector<std::string>& cont,
                           const std::vector<std::string>& loc,
                           const std::vector<std::string>& op) {
  KeywordCatalog c;
  for (auto& t : cont) c.category(KeywordCategory::Contaminant).push_back({t, t, 1});
  for (auto& t : loc) c.category(KeywordCategory::Location).push_back({t, t, 1});
  for (auto& t : op) c.category(KeywordCategory::Operation).push_back({t, t, 1});
  return c;
}

}  // namespace

TEST_SUITE("relations") {

TEST_CASE("linear percentile") {
  CHECK(percentile_linear({0.1, 0.2, 0.3, 0.4}, 0.75) == doctest::Approx(0.325));
  CHECK(percentile_linear({5.0}, 0.75) == 5.0);
  CHECK(percentile_linear({3, 1, 2}, 0.5) == 2.0);
}

TEST_CASE("upper quartile of a row") {
  auto m = labeled({"well"}, {"a", "b", "c", "d"}, {{0.1, 0.2, 0.3, 0.4}});
  CHECK(upper_quartile_select(m, 0) == std::vector<Ranked>{{"d", 0.4}});
  auto flat = labeled({"well"}, {"a", "b", "c"}, {{0.5, 0.5, 0.5}});
  CHECK(upper_quartile_select(flat, 0).size() == 3);
  auto one = labeled({"well"}, {"a"}, {{-0.2}});
  CHECK(upper_quartile_select(one, 0) == std::vector<Ranked>{{"a", -0.2}});
}

TEST_CASE("global scope uses one threshold") {
  auto m = labeled({"r0", "r1"}, {"a", "b"}, {{0.0, 0.1}, {0.9, 0.9}});
  CHECK(upper_quartile_select(m, 0, QuartileScope::Global).empty());
  CHECK(upper_quartile_select(m, 1, QuartileScope::Global).size() == 2);
  CHECK(upper_quartile_select(m, 0, QuartileScope::PerRow).size() == 1);
}

TEST_CASE("selection agrees with the oracle on random rows") {
  std::mt19937 gen(17);
  for (int i = 0; i < 300; ++i) {
    std::size_t n = 1 + gen() % 12;
    auto m = random_matrix({"r"}, names("c", n), gen);
    auto row = testing::row_of(m, 0);
    auto want = testing::oracle_select(m.col_labels, row, testing::p75(row));
    CHECK(testing::same(upper_quartile_select(m, 0), want));
  }
}

TEST_CASE("raising a selected value keeps it selected") {
  std::mt19937 gen(23);
  for (int i = 0; i < 200; ++i) {
    std::size_t n = 2 + gen() % 10;
    auto m = random_matrix({"r"}, names("c", n), gen);
    auto sel = upper_quartile_select(m, 0);
    REQUIRE_FALSE(sel.empty());
    std::size_t col = m.col_index(sel.back().token);
    m.values(0, col) += 0.5;
    auto again = upper_quartile_select(m, 0);
    CHECK(std::any_of(again.begin(), again.end(),
                      [&](const Ranked& r) { return r.token == sel.back().token; }));
  }
}

TEST_CASE("chains agree with the brute force oracle") {
  std::mt19937 gen(29);
  for (int i = 0; i < 60; ++i) {
    auto loc = names("l", 1 + gen() % 5), cont = names("c", 1 + gen() % 8),
         op = names("o", 1 + gen() % 6);
    auto lc = random_matrix(loc, cont, gen);
    auto lo = random_matrix(loc, op, gen);
    auto oc = random_matrix(op, cont, gen);
    for (std::size_t k : {1u, 3u}) {
      auto chains = build_chains(lc, lo, oc, k);
      CHECK(testing::same(chains, testing::oracle_chains(lc, lo, oc, k)));
      CHECK_NOTHROW(validate_chains(chains, catalog_for(cont, loc, op), k));
    }
  }
}

TEST_CASE("k of one keeps only the best entries") {
  auto lc = labeled({"well"}, {"gas", "brine"}, {{0.9, 0.1}});
  auto lo = labeled({"well"}, {"vent", "spill"}, {{0.2, 0.8}});
  auto oc = labeled({"vent", "spill"}, {"gas", "brine"}, {{0.7, 0.3}, {0.1, 0.6}});
  auto chains = build_chains(lc, lo, oc, 1);
  REQUIRE(chains.size() == 1);
  CHECK(chains[0].contaminants == std::vector<Ranked>{{"gas", 0.9}});
  REQUIRE(chains[0].operations.size() == 1);
  CHECK(chains[0].operations[0].operation == "spill");
  CHECK(chains[0].operations[0].contaminants == std::vector<Ranked>{{"brine", 0.6}});
}

TEST_CASE("chains ignore the order of matrix columns") {
  std::mt19937 gen(31);
  auto loc = names("l", 3), cont = names("c", 6), op = names("o", 4);
  auto lc = random_matrix(loc, cont, gen);
  auto lo = random_matrix(loc, op, gen);
  auto oc = random_matrix(op, cont, gen);
  // distinct values so that no tie depends on column order
  for (std::size_t r = 0; r < lc.rows(); ++r)
    for (std::size_t c = 0; c < lc.cols(); ++c) lc.values(r, c) += 1e-3 * (r * 10 + c);
  for (std::size_t r = 0; r < lo.rows(); ++r)
    for (std::size_t c = 0; c < lo.cols(); ++c) lo.values(r, c) += 1e-3 * (r * 10 + c);
  for (std::size_t r = 0; r < oc.rows(); ++r)
    for (std::size_t c = 0; c < oc.cols(); ++c) oc.values(r, c) += 1e-3 * (r * 10 + c);
  auto base = build_chains(lc, lo, oc, 3);
  auto permute_cols = [&](const SimilarityMatrix& m) {
    std::vector<std::size_t> perm(m.cols());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = perm.size() - 1 - i;
    SimilarityMatrix p = m;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      p.col_labels[c] = m.col_labels[perm[c]];
      for (std::size_t r = 0; r < m.rows(); ++r) p.values(r, c) = m.values(r, perm[c]);
    }
    annotate_extremes(p);
    return p;
  };
  CHECK(build_chains(permute_cols(lc), permute_cols(lo), permute_cols(oc), 3) == base);
}

TEST_CASE("mismatched labels name the label") {
  auto lc = labeled({"well"}, {"gas"}, {{0.9}});
  auto lo = labeled({"pad"}, {"vent"}, {{0.2}});
  auto oc = labeled({"vent"}, {"gas"}, {{0.7}});
  try {
    build_chains(lc, lo, oc, 3);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("well") != std::string::npos);
  }
}

TEST_CASE("validation rejects tokens outside their category") {
  auto lc = labeled({"well"}, {"gas"}, {{0.9}});
  auto lo = labeled({"well"}, {"vent"}, {{0.2}});
  auto oc = labeled({"vent"}, {"gas"}, {{0.7}});
  auto chains = build_chains(lc, lo, oc, 3);
  CHECK_THROWS_AS(validate_chains(chains, catalog_for({"gas"}, {"well"}, {"spill"}), 3),
                  InvariantError);
}

TEST_CASE("chain export round-trip") {
  std::mt19937 gen(37);
  auto lc = random_matrix(names("l", 3), names("c", 5), gen);
  auto lo = random_matrix(names("l", 3), names("o", 4), gen);
  auto oc = random_matrix(names("o", 4), names("c", 5), gen);
  auto chains = build_chains(lc, lo, oc, 3);
  std::ostringstream out;
  write_chains(out, chains);
  std::istringstream in(out.str());
  CHECK(read_chains(in) == chains);
}

TEST_CASE("report markers and empty chain section") {
  auto lc = labeled({"well", "pad"}, {"gas", "brine"}, {{0.9, 0.1}, {0.2, 0.05}});
  ReportInput input;
  input.matrices.push_back({"Location and contaminant similarity", "Location \\ Contaminant", lc});
  auto text = render_report(input);
  CHECK(text.find("_**0.900**_") != std::string::npos);  // row and column max
  CHECK(text.find("_0.200_") != std::string::npos);      // row max only
  CHECK(text.find("**0.100**") != std::string::npos);    // column max only
  CHECK(text.find("0.050") != std::string::npos);
  CHECK(text.find("No relations above quartile.") != std::string::npos);
  CHECK(render_report(input) == text);
}

}
