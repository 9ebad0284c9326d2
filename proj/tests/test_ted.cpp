#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "reformer/ted.hpp"

using namespace reformer;

namespace {

AlgebraNode leaf(const char* label) { return {NodeTag::Table, label, {}}; }

AlgebraNode node(const char* label, std::vector<AlgebraNode> children) {
  return {NodeTag::Table, label, std::move(children)};
}

}  // namespace

TEST_CASE("identical trees have distance zero") {
  auto tree = AlgebraTree{node("A", {leaf("B"), leaf("C")}), false};
  CHECK(tree_edit_distance(tree, tree) == 0);
  CHECK(normalized_distance(tree, tree) == 0.0);
}

TEST_CASE("single insertion costs one") {
  // Project(COLUMN)(TABLE) vs Project(Agg(COLUMN))(TABLE)
  auto a = AlgebraTree{node("Project", {leaf("COLUMN"), leaf("TABLE")}), true};
  auto b = AlgebraTree{
      node("Project", {node("Agg:count", {leaf("COLUMN")}), leaf("TABLE")}), true};
  CHECK(tree_edit_distance(a, b) == 1);
  CHECK(fixtures::oracle_ted(a, b) == 1);
}

TEST_CASE("single-node relabel normalizes to one half") {
  auto a = AlgebraTree{leaf("A"), false};
  auto b = AlgebraTree{leaf("B"), false};
  CHECK(tree_edit_distance(a, b) == 1);
  CHECK(normalized_distance(a, b) == doctest::Approx(0.5));
}

TEST_CASE("three vs four node example matches hand computation") {
  auto a = AlgebraTree{node("P", {leaf("C"), leaf("T")}), false};
  auto b = AlgebraTree{node("P", {leaf("C"), leaf("X"), leaf("T")}), false};
  CHECK(tree_edit_distance(a, b) == 1);
  CHECK(normalized_distance(a, b) == doctest::Approx(1.0 / 7.0));
}

TEST_CASE("implementation equals brute-force oracle on 200 seeded random pairs") {
  std::mt19937_64 rng(20240817);
  for (int i = 0; i < 200; ++i) {
    auto a = fixtures::random_tree(rng, 8);
    auto b = fixtures::random_tree(rng, 8);
    CAPTURE(i);
    CHECK(tree_edit_distance(a, b) == fixtures::oracle_ted(a, b));
  }
}

TEST_CASE("metric sanity holds on random triples") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 60; ++i) {
    auto a = fixtures::random_tree(rng, 8);
    auto b = fixtures::random_tree(rng, 8);
    auto c = fixtures::random_tree(rng, 8);
    int ab = tree_edit_distance(a, b);
    int ba = tree_edit_distance(b, a);
    int ac = tree_edit_distance(a, c);
    int bc = tree_edit_distance(b, c);
    CHECK(tree_edit_distance(a, a) == 0);
    CHECK(ab == ba);
    CHECK(ac <= ab + bc);
  }
}

TEST_CASE("distance works on real parsed queries") {
  auto schema = fixtures::pets_schema();
  auto q1 = anonymize(parse_sql("SELECT name FROM pets", schema));
  auto q2 = anonymize(parse_sql("SELECT count(*) FROM pets", schema));
  // Project(COLUMN)(TABLE) vs Project(Agg:count(COLUMN))(TABLE): one insert
  CHECK(tree_edit_distance(q1, q2) == 1);
}
