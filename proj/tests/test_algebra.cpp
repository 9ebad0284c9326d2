#include "doctest.h"
#include "fixtures.hpp"
#include "reformer/algebra.hpp"

using namespace reformer;

namespace {
const DatabaseSchema& pets() {
  static DatabaseSchema s = fixtures::pets_schema();
  return s;
}
}  // namespace

TEST_CASE("simple projection parses to Project(Column)(Table)") {
  auto tree = parse_sql("SELECT name FROM pets", pets());
  CHECK(tree.node_count() == 3);
  CHECK(tree.root.tag == NodeTag::Project);
  REQUIRE(tree.root.children.size() == 2);
  CHECK(tree.root.children[0].tag == NodeTag::Column);
  CHECK(tree.root.children[0].detail == "pets.name");
  CHECK(tree.root.children[1].tag == NodeTag::Table);
  CHECK(tree.root.children[1].detail == "pets");
}

TEST_CASE("aggregate with filter parses to the expected shape") {
  auto tree = parse_sql("SELECT count(*) FROM pets WHERE weight > 10", pets());
  // Project(Agg:count(Column:*))(Filter(Gt(Column,Literal))(Table))
  const auto& proj = tree.root;
  REQUIRE(proj.tag == NodeTag::Project);
  const auto& agg = proj.children[0];
  CHECK(agg.tag == NodeTag::Aggregate);
  CHECK(agg.detail == "count");
  CHECK(agg.children[0].detail == "*");
  const auto& filter = proj.children[1];
  REQUIRE(filter.tag == NodeTag::Filter);
  const auto& gt = filter.children[0];
  CHECK(gt.tag == NodeTag::Gt);
  CHECK(gt.children[0].detail == "pets.weight");
  CHECK(gt.children[1].detail == "num:10");
  CHECK(filter.children[1].tag == NodeTag::Table);
}

TEST_CASE("set operations parse as two Project subtrees") {
  auto schema = fixtures::concerts_schema();
  auto tree =
      parse_sql("SELECT title FROM concerts UNION SELECT name FROM singers", schema);
  CHECK(tree.root.tag == NodeTag::Union);
  REQUIRE(tree.root.children.size() == 2);
  CHECK(tree.root.children[0].tag == NodeTag::Project);
  CHECK(tree.root.children[1].tag == NodeTag::Project);
}

TEST_CASE("joins keep the predicate as a Filter child") {
  auto tree = parse_sql(
      "SELECT pets.name FROM pets JOIN owners ON pets.owner_id = owners.owner_id",
      pets());
  const auto& join = tree.root.children.back();
  REQUIRE(join.tag == NodeTag::Join);
  REQUIRE(join.children.size() == 3);
  CHECK(join.children[0].tag == NodeTag::Table);
  CHECK(join.children[1].tag == NodeTag::Table);
  CHECK(join.children[2].tag == NodeTag::Filter);
  CHECK(join.children[2].children[0].tag == NodeTag::Eq);
}

TEST_CASE("group by, order by and limit nest in the standard order") {
  auto tree = parse_sql(
      "SELECT age, count(*) FROM pets GROUP BY age HAVING count(*) > 1 "
      "ORDER BY age DESC LIMIT 5",
      pets());
  REQUIRE(tree.root.tag == NodeTag::Limit);
  CHECK(tree.root.children[0].detail == "num:5");
  const auto& order = tree.root.children[1];
  REQUIRE(order.tag == NodeTag::OrderBy);
  CHECK(order.detail == "desc");
  const auto& proj = order.children.back();
  REQUIRE(proj.tag == NodeTag::Project);
  const auto& having = proj.children.back();
  REQUIRE(having.tag == NodeTag::Filter);
  CHECK(having.children[1].tag == NodeTag::GroupBy);
}

TEST_CASE("nested IN subqueries become NestedIn nodes") {
  auto tree = parse_sql(
      "SELECT name FROM pets WHERE owner_id IN (SELECT owner_id FROM owners)",
      pets());
  const auto& filter = tree.root.children.back();
  const auto& in = filter.children[0];
  REQUIRE(in.tag == NodeTag::NestedIn);
  CHECK(in.children[0].detail == "pets.owner_id");
  CHECK(in.children[1].tag == NodeTag::Project);
}

TEST_CASE("parse errors carry positions and kinds") {
  CHECK_THROWS_AS(parse_sql("SELECT FROM pets", pets()), SqlSyntaxError);
  CHECK_THROWS_WITH_AS(parse_sql("SELECT nonexistent FROM pets", pets()),
                       doctest::Contains("nonexistent"), SqlResolutionError);
  CHECK_THROWS_WITH_AS(parse_sql("SELECT name FROM ghosts", pets()),
                       doctest::Contains("ghosts"), SqlResolutionError);
  // ambiguous: name exists in both pets and owners
  CHECK_THROWS_AS(parse_sql("SELECT name FROM pets JOIN owners ON "
                            "pets.owner_id = owners.owner_id",
                            pets()),
                  SqlResolutionError);
  CHECK_THROWS_AS(
      parse_sql("SELECT a.name FROM pets a JOIN pets b ON a.pet_id = b.pet_id",
                pets()),
      SqlUnsupportedError);
}

TEST_CASE("parse is deterministic") {
  std::string q = "SELECT count(*) FROM pets WHERE weight > 10";
  CHECK(parse_sql(q, pets()) == parse_sql(q, pets()));
}

TEST_CASE("anonymize blanks identifiers but keeps structure") {
  auto tree = parse_sql("SELECT name FROM pets", pets());
  auto anon = anonymize(tree);
  CHECK(anon.node_count() == tree.node_count());
  CHECK(anon.root.children[0].label() == "COLUMN");
  CHECK(anon.root.children[1].label() == "TABLE");
  CHECK(anonymize(anon) == anon);  // idempotent
}

TEST_CASE("queries differing only in identifiers and literals anonymize equal") {
  auto t1 = anonymize(parse_sql("SELECT name FROM pets WHERE weight > 1", pets()));
  auto t2 = anonymize(
      parse_sql("SELECT title FROM concerts WHERE year > 9", fixtures::concerts_schema()));
  CHECK(t1 == t2);
}

TEST_CASE("literal kind survives anonymization") {
  auto num = anonymize(parse_sql("SELECT name FROM pets WHERE weight > 5", pets()));
  auto str = anonymize(parse_sql("SELECT weight FROM pets WHERE name = 'x'", pets()));
  CHECK(num != str);
}

TEST_CASE("emit_sql round-trips at tree level") {
  auto schema = pets();
  for (const char* q : {
           "SELECT name FROM pets",
           "SELECT count(*) FROM pets WHERE weight > 10",
           "SELECT DISTINCT age FROM pets ORDER BY age DESC LIMIT 3",
           "SELECT age, count(*) FROM pets GROUP BY age HAVING count(*) > 1",
           "SELECT name FROM pets WHERE owner_id IN (SELECT owner_id FROM owners)",
           "SELECT name FROM pets WHERE weight BETWEEN 5 AND 20",
           "SELECT name FROM pets WHERE name LIKE '%x%'",
           "SELECT pets.name FROM pets JOIN owners ON pets.owner_id = owners.owner_id",
       }) {
    CAPTURE(q);
    auto tree = parse_sql(q, schema);
    auto emitted = emit_sql(tree);
    CHECK(parse_sql(emitted, schema) == tree);
  }
}

TEST_CASE("compound emit contains UNION and round-trips") {
  auto schema = fixtures::concerts_schema();
  auto tree =
      parse_sql("SELECT title FROM concerts UNION SELECT name FROM singers", schema);
  auto emitted = emit_sql(tree);
  CHECK(emitted.find("UNION") != std::string::npos);
  CHECK(parse_sql(emitted, schema) == tree);
}

TEST_CASE("emit rejects anonymized trees") {
  auto tree = anonymize(parse_sql("SELECT name FROM pets", pets()));
  CHECK_THROWS_AS(emit_sql(tree), SqlError);
}

TEST_CASE("constant replacement changes exactly the literal") {
  auto dir = fixtures::temp_dir("algebra_replace");
  fixtures::create_pets_sqlite(dir + "/pets.sqlite");
  SqliteDb db(dir + "/pets.sqlite");

  auto tree = parse_sql("SELECT name FROM pets WHERE weight > 10", pets());
  auto sites = find_constants(tree);
  REQUIRE(sites.size() == 1);
  CHECK(sites[0].column == "pets.weight");
  CHECK(sites[0].value == "10");
  CHECK(sites[0].numeric);

  replace_constant(tree, sites[0].path, "12");
  auto emitted = emit_sql(tree);
  CHECK(emitted.find("12") != std::string::npos);
  CHECK(db.query(emitted).ok);
  CHECK(db.query("SELECT name FROM pets WHERE weight > 10").ok);
}

TEST_CASE("unsupported constructs fail loudly") {
  CHECK_THROWS_AS(
      parse_sql("SELECT name FROM (SELECT name FROM pets)", pets()),
      SqlUnsupportedError);
}
