#include <algorithm>
#include <fstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "reformer/perturb.hpp"

using namespace reformer;

namespace {

std::vector<ExamplePair> constant_corpus() {
  std::vector<ExamplePair> out;
  const char* queries[] = {
      "SELECT name FROM pets WHERE weight > 10",
      "SELECT name FROM pets WHERE age = 2",
      "SELECT count(*) FROM pets WHERE weight < 15",
      "SELECT name FROM pets WHERE name = 'Rex'",
      "SELECT name FROM pets WHERE owner_id = 1",
      "SELECT name FROM pets WHERE age > 2",
      "SELECT name FROM pets WHERE weight >= 12",
      "SELECT name FROM pets WHERE age <= 3",
      "SELECT count(*) FROM pets WHERE name = 'Bella'",
      "SELECT name FROM pets WHERE weight = 15",
  };
  int i = 0;
  for (const char* q : queries)
    out.push_back({"question " + std::to_string(i++) + " ?", q, "pets_db"});
  return out;
}

std::string fixture_db_root(const std::string& tag) {
  auto dir = fixtures::temp_dir(tag);
  std::filesystem::create_directories(dir + "/pets_db");
  fixtures::create_pets_sqlite(dir + "/pets_db/pets_db.sqlite");
  return dir;
}

}  // namespace

TEST_CASE("perturbation selects floor(fraction * N) queries") {
  auto root = fixture_db_root("perturb_select");
  auto examples = constant_corpus();
  auto [out, report] = replace_constants(examples, fixtures::catalog(), root,
                                         {0.7, 42});
  CHECK(report.total == 10);
  CHECK(report.selected == 7);
  CHECK(out.size() == examples.size());

  size_t altered = 0;
  for (size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].question == examples[i].question);  // questions never change
    if (out[i].query != examples[i].query) ++altered;
  }
  CHECK(altered == report.altered);
  CHECK(report.altered + report.passthroughs.size() == report.selected);
}

TEST_CASE("altered queries still parse, execute, and keep their shape") {
  auto root = fixture_db_root("perturb_shape");
  auto examples = constant_corpus();
  auto [out, report] = replace_constants(examples, fixtures::catalog(), root,
                                         {1.0, 7});
  CHECK(report.altered > 0);
  SqliteDb db(root + "/pets_db/pets_db.sqlite");
  auto schema = fixtures::pets_schema();
  for (size_t i = 0; i < out.size(); ++i) {
    if (out[i].query == examples[i].query) continue;
    CAPTURE(out[i].query);
    auto tree = parse_sql(out[i].query, schema);
    CHECK(db.query(out[i].query).ok);
    // only the literal changed: anonymized structure is identical
    CHECK(anonymize(tree) == anonymize(parse_sql(examples[i].query, schema)));
  }
}

TEST_CASE("replacement values come from the same database column") {
  auto root = fixture_db_root("perturb_values");
  auto examples = constant_corpus();
  auto [out, report] = replace_constants(examples, fixtures::catalog(), root,
                                         {1.0, 3});
  SqliteDb db(root + "/pets_db/pets_db.sqlite");
  for (const auto& c : report.changes) {
    CHECK(c.new_value != c.old_value);
    auto dot = c.column.find('.');
    auto values = db.distinct_values(c.column.substr(0, dot), c.column.substr(dot + 1));
    CHECK(std::find(values.begin(), values.end(), c.new_value) != values.end());
  }
}

TEST_CASE("the same seed reproduces the run exactly") {
  auto root = fixture_db_root("perturb_seed");
  auto examples = constant_corpus();
  auto [out1, r1] = replace_constants(examples, fixtures::catalog(), root, {0.7, 99});
  auto [out2, r2] = replace_constants(examples, fixtures::catalog(), root, {0.7, 99});
  CHECK(out1 == out2);
  CHECK(r1.altered == r2.altered);
  REQUIRE(r1.changes.size() == r2.changes.size());
  for (size_t i = 0; i < r1.changes.size(); ++i) {
    CHECK(r1.changes[i].new_value == r2.changes[i].new_value);
  }
  auto [out3, r3] = replace_constants(examples, fixtures::catalog(), root, {0.7, 100});
  bool identical = out1 == out3;
  CHECK(!identical);  // a different seed perturbs differently
}

TEST_CASE("queries without constants pass through with a reason") {
  auto root = fixture_db_root("perturb_noconst");
  std::vector<ExamplePair> examples = {
      {"all names ?", "SELECT name FROM pets", "pets_db"}};
  auto [out, report] = replace_constants(examples, fixtures::catalog(), root, {1.0, 1});
  CHECK(report.altered == 0);
  REQUIRE(report.passthroughs.size() == 1);
  CHECK(report.passthroughs[0].second == "no constants");
  CHECK(out[0].query == examples[0].query);
}

TEST_CASE("missing databases and fraction zero are handled") {
  auto examples = constant_corpus();
  auto [out, report] = replace_constants(examples, fixtures::catalog(),
                                         "/nonexistent_db_root", {1.0, 1});
  CHECK(report.altered == 0);
  CHECK(report.passthroughs.size() == report.selected);

  auto root = fixture_db_root("perturb_zero");
  auto [out2, r2] = replace_constants(examples, fixtures::catalog(), root, {0.0, 1});
  CHECK(r2.selected == 0);
  CHECK(out2 == examples);

  CHECK_THROWS_AS(replace_constants(examples, fixtures::catalog(), root, {1.5, 1}),
                  std::invalid_argument);
}

TEST_CASE("reports serialize with their changes and passthroughs") {
  auto root = fixture_db_root("perturb_report");
  auto examples = constant_corpus();
  auto [out, report] = replace_constants(examples, fixtures::catalog(), root, {0.7, 5});
  auto path = fixtures::temp_dir("perturb_report_out") + "/report.json";
  save_report(report, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  CHECK(text.find("\"selected\": 7") != std::string::npos);
  CHECK(text.find("\"changes\"") != std::string::npos);
}
