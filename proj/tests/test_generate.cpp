#include "doctest.h"
#include "fixtures.hpp"
#include "reformer/generate.hpp"

using namespace reformer;

namespace {

struct Env {
  StubProvider provider;
  PromptCatalog prompts = PromptCatalog::defaults();
  SchemaCatalog catalog = fixtures::catalog();
  RetrievalIndex index = RetrievalIndex::build(fixtures::corpus(), fixtures::catalog());
  CommonVocabulary vocab =
      build_common_vocabulary(fixtures::corpus(), fixtures::catalog());
};

}  // namespace

TEST_CASE("explanations pick the template for their role and truncate to one sentence") {
  Env env;
  auto e1 = get_explanation("SELECT name FROM pets", "for_fill", nullptr, env.provider,
                            env.prompts);
  CHECK(e1.role == "for_fill");
  CHECK(e1.text == "return the name of the pets table");
  CHECK(e1.source_query == "SELECT name FROM pets");

  auto e2 = get_explanation("SELECT name FROM pets", "for_validate", nullptr,
                            env.provider, env.prompts);
  CHECK(e2.role == "for_validate");

  CHECK_THROWS_AS(get_explanation("SELECT 1", "for_banana", nullptr, env.provider,
                                  env.prompts),
                  LlmError);
}

TEST_CASE("an in-context shot reaches the rendered prompt") {
  Env env;
  ExamplePair shot{"How many pets are there ?", "SELECT count(*) FROM pets", "pets_db"};
  auto bundle = env.prompts.render(
      "explain_for_fill",
      {{"query", "SELECT name FROM pets"},
       {"shot", "Question: " + shot.question + "\nQuery: " + shot.query + "\n"}});
  CHECK(bundle.rendered.find("How many pets are there ?") != std::string::npos);
  // and get_explanation still works when a shot is supplied
  auto e = get_explanation("SELECT name FROM pets", "for_fill", &shot, env.provider,
                           env.prompts);
  CHECK(!e.text.empty());
}

TEST_CASE("fill_template fills masks and keeps the anchors in order") {
  Env env;
  QuestionTemplate tpl = mask_schema_tokens("What is the title of each concert ?",
                                            env.vocab);
  tpl.source = {"What is the title of each concert ?", "SELECT title FROM concerts",
                "concerts_db"};
  Explanation expl{"return the name of the pets table", "for_fill",
                   "SELECT name FROM pets"};
  auto cand = fill_template(tpl, expl, env.provider, env.prompts);
  CHECK(cand.question == "What is the name of each pets ?");
  CHECK(cand.query == "SELECT name FROM pets");
  CHECK(cand.provenance == Provenance::Reformer);
  CHECK(cand.template_text == tpl.text());
  CHECK(cand.explanation_text == expl.text);
}

TEST_CASE("fill_template rejects outputs that retain a MASK") {
  Env env;
  // explanation offers no usable words, so the stub leaves the MASK in place
  QuestionTemplate tpl;
  tpl.tokens = {"What", "is", "the", "MASK", "of", "the", "MASK", "?"};
  Explanation expl{"return the the of", "for_fill", "SELECT 1"};
  CHECK_THROWS_AS(fill_template(tpl, expl, env.provider, env.prompts),
                  FillContractError);
}

TEST_CASE("fill_template requires a for_fill explanation and a nonempty template") {
  Env env;
  QuestionTemplate tpl;
  tpl.tokens = {"What", "?"};
  Explanation wrong{"text", "for_validate", "q"};
  CHECK_THROWS_AS(fill_template(tpl, wrong, env.provider, env.prompts), LlmError);
  QuestionTemplate empty;
  Explanation right{"text", "for_fill", "q"};
  CHECK_THROWS_AS(fill_template(empty, right, env.provider, env.prompts), LlmError);
}

TEST_CASE("reformer_augment produces validated candidates end to end") {
  Env env;
  auto result = reformer_augment({"SELECT weight FROM pets"},
                                 env.catalog.at("pets_db"), "pets_db", env.index,
                                 env.vocab, env.provider, env.prompts);
  CHECK(!result.verdicts.empty());
  CHECK(result.skipped_queries.empty());
  for (const auto& cand : result.accepted) {
    CHECK(cand.query == "SELECT weight FROM pets");
    CHECK(cand.db_id == "pets_db");
    CHECK(cand.provenance == Provenance::Reformer);
    CHECK(cand.question.find("MASK") == std::string::npos);
    REQUIRE(cand.similarity.has_value());
    CHECK(*cand.similarity >= 0.85);
  }
  // every accepted candidate also appears among the verdicts
  size_t accepted_verdicts = 0;
  for (const auto& v : result.verdicts)
    if (v.accepted) ++accepted_verdicts;
  CHECK(accepted_verdicts == result.accepted.size());
}

TEST_CASE("queries with no structural neighbour are skipped, not failed") {
  Env env;
  auto result = reformer_augment(
      {"SELECT name FROM pets WHERE weight > 10 ORDER BY age DESC LIMIT 3"},
      env.catalog.at("pets_db"), "pets_db", env.index, env.vocab, env.provider,
      env.prompts);
  CHECK(result.accepted.empty());
  REQUIRE(result.skipped_queries.size() == 1);
  CHECK(result.failures.empty());
}

TEST_CASE("unparseable new queries are reported as failures") {
  Env env;
  auto result = reformer_augment({"SELECT FROM WHERE"}, env.catalog.at("pets_db"),
                                 "pets_db", env.index, env.vocab, env.provider,
                                 env.prompts);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].first == "SELECT FROM WHERE");
  CHECK(result.accepted.empty());
}

TEST_CASE("the whole augmentation is deterministic") {
  Env env;
  auto a = reformer_augment({"SELECT weight FROM pets"}, env.catalog.at("pets_db"),
                            "pets_db", env.index, env.vocab, env.provider, env.prompts);
  auto b = reformer_augment({"SELECT weight FROM pets"}, env.catalog.at("pets_db"),
                            "pets_db", env.index, env.vocab, env.provider, env.prompts);
  REQUIRE(a.accepted.size() == b.accepted.size());
  for (size_t i = 0; i < a.accepted.size(); ++i) {
    CHECK(a.accepted[i].question == b.accepted[i].question);
    CHECK(a.accepted[i].similarity == b.accepted[i].similarity);
  }
}
