#include "doctest.h"
#include "fixtures.hpp"
#include "reformer/templating.hpp"

using namespace reformer;

namespace {

const CommonVocabulary& vocab() {
  static CommonVocabulary v =
      build_common_vocabulary(fixtures::corpus(), fixtures::catalog());
  return v;
}

}  // namespace

TEST_CASE("vocabulary fractions count databases, not occurrences") {
  const auto& v = vocab();
  CHECK(v.schema_count == 3);
  CHECK(v.fraction("what") == doctest::Approx(1.0));
  CHECK(v.fraction("the") == doctest::Approx(1.0));
  // "name" appears in pets_db and schools_db questions only
  CHECK(v.fraction("name") == doctest::Approx(2.0 / 3.0));
  // "weight" appears only in pets_db, no matter how often
  CHECK(v.fraction("weight") == doctest::Approx(1.0 / 3.0));
  CHECK(v.fraction("zebra") == 0.0);
  // punctuation never enters the vocabulary
  CHECK(v.fraction("?") == 0.0);
}

TEST_CASE("masking keeps common words and masks schema-specific ones") {
  auto tpl = mask_schema_tokens("What is the title of each concert ?", vocab());
  CHECK(tpl.text() == "What is the MASK of each MASK ?");
  CHECK(tpl.mask_count() == 2);
}

TEST_CASE("adjacent masked words collapse to a single MASK") {
  auto tpl = mask_schema_tokens("What is the average weight of pets ?", vocab());
  CHECK(tpl.text() == "What is the MASK of MASK ?");
}

TEST_CASE("numbers are always masked, punctuation never") {
  auto tpl = mask_schema_tokens("What is the name of 5 pets ?", vocab());
  // "5 pets" is one masked run; "name" clears the 0.5 threshold (2/3)
  CHECK(tpl.text() == "What is the name of MASK ?");
  CHECK(tpl.tokens.back() == "?");
}

TEST_CASE("kept tokens preserve their original casing") {
  auto tpl = mask_schema_tokens("WHAT is THE name of each student ?", vocab());
  CHECK(tpl.tokens[0] == "WHAT");
  CHECK(tpl.tokens[2] == "THE");
}

TEST_CASE("boundary fraction is masked under a strict threshold") {
  CommonVocabulary v;
  v.schema_count = 2;
  v.keep_threshold = 0.5;
  v.fractions = {{"half", 0.5}, {"all", 1.0}};
  auto tpl = mask_schema_tokens("all half", v);
  CHECK(tpl.text() == "all MASK");
}

TEST_CASE("empty questions are rejected") {
  CHECK_THROWS(mask_schema_tokens("   ", vocab()));
}

TEST_CASE("vocabulary round-trips through save and load") {
  auto dir = fixtures::temp_dir("vocab_io");
  const auto& v = vocab();
  v.save(dir + "/vocab.json");
  auto loaded = CommonVocabulary::load(dir + "/vocab.json");
  CHECK(loaded.schema_count == v.schema_count);
  CHECK(loaded.keep_threshold == v.keep_threshold);
  CHECK(loaded.fractions == v.fractions);
}
