#include "reformer/templating.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "reformer/text.hpp"

namespace reformer {

using nlohmann::json;

std::string QuestionTemplate::text() const { return join(tokens, " "); }

int QuestionTemplate::mask_count() const {
  int n = 0;
  for (const auto& t : tokens)
    if (t == kMaskToken) ++n;
  return n;
}

void CommonVocabulary::save(const std::string& path) const {
  json j;
  j["schema_count"] = schema_count;
  j["keep_threshold"] = keep_threshold;
  j["fractions"] = fractions;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write vocabulary file: " + path);
  out << j.dump(2) << "\n";
}

CommonVocabulary CommonVocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open vocabulary file: " + path);
  json j;
  in >> j;
  CommonVocabulary v;
  v.schema_count = j.at("schema_count").get<int>();
  v.keep_threshold = j.at("keep_threshold").get<double>();
  v.fractions = j.at("fractions").get<std::map<std::string, double>>();
  return v;
}

CommonVocabulary build_common_vocabulary(const std::vector<ExamplePair>& examples,
                                         const SchemaCatalog& catalog,
                                         double threshold) {
  if (examples.empty()) throw std::runtime_error("empty corpus for vocabulary build");
  (void)catalog;  // grouping is by db_id; the catalog is not needed for counts

  std::map<std::string, std::set<std::string>> words_per_db;
  std::set<std::string> dbs;
  for (const auto& ex : examples) {
    dbs.insert(ex.db_id);
    for (const auto& tok : tokenize(ex.question)) {
      if (is_punctuation_token(tok)) continue;
      words_per_db[to_lower(tok)].insert(ex.db_id);
    }
  }
  CommonVocabulary v;
  v.schema_count = static_cast<int>(dbs.size());
  v.keep_threshold = threshold;
  for (const auto& [word, present_in] : words_per_db) {
    v.fractions[word] =
        static_cast<double>(present_in.size()) / static_cast<double>(dbs.size());
  }
  return v;
}

QuestionTemplate mask_schema_tokens(const std::string& question,
                                    const CommonVocabulary& vocab) {
  if (trim(question).empty())
    throw std::runtime_error("cannot mask an empty question");
  QuestionTemplate tpl;
  for (const auto& tok : tokenize(question)) {
    bool keep;
    if (is_punctuation_token(tok)) {
      keep = true;
    } else if (is_number_token(tok)) {
      keep = false;  // numbers are constants; the fill step supplies them
    } else {
      keep = vocab.fraction(to_lower(tok)) > vocab.keep_threshold;
    }
    if (keep) {
      tpl.tokens.push_back(tok);
    } else if (tpl.tokens.empty() || tpl.tokens.back() != kMaskToken) {
      tpl.tokens.push_back(kMaskToken);
    }
  }
  return tpl;
}

}  // namespace reformer
