#pragma once

#include <map>
#include <string>
#include <vector>

#include "reformer/corpus.hpp"

namespace reformer {

inline constexpr const char* kMaskToken = "MASK";

// Word -> fraction of databases whose questions contain the word.
struct CommonVocabulary {
  std::map<std::string, double> fractions;  // keys lowercased
  int schema_count = 0;
  double keep_threshold = 0.5;

  double fraction(const std::string& lowercased_word) const {
    auto it = fractions.find(lowercased_word);
    return it == fractions.end() ? 0.0 : it->second;
  }

  void save(const std::string& path) const;
  static CommonVocabulary load(const std::string& path);
};

struct QuestionTemplate {
  std::vector<std::string> tokens;  // literal words or kMaskToken
  ExamplePair source;
  double source_distance = 0.0;

  std::string text() const;
  int mask_count() const;
};

CommonVocabulary build_common_vocabulary(const std::vector<ExamplePair>& examples,
                                         const SchemaCatalog& catalog,
                                         double threshold = 0.5);

QuestionTemplate mask_schema_tokens(const std::string& question,
                                    const CommonVocabulary& vocab);

}  // namespace reformer
