#pragma once

#include <string>
#include <vector>

#include "reformer/corpus.hpp"
#include "reformer/llm.hpp"
#include "reformer/retrieval.hpp"
#include "reformer/templating.hpp"
#include "reformer/validate.hpp"

namespace reformer {

struct FillContractError : LlmError {
  using LlmError::LlmError;
};

struct GenerateConfig {
  double ted_threshold = 0.1;
  double lambda = 0.85;
  int top_k = 5;
  size_t max_templates = 10;
  double temperature = 0.7;
};

Explanation get_explanation(const std::string& query, const std::string& role,
                            const ExamplePair* shot, Provider& provider,
                            const PromptCatalog& catalog, double temperature = 0.7);

// Throws FillContractError when the output retains a MASK or drops the
// template's literal anchors.
CandidateQuestion fill_template(const QuestionTemplate& tpl, const Explanation& expl,
                                Provider& provider, const PromptCatalog& catalog,
                                double temperature = 0.7);

struct AugmentResult {
  std::vector<CandidateQuestion> accepted;
  std::vector<ValidationVerdict> verdicts;  // full audit, rejections included
  std::vector<std::string> skipped_queries;  // no retrieval hit
  std::vector<std::pair<std::string, std::string>> failures;  // (query, reason)
};

AugmentResult reformer_augment(const std::vector<std::string>& new_queries,
                               const DatabaseSchema& schema, const std::string& db_id,
                               const RetrievalIndex& index,
                               const CommonVocabulary& vocab, Provider& provider,
                               const PromptCatalog& catalog,
                               const GenerateConfig& config = {});

}  // namespace reformer
