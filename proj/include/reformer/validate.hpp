#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reformer/llm.hpp"

namespace reformer {

enum class Provenance { Reformer, ParaphraseSchema, ParaphraseCrafted };

std::string provenance_name(Provenance p);

struct Explanation {
  std::string text;
  std::string role;  // "for_fill" or "for_validate"
  std::string source_query;
};

struct CandidateQuestion {
  std::string question;
  std::string query;
  std::string db_id;
  Provenance provenance = Provenance::Reformer;
  std::string template_text;     // empty for paraphrase strategies
  std::string explanation_text;  // expl1 / description used to produce it
  std::optional<double> similarity;
};

struct ValidationVerdict {
  CandidateQuestion candidate;
  double similarity = 0.0;
  bool accepted = false;
  bool errored = false;
  std::string error;
  int rank = 0;  // 1..k among accepted for the same source query
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

// Question-query-question cycle consistency: each candidate is scored as
// cosine(embed(expl2), embed(candidate.question)); accepted iff
// similarity >= lambda, then capped at the top k by similarity (ties by
// input order). Rejected verdicts are kept for audit.
std::vector<ValidationVerdict> cycle_validate(const std::string& query,
                                              std::vector<CandidateQuestion> candidates,
                                              const Explanation& expl2,
                                              Provider& provider, double lambda = 0.85,
                                              int k = 5);

}  // namespace reformer
