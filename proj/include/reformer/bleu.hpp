#pragma once

#include <string>
#include <vector>

namespace reformer {

// Sentence-level BLEU-4 scaled to [0,100]. Modified n-gram precisions
// (n=1..4) with add-one smoothing when an n>=2 precision has zero matches,
// geometric mean, times brevity penalty. Tokenization is shared with the
// question templating (lowercase, punctuation split off).
double bleu(const std::string& candidate, const std::vector<std::string>& references);

// Mean over members of bleu(member, rest). Lower means more diverse.
double self_bleu(const std::vector<std::string>& set);

struct QualityReport {
  struct PerQuery {
    std::string query;
    double best_bleu = 0.0;
    size_t candidate_count = 0;
  };
  std::vector<PerQuery> per_query;
  double mean_best_bleu = 0.0;
  double mean_self_bleu = 0.0;
  double diversity = 0.0;  // 100 - mean_self_bleu
};

// candidate_sets[i] is S(q) for gold_questions[i].
QualityReport quality_report(const std::vector<std::string>& gold_questions,
                             const std::vector<std::string>& queries,
                             const std::vector<std::vector<std::string>>& candidate_sets);

}  // namespace reformer
