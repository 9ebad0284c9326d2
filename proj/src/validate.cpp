#include "reformer/validate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reformer {

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::Reformer: return "reformer";
    case Provenance::ParaphraseSchema: return "paraphrase_schema";
    case Provenance::ParaphraseCrafted: return "paraphrase_crafted";
  }
  return "?";
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension())
    throw std::invalid_argument("cosine_similarity: dimension mismatch (" +
                                std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()) + ")");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("cosine_similarity: zero vector");
  double s = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(s, -1.0, 1.0);
}

std::vector<ValidationVerdict> cycle_validate(const std::string& query,
                                              std::vector<CandidateQuestion> candidates,
                                              const Explanation& expl2,
                                              Provider& provider, double lambda,
                                              int k) {
  (void)query;
  if (expl2.role != "for_validate")
    throw std::invalid_argument("cycle_validate requires a for_validate explanation");
  if (lambda <= 0.0 || lambda > 1.0)
    throw std::invalid_argument("lambda must be in (0,1]");
  if (k < 1) throw std::invalid_argument("k must be >= 1");

  EmbeddingVector ref = provider.embed(expl2.text);
  std::vector<ValidationVerdict> verdicts;
  verdicts.reserve(candidates.size());
  for (auto& cand : candidates) {
    ValidationVerdict v;
    try {
      EmbeddingVector e = provider.embed(cand.question);
      v.similarity = cosine_similarity(ref, e);
      v.accepted = v.similarity >= lambda;
      cand.similarity = v.similarity;
    } catch (const std::exception& e) {
      v.errored = true;
      v.error = e.what();
      v.accepted = false;
    }
    v.candidate = std::move(cand);
    verdicts.push_back(std::move(v));
  }

  // Cap accepted at top-k by similarity, ties broken by input order.
  std::vector<size_t> accepted_idx;
  for (size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i].accepted) accepted_idx.push_back(i);
  }
  std::stable_sort(accepted_idx.begin(), accepted_idx.end(), [&](size_t a, size_t b) {
    return verdicts[a].similarity > verdicts[b].similarity;
  });
  for (size_t r = 0; r < accepted_idx.size(); ++r) {
    if (r < static_cast<size_t>(k)) {
      verdicts[accepted_idx[r]].rank = static_cast<int>(r + 1);
    } else {
      verdicts[accepted_idx[r]].accepted = false;
    }
  }
  return verdicts;
}

}  // namespace reformer
