#include "reformer/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "reformer/text.hpp"

namespace reformer {

namespace {

std::vector<std::string> bleu_tokens(const std::string& s) {
  std::vector<std::string> toks = tokenize(s);
  for (auto& t : toks) t = to_lower(t);
  return toks;
}

std::map<std::vector<std::string>, int> ngram_counts(
    const std::vector<std::string>& toks, size_t n) {
  std::map<std::vector<std::string>, int> counts;
  if (toks.size() < n) return counts;
  for (size_t i = 0; i + n <= toks.size(); ++i) {
    counts[std::vector<std::string>(toks.begin() + i, toks.begin() + i + n)]++;
  }
  return counts;
}

}  // namespace

double bleu(const std::string& candidate, const std::vector<std::string>& references) {
  if (trim(candidate).empty() || references.empty())
    throw std::runtime_error("bleu requires a candidate and at least one reference");

  std::vector<std::string> cand = bleu_tokens(candidate);
  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const auto& r : references) {
    if (trim(r).empty()) throw std::runtime_error("bleu reference is empty");
    refs.push_back(bleu_tokens(r));
  }

  double log_sum = 0.0;
  for (size_t n = 1; n <= 4; ++n) {
    auto cand_counts = ngram_counts(cand, n);
    long long total = 0;
    for (const auto& [_, c] : cand_counts) total += c;
    long long matches = 0;
    for (const auto& [gram, c] : cand_counts) {
      int best_ref = 0;
      for (const auto& r : refs) {
        auto rc = ngram_counts(r, n);
        auto it = rc.find(gram);
        if (it != rc.end()) best_ref = std::max(best_ref, it->second);
      }
      matches += std::min<long long>(c, best_ref);
    }
    double p;
    if (n == 1) {
      if (total == 0 || matches == 0) return 0.0;
      p = static_cast<double>(matches) / total;
    } else if (matches == 0) {
      p = 1.0 / (total + 1);  // add-one smoothing on zero counts
    } else {
      p = static_cast<double>(matches) / total;
    }
    log_sum += std::log(p);
  }
  double geo = std::exp(log_sum / 4.0);

  // Brevity penalty against the closest reference length (shorter on tie).
  size_t c_len = cand.size();
  size_t best_len = refs[0].size();
  for (const auto& r : refs) {
    auto diff = [&](size_t l) {
      return l > c_len ? l - c_len : c_len - l;
    };
    if (diff(r.size()) < diff(best_len) ||
        (diff(r.size()) == diff(best_len) && r.size() < best_len)) {
      best_len = r.size();
    }
  }
  double bp = c_len >= best_len
                  ? 1.0
                  : std::exp(1.0 - static_cast<double>(best_len) / c_len);
  return 100.0 * bp * geo;
}

double self_bleu(const std::vector<std::string>& set) {
  if (set.size() < 2)
    throw std::runtime_error("self_bleu requires at least two members");
  double sum = 0.0;
  for (size_t i = 0; i < set.size(); ++i) {
    std::vector<std::string> rest;
    for (size_t j = 0; j < set.size(); ++j) {
      if (j != i) rest.push_back(set[j]);
    }
    sum += bleu(set[i], rest);
  }
  return sum / set.size();
}

QualityReport quality_report(
    const std::vector<std::string>& gold_questions,
    const std::vector<std::string>& queries,
    const std::vector<std::vector<std::string>>& candidate_sets) {
  if (gold_questions.size() != candidate_sets.size() ||
      queries.size() != candidate_sets.size())
    throw std::runtime_error("quality_report: mismatched input lengths");
  QualityReport report;
  double best_sum = 0.0;
  double self_sum = 0.0;
  size_t self_count = 0;
  for (size_t i = 0; i < candidate_sets.size(); ++i) {
    const auto& set = candidate_sets[i];
    QualityReport::PerQuery pq;
    pq.query = queries[i];
    pq.candidate_count = set.size();
    for (const auto& cand : set) {
      pq.best_bleu = std::max(pq.best_bleu, bleu(cand, {gold_questions[i]}));
    }
    best_sum += pq.best_bleu;
    if (set.size() >= 2) {
      self_sum += self_bleu(set);
      ++self_count;
    }
    report.per_query.push_back(std::move(pq));
  }
  if (!candidate_sets.empty()) report.mean_best_bleu = best_sum / candidate_sets.size();
  if (self_count) report.mean_self_bleu = self_sum / self_count;
  report.diversity = 100.0 - report.mean_self_bleu;
  return report;
}

}  // namespace reformer
