#include "reformer/retrieval.hpp"

#include <algorithm>
#include <cmath>

namespace reformer {

RetrievalIndex RetrievalIndex::build(const std::vector<ExamplePair>& examples,
                                     const SchemaCatalog& catalog) {
  RetrievalIndex index;
  for (const auto& ex : examples) {
    auto it = catalog.find(ex.db_id);
    if (it == catalog.end()) {
      index.quarantined_.emplace_back(ex, "unknown db_id '" + ex.db_id + "'");
      continue;
    }
    try {
      AlgebraTree tree = anonymize(parse_sql(ex.query, it->second));
      index.add(ex, tree);
    } catch (const SqlError& e) {
      index.quarantined_.emplace_back(ex, e.what());
    }
  }
  return index;
}

void RetrievalIndex::add(ExamplePair pair, const AlgebraTree& anonymized_tree) {
  entries_.push_back({std::move(pair), anonymized_tree, anonymized_tree.node_count()});
}

std::vector<RetrievalHit> get_related_queries(const AlgebraTree& query,
                                              const RetrievalIndex& index,
                                              double threshold, size_t max_hits) {
  const int qn = query.node_count();
  std::vector<RetrievalHit> hits;
  const auto& entries = index.entries();
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    // |size difference| / (size sum) lower-bounds the normalized TED.
    double bound = std::abs(qn - e.node_count) /
                   static_cast<double>(qn + e.node_count);
    if (bound >= threshold) continue;
    double d = normalized_distance(query, e.tree);
    if (d < threshold) hits.push_back({e.pair, d, i});
  }
  std::stable_sort(hits.begin(), hits.end(),
                   [](const RetrievalHit& a, const RetrievalHit& b) {
                     return a.distance < b.distance;
                   });
  if (hits.size() > max_hits) hits.resize(max_hits);
  return hits;
}

}  // namespace reformer
