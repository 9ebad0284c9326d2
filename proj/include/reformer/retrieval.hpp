#pragma once

#include <vector>

#include "reformer/algebra.hpp"
#include "reformer/corpus.hpp"
#include "reformer/ted.hpp"

namespace reformer {

struct IndexEntry {
  ExamplePair pair;
  AlgebraTree tree;  // anonymized
  int node_count = 0;
};

struct RetrievalHit {
  ExamplePair pair;
  double distance = 0.0;
  size_t index_pos = 0;
};

class RetrievalIndex {
 public:
  // Pairs whose SQL fails to parse are quarantined with a reason instead
  // of aborting the build.
  static RetrievalIndex build(const std::vector<ExamplePair>& examples,
                              const SchemaCatalog& catalog);

  const std::vector<IndexEntry>& entries() const { return entries_; }
  const std::vector<std::pair<ExamplePair, std::string>>& quarantined() const {
    return quarantined_;
  }

  void add(ExamplePair pair, const AlgebraTree& anonymized_tree);

 private:
  std::vector<IndexEntry> entries_;
  std::vector<std::pair<ExamplePair, std::string>> quarantined_;
};

// All entries with normalized_distance < threshold, ascending by distance,
// ties by index order, capped at max_hits.
std::vector<RetrievalHit> get_related_queries(const AlgebraTree& query,
                                              const RetrievalIndex& index,
                                              double threshold = 0.1,
                                              size_t max_hits = 10);

}  // namespace reformer
