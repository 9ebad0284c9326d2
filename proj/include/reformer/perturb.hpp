#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "reformer/corpus.hpp"

namespace reformer {

struct PerturbationChange {
  size_t example_index = 0;
  std::string column;
  std::string old_value;
  std::string new_value;
};

struct PerturbationReport {
  size_t total = 0;
  size_t selected = 0;
  size_t altered = 0;
  std::vector<PerturbationChange> changes;
  std::vector<std::pair<size_t, std::string>> passthroughs;  // (index, reason)
};

struct PerturbConfig {
  double fraction = 0.7;
  uint64_t seed = 0;
};

// Replaces literal constants in a seeded uniform sample of
// floor(fraction * N) queries with other values drawn from the same
// database column. Altered queries must re-parse and execute; otherwise
// the original is kept and the failure reported.
std::pair<std::vector<ExamplePair>, PerturbationReport> replace_constants(
    const std::vector<ExamplePair>& examples, const SchemaCatalog& catalog,
    const std::string& db_root, const PerturbConfig& config);

void save_report(const PerturbationReport& report, const std::string& path);

}  // namespace reformer
