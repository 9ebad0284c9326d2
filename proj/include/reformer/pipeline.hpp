#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "reformer/llm.hpp"

namespace reformer {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string strategy;  // reformer | paraphrase | craft | perturb | evaluate

  std::string train_path;
  std::string tables_path;
  std::string db_root;
  std::string new_queries_path;     // reformer input
  std::string category_split_path;  // optional
  std::string dataset_in_path;      // evaluate input

  double ted_threshold = 0.1;
  double lambda = 0.85;
  double paraphrase_lambda = 0.9;
  double vocab_threshold = 0.5;
  double fraction = 0.7;
  int top_k = 5;
  int paraphrase_n = 3;
  bool validate_crafted = false;
  bool drop_empty_results = false;

  std::string provider_kind = "stub";  // stub | http
  HttpProviderConfig http;

  uint64_t seed = 0;
  std::string cache_root;
  std::string prompts_dir;        // optional prompt overrides
  std::string sql_templates_path; // optional template pack override

  std::string dataset_out;
  std::string audit_out;
  std::string summary_out;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_json_text(const std::string& text);
  void validate() const;  // throws ConfigError naming the offending field
};

struct RunSummary {
  std::string run_id;
  size_t emitted = 0;
  size_t rejected = 0;
  size_t skipped = 0;
  size_t failures = 0;
  double acceptance_rate = 0.0;
};

// Executes the configured strategy and writes dataset/audit/summary
// artifacts. Per-item rejections never fail the run.
RunSummary run_pipeline(const RunConfig& config);

}  // namespace reformer
