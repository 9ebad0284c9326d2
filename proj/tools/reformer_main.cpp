#include <chrono>
#include <iostream>

#include "CLI11.hpp"
#include "reformer/pipeline.hpp"

using namespace reformer;

namespace {

struct Overrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<double> lambda;
  std::optional<double> ted;
  std::optional<double> fraction;
  std::optional<int> top_k;
  std::optional<std::string> dataset_out;
  std::optional<std::string> audit_out;
  std::optional<std::string> summary_out;
  std::optional<std::string> cache_root;
};

void add_common(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("-c,--config", ov.config_path, "Run configuration (JSON)")
      ->required();
  cmd->add_option("--seed", ov.seed, "Override the config seed");
  cmd->add_option("--lambda", ov.lambda, "Override the validation threshold");
  cmd->add_option("--ted-threshold", ov.ted, "Override the retrieval distance threshold");
  cmd->add_option("--fraction", ov.fraction, "Override the perturbation fraction");
  cmd->add_option("--top-k", ov.top_k, "Override the per-query acceptance cap");
  cmd->add_option("--dataset", ov.dataset_out, "Override the dataset output path");
  cmd->add_option("--audit", ov.audit_out, "Override the audit output path");
  cmd->add_option("--summary", ov.summary_out, "Override the summary output path");
  cmd->add_option("--cache-root", ov.cache_root, "Override the response cache root");
}

int execute(const std::string& strategy, const Overrides& ov) {
  RunConfig cfg;
  try {
    cfg = RunConfig::from_file(ov.config_path);
    cfg.strategy = strategy;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.lambda) cfg.lambda = *ov.lambda;
    if (ov.ted) cfg.ted_threshold = *ov.ted;
    if (ov.fraction) cfg.fraction = *ov.fraction;
    if (ov.top_k) cfg.top_k = *ov.top_k;
    if (ov.dataset_out) cfg.dataset_out = *ov.dataset_out;
    if (ov.audit_out) cfg.audit_out = *ov.audit_out;
    if (ov.summary_out) cfg.summary_out = *ov.summary_out;
    if (ov.cache_root) cfg.cache_root = *ov.cache_root;
    cfg.validate();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  try {
    auto start = std::chrono::steady_clock::now();
    RunSummary s = run_pipeline(cfg);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
    std::cout << "run " << s.run_id << ": emitted=" << s.emitted
              << " rejected=" << s.rejected << " skipped=" << s.skipped
              << " failures=" << s.failures
              << " acceptance_rate=" << s.acceptance_rate << " (" << elapsed
              << " ms)\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-to-SQL data synthesis: retrieve-and-edit generation, "
               "paraphrasing, crafted SQL, constant perturbation, evaluation"};
  app.require_subcommand(1);

  const std::map<std::string, std::string> descriptions = {
      {"reformer", "Generate questions for new SQL via retrieve-and-edit templates"},
      {"paraphrase", "Paraphrase existing questions with schema context"},
      {"craft", "Fill SQL templates against each schema and describe the results"},
      {"perturb", "Swap query constants for other values from the same column"},
      {"evaluate", "Score a generated dataset with BLEU and self-BLEU"},
  };
  std::map<std::string, Overrides> overrides;
  for (const auto& [strategy, description] : descriptions) {
    auto* cmd = app.add_subcommand(strategy, description);
    add_common(cmd, overrides[strategy]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  for (auto* sub : app.get_subcommands()) {
    return execute(sub->get_name(), overrides[sub->get_name()]);
  }
  return 2;
}
