#pragma once

#include <string>
#include <vector>

#include "reformer/corpus.hpp"
#include "reformer/llm.hpp"
#include "reformer/sqlite_db.hpp"
#include "reformer/validate.hpp"

namespace reformer {

struct SqlTemplate {
  std::string shape;  // text with {table}, {column}, {agg}, {op}, {value} holes
  std::string tier;   // "basic" or "complex"
  std::vector<std::string> holes;

  static SqlTemplate from_shape(std::string shape, std::string tier);
};

// 12 basic + 8 complex shapes covering select/from/where/group by/order
// by/limit and in/union/except/intersect.
std::vector<SqlTemplate> default_sql_templates();
std::vector<SqlTemplate> load_sql_templates(const std::string& path);
void save_sql_templates(const std::vector<SqlTemplate>& templates,
                        const std::string& path);

struct CraftedQuery {
  std::string query;
  SqlTemplate source_template;
  std::string db_id;
  bool ok = false;
  std::string error;
  std::string description;
};

struct ParaphraseLog {
  std::vector<std::string> notes;
};

// Two-stage direct paraphrasing: extract related tables (hallucinated
// names dropped, empty extraction falls back to all tables), then request
// n paraphrases with the table/column context. Callers route the results
// through cycle_validate with the strategy's lambda.
std::vector<CandidateQuestion> paraphrase_with_schema(const ExamplePair& example,
                                                      const SchemaCatalog& catalog,
                                                      Provider& provider,
                                                      const PromptCatalog& prompts,
                                                      int n, ParaphraseLog* log = nullptr);

// Fill each template via the provider; keep only fills that parse and
// execute on the database. Failures are recorded, not thrown.
std::vector<CraftedQuery> craft_and_fill_sql(const DatabaseSchema& schema,
                                             const std::vector<SqlTemplate>& templates,
                                             Provider& provider,
                                             const PromptCatalog& prompts,
                                             const SqliteDb& db,
                                             int exec_timeout_ms = 5000);

std::vector<CandidateQuestion> describe_and_paraphrase(CraftedQuery& crafted,
                                                       Provider& provider,
                                                       const PromptCatalog& prompts,
                                                       int n);

}  // namespace reformer
