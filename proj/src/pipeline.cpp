#include "reformer/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "json.hpp"
#include "reformer/bleu.hpp"
#include "reformer/corpus.hpp"
#include "reformer/generate.hpp"
#include "reformer/paraphrase.hpp"
#include "reformer/perturb.hpp"
#include "reformer/text.hpp"

namespace reformer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

struct ArtifactWriter {
  std::ofstream dataset;
  std::ofstream audit;

  ArtifactWriter(const RunConfig& cfg) {
    auto open = [](std::ofstream& f, const std::string& path) {
      if (path.empty()) return;
      fs::path p(path);
      if (p.has_parent_path()) fs::create_directories(p.parent_path());
      f.open(path);
      if (!f) throw std::runtime_error("cannot write " + path);
    };
    open(dataset, cfg.dataset_out);
    open(audit, cfg.audit_out);
  }

  void record(const CandidateQuestion& cand, const std::string& run_id) {
    if (!dataset.is_open()) return;
    json j = {
        {"question", cand.question},
        {"query", cand.query},
        {"db_id", cand.db_id},
        {"provenance", provenance_name(cand.provenance)},
        {"run_id", run_id},
    };
    if (cand.similarity) j["similarity"] = *cand.similarity;
    if (!cand.template_text.empty()) j["template"] = cand.template_text;
    if (!cand.explanation_text.empty()) j["explanation"] = cand.explanation_text;
    dataset << j.dump() << "\n";
  }

  void event(json j) {
    if (audit.is_open()) audit << j.dump() << "\n";
  }
};

std::string compute_run_id(const RunConfig& cfg) {
  json j = {{"strategy", cfg.strategy}, {"seed", cfg.seed},
            {"lambda", cfg.lambda},     {"ted", cfg.ted_threshold},
            {"top_k", cfg.top_k},       {"fraction", cfg.fraction}};
  return hex_digest(j.dump()).substr(0, 12);
}

std::shared_ptr<Provider> make_provider(const RunConfig& cfg) {
  std::shared_ptr<Provider> base;
  if (cfg.provider_kind == "stub") {
    base = std::make_shared<StubProvider>();
  } else {
    base = std::make_shared<HttpProvider>(cfg.http);
  }
  if (!cfg.cache_root.empty()) {
    return std::make_shared<CachingProvider>(base, cfg.cache_root);
  }
  return base;
}

PromptCatalog make_catalog(const RunConfig& cfg) {
  if (!cfg.prompts_dir.empty()) return PromptCatalog::from_directory(cfg.prompts_dir);
  return PromptCatalog::defaults();
}

void write_summary(const RunConfig& cfg, const RunSummary& s, const json& extra) {
  if (cfg.summary_out.empty()) return;
  json j = {{"run_id", s.run_id},     {"strategy", cfg.strategy},
            {"emitted", s.emitted},   {"rejected", s.rejected},
            {"skipped", s.skipped},   {"failures", s.failures},
            {"acceptance_rate", s.acceptance_rate}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  fs::path p(cfg.summary_out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(cfg.summary_out);
  out << j.dump(2) << "\n";
  // human-readable companion
  std::ofstream txt(cfg.summary_out + ".txt");
  txt << "strategy:        " << cfg.strategy << "\n"
      << "run id:          " << s.run_id << "\n"
      << "emitted:         " << s.emitted << "\n"
      << "rejected:        " << s.rejected << "\n"
      << "skipped:         " << s.skipped << "\n"
      << "failures:        " << s.failures << "\n"
      << "acceptance rate: " << s.acceptance_rate << "\n";
}

RunSummary run_reformer(const RunConfig& cfg) {
  auto examples = load_examples(cfg.train_path);
  auto catalog = load_schemas(cfg.tables_path);
  auto provider = make_provider(cfg);
  auto prompts = make_catalog(cfg);

  RetrievalIndex index = RetrievalIndex::build(examples, catalog);
  CommonVocabulary vocab =
      build_common_vocabulary(examples, catalog, cfg.vocab_threshold);

  // New queries: JSON array of {query, db_id}.
  std::ifstream in(cfg.new_queries_path);
  if (!in) throw std::runtime_error("cannot open new queries: " + cfg.new_queries_path);
  json nq;
  in >> nq;
  std::map<std::string, std::vector<std::string>> by_db;
  for (const auto& entry : nq) {
    by_db[entry.at("db_id").get<std::string>()].push_back(
        entry.at("query").get<std::string>());
  }

  GenerateConfig gen_cfg;
  gen_cfg.ted_threshold = cfg.ted_threshold;
  gen_cfg.lambda = cfg.lambda;
  gen_cfg.top_k = cfg.top_k;

  ArtifactWriter writer(cfg);
  RunSummary summary;
  summary.run_id = compute_run_id(cfg);
  for (const auto& [pair, reason] : index.quarantined()) {
    writer.event({{"type", "quarantine"}, {"query", pair.query}, {"reason", reason}});
  }
  for (const auto& [db_id, queries] : by_db) {
    auto schema_it = catalog.find(db_id);
    if (schema_it == catalog.end()) {
      writer.event({{"type", "failure"}, {"db_id", db_id}, {"reason", "unknown db_id"}});
      summary.failures += queries.size();
      continue;
    }
    AugmentResult result = reformer_augment(queries, schema_it->second, db_id, index,
                                            vocab, *provider, prompts, gen_cfg);
    for (const auto& cand : result.accepted) {
      writer.record(cand, summary.run_id);
      summary.emitted += 1;
    }
    for (const auto& v : result.verdicts) {
      writer.event({{"type", "verdict"},
                    {"question", v.candidate.question},
                    {"query", v.candidate.query},
                    {"similarity", v.similarity},
                    {"accepted", v.accepted},
                    {"rank", v.rank}});
      if (!v.accepted) summary.rejected += 1;
    }
    for (const auto& q : result.skipped_queries) {
      writer.event({{"type", "skip"}, {"query", q}, {"reason", "no retrieval hit"}});
      summary.skipped += 1;
    }
    for (const auto& [q, reason] : result.failures) {
      writer.event({{"type", "failure"}, {"query", q}, {"reason", reason}});
      summary.failures += 1;
    }
  }
  size_t judged = summary.emitted + summary.rejected;
  summary.acceptance_rate =
      judged ? static_cast<double>(summary.emitted) / judged : 0.0;
  write_summary(cfg, summary, {});
  return summary;
}

RunSummary run_paraphrase(const RunConfig& cfg) {
  auto examples = load_examples(cfg.train_path);
  auto catalog = load_schemas(cfg.tables_path);
  auto provider = make_provider(cfg);
  auto prompts = make_catalog(cfg);

  ArtifactWriter writer(cfg);
  RunSummary summary;
  summary.run_id = compute_run_id(cfg);
  for (const auto& ex : examples) {
    try {
      ParaphraseLog log;
      auto candidates = paraphrase_with_schema(ex, catalog, *provider, prompts,
                                               cfg.paraphrase_n, &log);
      for (const auto& n : log.notes) writer.event({{"type", "note"}, {"note", n}});
      Explanation expl2 =
          get_explanation(ex.query, "for_validate", nullptr, *provider, prompts);
      auto verdicts = cycle_validate(ex.query, std::move(candidates), expl2, *provider,
                                     cfg.paraphrase_lambda, cfg.top_k);
      for (const auto& v : verdicts) {
        writer.event({{"type", "verdict"},
                      {"question", v.candidate.question},
                      {"query", v.candidate.query},
                      {"similarity", v.similarity},
                      {"accepted", v.accepted},
                      {"rank", v.rank}});
        if (v.accepted) {
          writer.record(v.candidate, summary.run_id);
          summary.emitted += 1;
        } else {
          summary.rejected += 1;
        }
      }
    } catch (const std::exception& e) {
      writer.event({{"type", "failure"}, {"query", ex.query}, {"reason", e.what()}});
      summary.failures += 1;
    }
  }
  size_t judged = summary.emitted + summary.rejected;
  summary.acceptance_rate =
      judged ? static_cast<double>(summary.emitted) / judged : 0.0;
  write_summary(cfg, summary, {});
  return summary;
}

std::string find_database(const std::string& db_root, const std::string& db_id) {
  fs::path nested = fs::path(db_root) / db_id / (db_id + ".sqlite");
  if (fs::exists(nested)) return nested.string();
  fs::path flat = fs::path(db_root) / (db_id + ".sqlite");
  if (fs::exists(flat)) return flat.string();
  return "";
}

RunSummary run_craft(const RunConfig& cfg) {
  auto catalog = load_schemas(cfg.tables_path);
  auto provider = make_provider(cfg);
  auto prompts = make_catalog(cfg);
  auto templates = cfg.sql_templates_path.empty()
                       ? default_sql_templates()
                       : load_sql_templates(cfg.sql_templates_path);

  ArtifactWriter writer(cfg);
  RunSummary summary;
  summary.run_id = compute_run_id(cfg);
  for (const auto& [db_id, schema] : catalog) {
    std::string db_path = find_database(cfg.db_root, db_id);
    if (db_path.empty()) {
      writer.event({{"type", "failure"},
                    {"db_id", db_id},
                    {"reason", "missing database file"}});
      summary.failures += 1;
      continue;
    }
    SqliteDb db(db_path);
    auto crafted = craft_and_fill_sql(schema, templates, *provider, prompts, db);
    for (auto& c : crafted) {
      if (!c.ok) {
        writer.event({{"type", "crafted_error"},
                      {"template", c.source_template.shape},
                      {"query", c.query},
                      {"error", c.error}});
        summary.rejected += 1;
        continue;
      }
      if (cfg.drop_empty_results) {
        auto r = db.query(c.query, 1);
        if (r.ok && r.rows.empty()) {
          writer.event({{"type", "crafted_empty"}, {"query", c.query}});
          summary.skipped += 1;
          continue;
        }
      }
      try {
        auto candidates =
            describe_and_paraphrase(c, *provider, prompts, cfg.paraphrase_n);
        if (cfg.validate_crafted && !candidates.empty()) {
          Explanation expl2{c.description, "for_validate", c.query};
          auto verdicts = cycle_validate(c.query, std::move(candidates), expl2,
                                         *provider, cfg.lambda, cfg.top_k);
          candidates.clear();
          for (const auto& v : verdicts) {
            if (v.accepted) candidates.push_back(v.candidate);
            else summary.rejected += 1;
          }
        }
        for (const auto& cand : candidates) {
          writer.record(cand, summary.run_id);
          summary.emitted += 1;
        }
      } catch (const std::exception& e) {
        writer.event(
            {{"type", "failure"}, {"query", c.query}, {"reason", e.what()}});
        summary.failures += 1;
      }
    }
  }
  size_t judged = summary.emitted + summary.rejected;
  summary.acceptance_rate =
      judged ? static_cast<double>(summary.emitted) / judged : 0.0;
  write_summary(cfg, summary, {});
  return summary;
}

RunSummary run_perturb(const RunConfig& cfg) {
  auto examples = load_examples(cfg.train_path);
  auto catalog = load_schemas(cfg.tables_path);

  PerturbConfig pc{cfg.fraction, cfg.seed};
  auto [perturbed, report] = replace_constants(examples, catalog, cfg.db_root, pc);

  ArtifactWriter writer(cfg);
  RunSummary summary;
  summary.run_id = compute_run_id(cfg);
  for (size_t i = 0; i < perturbed.size(); ++i) {
    if (writer.dataset.is_open()) {
      json j = {{"question", perturbed[i].question},
                {"query", perturbed[i].query},
                {"db_id", perturbed[i].db_id},
                {"provenance", "perturb"},
                {"altered", perturbed[i].query != examples[i].query},
                {"run_id", summary.run_id}};
      writer.dataset << j.dump() << "\n";
    }
  }
  for (const auto& c : report.changes) {
    writer.event({{"type", "change"},
                  {"index", c.example_index},
                  {"column", c.column},
                  {"old", c.old_value},
                  {"new", c.new_value}});
  }
  for (const auto& [idx, reason] : report.passthroughs) {
    writer.event({{"type", "passthrough"}, {"index", idx}, {"reason", reason}});
  }
  summary.emitted = report.altered;
  summary.skipped = report.selected - report.altered;
  summary.acceptance_rate =
      report.selected ? static_cast<double>(report.altered) / report.selected : 0.0;
  write_summary(cfg, summary,
                {{"total", report.total}, {"selected", report.selected},
                 {"altered", report.altered}});
  return summary;
}

RunSummary run_evaluate(const RunConfig& cfg) {
  auto gold = load_examples(cfg.train_path);
  std::map<std::string, std::string> gold_by_query;
  for (const auto& ex : gold) gold_by_query.emplace(ex.query, ex.question);

  std::ifstream in(cfg.dataset_in_path);
  if (!in) throw std::runtime_error("cannot open dataset: " + cfg.dataset_in_path);
  std::map<std::string, std::vector<std::string>> sets;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    json j = json::parse(line);
    sets[j.at("query").get<std::string>()].push_back(
        j.at("question").get<std::string>());
  }

  std::vector<std::string> golds, queries;
  std::vector<std::vector<std::string>> cand_sets;
  size_t unmatched = 0;
  for (const auto& [query, candidates] : sets) {
    auto it = gold_by_query.find(query);
    if (it == gold_by_query.end()) {
      ++unmatched;
      continue;
    }
    queries.push_back(query);
    golds.push_back(it->second);
    cand_sets.push_back(candidates);
  }
  QualityReport report = quality_report(golds, queries, cand_sets);

  ArtifactWriter writer(cfg);
  RunSummary summary;
  summary.run_id = compute_run_id(cfg);
  summary.emitted = queries.size();
  summary.skipped = unmatched;
  for (const auto& pq : report.per_query) {
    writer.event({{"type", "quality"},
                  {"query", pq.query},
                  {"best_bleu", pq.best_bleu},
                  {"candidates", pq.candidate_count}});
  }
  write_summary(cfg, summary,
                {{"mean_best_bleu", report.mean_best_bleu},
                 {"mean_self_bleu", report.mean_self_bleu},
                 {"diversity", report.diversity}});
  return summary;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return from_json_text(text);
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  read_if(j, "strategy", cfg.strategy);
  read_if(j, "train", cfg.train_path);
  read_if(j, "tables", cfg.tables_path);
  read_if(j, "db_root", cfg.db_root);
  read_if(j, "new_queries", cfg.new_queries_path);
  read_if(j, "category_split", cfg.category_split_path);
  read_if(j, "dataset_in", cfg.dataset_in_path);
  if (j.contains("thresholds")) {
    const auto& t = j["thresholds"];
    read_if(t, "ted", cfg.ted_threshold);
    read_if(t, "lambda", cfg.lambda);
    read_if(t, "paraphrase_lambda", cfg.paraphrase_lambda);
    read_if(t, "vocab", cfg.vocab_threshold);
    read_if(t, "fraction", cfg.fraction);
    read_if(t, "top_k", cfg.top_k);
  }
  read_if(j, "paraphrase_n", cfg.paraphrase_n);
  read_if(j, "validate_crafted", cfg.validate_crafted);
  read_if(j, "drop_empty_results", cfg.drop_empty_results);
  if (j.contains("provider")) {
    const auto& p = j["provider"];
    read_if(p, "kind", cfg.provider_kind);
    read_if(p, "base_url", cfg.http.base_url);
    read_if(p, "chat_model", cfg.http.chat_model);
    read_if(p, "embedding_model", cfg.http.embedding_model);
    read_if(p, "embedding_dim", cfg.http.embedding_dim);
    read_if(p, "api_key_env", cfg.http.api_key_env);
  }
  read_if(j, "seed", cfg.seed);
  read_if(j, "cache_root", cfg.cache_root);
  read_if(j, "prompts_dir", cfg.prompts_dir);
  read_if(j, "sql_templates", cfg.sql_templates_path);
  if (j.contains("output")) {
    const auto& o = j["output"];
    read_if(o, "dataset", cfg.dataset_out);
    read_if(o, "audit", cfg.audit_out);
    read_if(o, "summary", cfg.summary_out);
  }
  return cfg;
}

void RunConfig::validate() const {
  static const std::set<std::string> strategies = {"reformer", "paraphrase", "craft",
                                                   "perturb", "evaluate"};
  if (!strategies.count(strategy))
    throw ConfigError("invalid field 'strategy': '" + strategy + "'");
  if (lambda <= 0.0 || lambda > 1.0)
    throw ConfigError("invalid field 'lambda': must be in (0,1]");
  if (paraphrase_lambda <= 0.0 || paraphrase_lambda > 1.0)
    throw ConfigError("invalid field 'paraphrase_lambda': must be in (0,1]");
  if (ted_threshold <= 0.0 || ted_threshold > 1.0)
    throw ConfigError("invalid field 'ted': must be in (0,1]");
  if (vocab_threshold < 0.0 || vocab_threshold >= 1.0)
    throw ConfigError("invalid field 'vocab': must be in [0,1)");
  if (fraction < 0.0 || fraction > 1.0)
    throw ConfigError("invalid field 'fraction': must be in [0,1]");
  if (top_k < 1) throw ConfigError("invalid field 'top_k': must be >= 1");
  if (paraphrase_n < 0) throw ConfigError("invalid field 'paraphrase_n'");
  if (provider_kind != "stub" && provider_kind != "http")
    throw ConfigError("invalid field 'provider.kind': '" + provider_kind + "'");
}

RunSummary run_pipeline(const RunConfig& config) {
  config.validate();
  if (config.strategy == "reformer") return run_reformer(config);
  if (config.strategy == "paraphrase") return run_paraphrase(config);
  if (config.strategy == "craft") return run_craft(config);
  if (config.strategy == "perturb") return run_perturb(config);
  return run_evaluate(config);
}

}  // namespace reformer
