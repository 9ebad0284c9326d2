#include "reformer/perturb.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "json.hpp"
#include "reformer/algebra.hpp"
#include "reformer/sqlite_db.hpp"

namespace reformer {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// splitmix64; decorrelates the per-query streams from (seed, index)
uint64_t mix(uint64_t seed, uint64_t index) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<size_t> pick_indices(size_t n, size_t k, uint64_t seed) {
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < k && i + 1 < n; ++i) {
    std::uniform_int_distribution<size_t> dist(i, n - 1);
    std::swap(idx[i], idx[dist(rng)]);
  }
  idx.resize(std::min(k, n));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::string find_database(const std::string& db_root, const std::string& db_id) {
  fs::path nested = fs::path(db_root) / db_id / (db_id + ".sqlite");
  if (fs::exists(nested)) return nested.string();
  fs::path flat = fs::path(db_root) / (db_id + ".sqlite");
  if (fs::exists(flat)) return flat.string();
  return "";
}

}  // namespace

std::pair<std::vector<ExamplePair>, PerturbationReport> replace_constants(
    const std::vector<ExamplePair>& examples, const SchemaCatalog& catalog,
    const std::string& db_root, const PerturbConfig& config) {
  if (config.fraction < 0.0 || config.fraction > 1.0)
    throw std::invalid_argument("fraction must be in [0,1]");

  std::vector<ExamplePair> out = examples;
  PerturbationReport report;
  report.total = examples.size();
  size_t k = static_cast<size_t>(config.fraction * examples.size());
  auto selected = pick_indices(examples.size(), k, config.seed);
  report.selected = selected.size();

  for (size_t idx : selected) {
    const ExamplePair& ex = examples[idx];
    auto schema_it = catalog.find(ex.db_id);
    if (schema_it == catalog.end()) {
      report.passthroughs.emplace_back(idx, "unknown db_id '" + ex.db_id + "'");
      continue;
    }
    std::string db_path = find_database(db_root, ex.db_id);
    if (db_path.empty()) {
      report.passthroughs.emplace_back(idx, "missing database for '" + ex.db_id + "'");
      continue;
    }
    try {
      SqliteDb db(db_path);
      AlgebraTree tree = parse_sql(ex.query, schema_it->second);
      auto sites = find_constants(tree);
      if (sites.empty()) {
        report.passthroughs.emplace_back(idx, "no constants");
        continue;
      }
      std::mt19937_64 rng(mix(config.seed, idx));
      std::vector<PerturbationChange> changes;
      bool changed = false;
      for (const auto& site : sites) {
        auto dot = site.column.find('.');
        std::string table = site.column.substr(0, dot);
        std::string column = site.column.substr(dot + 1);
        std::vector<std::string> values = db.distinct_values(table, column);
        values.erase(std::remove(values.begin(), values.end(), site.value),
                     values.end());
        if (values.empty()) continue;  // nothing to swap in
        std::uniform_int_distribution<size_t> dist(0, values.size() - 1);
        std::string new_value = values[dist(rng)];
        replace_constant(tree, site.path, new_value);
        changes.push_back({idx, site.column, site.value, new_value});
        changed = true;
      }
      if (!changed) {
        report.passthroughs.emplace_back(idx, "no alternative column values");
        continue;
      }
      std::string new_sql = emit_sql(tree);
      parse_sql(new_sql, schema_it->second);  // must round-trip
      auto exec = db.query(new_sql, 10);
      if (!exec.ok) {
        report.passthroughs.emplace_back(idx, "rewritten query failed: " + exec.error);
        continue;
      }
      out[idx].query = new_sql;
      report.altered += 1;
      for (auto& c : changes) report.changes.push_back(std::move(c));
    } catch (const std::exception& e) {
      report.passthroughs.emplace_back(idx, e.what());
    }
  }
  return {std::move(out), std::move(report)};
}

void save_report(const PerturbationReport& report, const std::string& path) {
  json j;
  j["total"] = report.total;
  j["selected"] = report.selected;
  j["altered"] = report.altered;
  j["changes"] = json::array();
  for (const auto& c : report.changes) {
    j["changes"].push_back({{"index", c.example_index},
                            {"column", c.column},
                            {"old", c.old_value},
                            {"new", c.new_value}});
  }
  j["passthroughs"] = json::array();
  for (const auto& [idx, reason] : report.passthroughs) {
    j["passthroughs"].push_back({{"index", idx}, {"reason", reason}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace reformer
