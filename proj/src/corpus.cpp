#include "reformer/corpus.hpp"

#include <fstream>

#include "json.hpp"
#include "reformer/text.hpp"

namespace reformer {

using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw CorpusError("malformed JSON in " + path + ": " + e.what());
  }
  return j;
}

}  // namespace

const TableDef* DatabaseSchema::find_table(const std::string& name) const {
  std::string want = to_lower(name);
  for (const auto& t : tables) {
    if (to_lower(t.name) == want) return &t;
  }
  return nullptr;
}

std::vector<ColumnRef> DatabaseSchema::resolve_column(const std::string& name) const {
  std::string want = to_lower(name);
  std::vector<ColumnRef> hits;
  for (const auto& t : tables) {
    for (const auto& c : t.columns) {
      if (to_lower(c.name) == want) hits.push_back({t.name, c.name});
    }
  }
  return hits;
}

std::vector<ExamplePair> load_examples(const std::string& path) {
  json j = load_json_file(path);
  if (!j.is_array()) throw CorpusError(path + ": expected a top-level array");
  std::vector<ExamplePair> out;
  out.reserve(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    const auto& rec = j[i];
    for (const char* field : {"question", "query", "db_id"}) {
      if (!rec.contains(field) || !rec[field].is_string()) {
        throw CorpusError(path + ": record " + std::to_string(i) +
                          " missing string field '" + field + "'");
      }
    }
    ExamplePair p{rec["question"].get<std::string>(),
                  rec["query"].get<std::string>(),
                  rec["db_id"].get<std::string>()};
    if (trim(p.question).empty()) {
      throw CorpusError(path + ": record " + std::to_string(i) +
                        " has an empty question");
    }
    out.push_back(std::move(p));
  }
  return out;
}

void save_examples(const std::vector<ExamplePair>& examples, const std::string& path) {
  json j = json::array();
  for (const auto& p : examples) {
    j.push_back({{"question", p.question}, {"query", p.query}, {"db_id", p.db_id}});
  }
  std::ofstream out(path);
  if (!out) throw CorpusError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

SchemaCatalog load_schemas(const std::string& path) {
  json j = load_json_file(path);
  if (!j.is_array()) throw CorpusError(path + ": expected a top-level array");
  SchemaCatalog catalog;
  for (const auto& entry : j) {
    DatabaseSchema schema;
    schema.db_id = entry.at("db_id").get<std::string>();
    if (catalog.count(schema.db_id)) {
      throw CorpusError(path + ": duplicate db_id '" + schema.db_id + "'");
    }
    auto table_names = entry.at("table_names_original").get<std::vector<std::string>>();
    for (const auto& tn : table_names) schema.tables.push_back({tn, {}});

    const auto& cols = entry.at("column_names_original");
    const auto& types = entry.at("column_types");
    // Index 0 is the "*" pseudo-column with table index -1 in Spider files.
    std::vector<ColumnRef> by_index;
    for (size_t i = 0; i < cols.size(); ++i) {
      int t_idx = cols[i][0].get<int>();
      std::string cname = cols[i][1].get<std::string>();
      if (t_idx < 0) {
        by_index.push_back({"", cname});
        continue;
      }
      if (static_cast<size_t>(t_idx) >= schema.tables.size()) {
        throw CorpusError(path + ": db '" + schema.db_id +
                          "' column " + std::to_string(i) +
                          " references missing table index " + std::to_string(t_idx));
      }
      std::string ctype = i < types.size() ? types[i].get<std::string>() : "text";
      schema.tables[t_idx].columns.push_back({cname, ctype});
      by_index.push_back({schema.tables[t_idx].name, cname});
    }

    auto resolve_index = [&](int idx) -> ColumnRef {
      if (idx < 0 || static_cast<size_t>(idx) >= by_index.size() ||
          by_index[idx].table.empty()) {
        throw CorpusError(path + ": db '" + schema.db_id +
                          "' dangling column index " + std::to_string(idx));
      }
      return by_index[idx];
    };
    if (entry.contains("primary_keys")) {
      for (const auto& pk : entry["primary_keys"]) {
        schema.primary_keys.push_back(resolve_index(pk.get<int>()));
      }
    }
    if (entry.contains("foreign_keys")) {
      for (const auto& fk : entry["foreign_keys"]) {
        schema.foreign_keys.emplace_back(resolve_index(fk[0].get<int>()),
                                         resolve_index(fk[1].get<int>()));
      }
    }
    catalog.emplace(schema.db_id, std::move(schema));
  }
  return catalog;
}

CategorySplit load_category_split(const std::string& path) {
  json j = load_json_file(path);
  if (!j.is_object()) throw CorpusError(path + ": expected an object of db_id -> label");
  CategorySplit split;
  for (auto it = j.begin(); it != j.end(); ++it) {
    split[it.key()] = it.value().get<std::string>();
  }
  return split;
}

std::map<std::string, std::vector<ExamplePair>> split_by_category(
    const std::vector<ExamplePair>& examples, const CategorySplit& split) {
  std::map<std::string, std::vector<ExamplePair>> buckets;
  for (const auto& ex : examples) {
    auto it = split.find(ex.db_id);
    const std::string& label = it != split.end() ? it->second : "train";
    buckets[label].push_back(ex);
  }
  return buckets;
}

}  // namespace reformer
