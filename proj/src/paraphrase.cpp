#include "reformer/paraphrase.hpp"

#include <fstream>

#include "json.hpp"
#include "reformer/algebra.hpp"
#include "reformer/text.hpp"

namespace reformer {

using nlohmann::json;

namespace {

std::vector<std::string> scan_holes(const std::string& shape) {
  std::vector<std::string> holes;
  for (size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] != '{') continue;
    size_t close = shape.find('}', i);
    if (close == std::string::npos) break;
    std::string name = shape.substr(i + 1, close - i - 1);
    if (std::find(holes.begin(), holes.end(), name) == holes.end())
      holes.push_back(name);
    i = close;
  }
  return holes;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',' || c == '\n') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == '\n') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::string schema_compact(const DatabaseSchema& schema) {
  std::vector<std::string> parts;
  for (const auto& t : schema.tables) {
    std::vector<std::string> cols;
    for (const auto& c : t.columns) cols.push_back(c.name);
    parts.push_back(t.name + ":" + join(cols, ","));
  }
  return join(parts, ";");
}

std::string schema_human(const DatabaseSchema& schema) {
  std::vector<std::string> parts;
  for (const auto& t : schema.tables) {
    std::vector<std::string> cols;
    for (const auto& c : t.columns) cols.push_back(c.name);
    parts.push_back(t.name + "(" + join(cols, ", ") + ")");
  }
  return join(parts, "; ");
}

void note(ParaphraseLog* log, const std::string& msg) {
  if (log) log->notes.push_back(msg);
}

}  // namespace

SqlTemplate SqlTemplate::from_shape(std::string shape, std::string tier) {
  SqlTemplate t;
  t.holes = scan_holes(shape);
  t.shape = std::move(shape);
  t.tier = std::move(tier);
  return t;
}

std::vector<SqlTemplate> default_sql_templates() {
  std::vector<SqlTemplate> out;
  auto basic = [&](const char* s) { out.push_back(SqlTemplate::from_shape(s, "basic")); };
  auto complex = [&](const char* s) {
    out.push_back(SqlTemplate::from_shape(s, "complex"));
  };
  basic("SELECT {column} FROM {table}");
  basic("SELECT {column}, {column2} FROM {table}");
  basic("SELECT DISTINCT {column} FROM {table}");
  basic("SELECT {agg}({column}) FROM {table}");
  basic("SELECT count(*) FROM {table}");
  basic("SELECT {column} FROM {table} WHERE {column2} {op} {value}");
  basic("SELECT {column} FROM {table} ORDER BY {column2}");
  basic("SELECT {column} FROM {table} ORDER BY {column2} DESC LIMIT {limit}");
  basic("SELECT {column}, {agg}({column2}) FROM {table} GROUP BY {column}");
  basic("SELECT {column} FROM {table} GROUP BY {column} HAVING count(*) {op} {value}");
  basic(
      "SELECT {column} FROM {table} WHERE {column2} {op} {value} ORDER BY {column} "
      "LIMIT {limit}");
  basic("SELECT {agg}({column}) FROM {table} WHERE {column2} {op} {value}");
  complex("SELECT {column} FROM {table} WHERE {column} IN (SELECT {column} FROM {table})");
  complex(
      "SELECT {column} FROM {table} WHERE {column2} NOT IN (SELECT {column2} FROM "
      "{table} WHERE {column3} {op} {value})");
  complex("SELECT {column} FROM {table} UNION SELECT {column2} FROM {table}");
  complex(
      "SELECT {column} FROM {table} EXCEPT SELECT {column} FROM {table} WHERE "
      "{column2} {op} {value}");
  complex(
      "SELECT {column} FROM {table} INTERSECT SELECT {column} FROM {table} WHERE "
      "{column2} {op} {value}");
  complex(
      "SELECT {column} FROM {table} WHERE {column2} IN (SELECT {column2} FROM {table} "
      "ORDER BY {column3} DESC LIMIT {limit})");
  complex(
      "SELECT {agg}({column}) FROM {table} WHERE {column2} IN (SELECT {column2} FROM "
      "{table} WHERE {column3} {op} {value})");
  complex(
      "SELECT {column} FROM {table} WHERE {column2} {op} {value} UNION SELECT "
      "{column} FROM {table} WHERE {column3} {op} {value2}");
  return out;
}

std::vector<SqlTemplate> load_sql_templates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template pack: " + path);
  json j;
  in >> j;
  std::vector<SqlTemplate> out;
  for (const auto& entry : j.at("templates")) {
    out.push_back(SqlTemplate::from_shape(entry.at("shape").get<std::string>(),
                                          entry.value("tier", "basic")));
  }
  return out;
}

void save_sql_templates(const std::vector<SqlTemplate>& templates,
                        const std::string& path) {
  json arr = json::array();
  for (const auto& t : templates) {
    arr.push_back({{"shape", t.shape}, {"tier", t.tier}, {"holes", t.holes}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write template pack: " + path);
  out << json{{"templates", arr}}.dump(2) << "\n";
}

std::vector<CandidateQuestion> paraphrase_with_schema(const ExamplePair& example,
                                                      const SchemaCatalog& catalog,
                                                      Provider& provider,
                                                      const PromptCatalog& prompts,
                                                      int n, ParaphraseLog* log) {
  auto it = catalog.find(example.db_id);
  if (it == catalog.end())
    throw std::runtime_error("paraphrase_with_schema: unknown db_id '" +
                             example.db_id + "'");
  const DatabaseSchema& schema = it->second;

  std::vector<std::string> all_tables;
  for (const auto& t : schema.tables) all_tables.push_back(t.name);

  ChatRequest extract;
  extract.prompt = prompts.render("extract_tables", {{"tables", join(all_tables, ", ")},
                                                     {"question", example.question}});
  extract.temperature = 0.0;  // lookup-like task
  std::vector<std::string> related;
  for (const auto& name : split_list(provider.chat(extract).text)) {
    if (const TableDef* t = schema.find_table(name)) {
      related.push_back(t->name);
    } else {
      note(log, "dropped hallucinated table '" + name + "' for db " + example.db_id);
    }
  }
  if (related.empty()) {
    note(log, "no valid tables extracted for question; falling back to all tables");
    related = all_tables;
  }

  std::vector<std::string> columns;
  for (const auto& tname : related) {
    const TableDef* t = schema.find_table(tname);
    for (const auto& c : t->columns) columns.push_back(tname + "." + c.name);
  }

  ChatRequest para;
  para.prompt = prompts.render("paraphrase_with_schema",
                               {{"n", std::to_string(n)},
                                {"tables", join(related, ", ")},
                                {"columns", join(columns, ", ")},
                                {"question", example.question}});
  std::vector<CandidateQuestion> out;
  for (const auto& line : split_lines(provider.chat(para).text)) {
    if (static_cast<int>(out.size()) >= n) break;
    CandidateQuestion cand;
    cand.question = line;
    cand.query = example.query;
    cand.db_id = example.db_id;
    cand.provenance = Provenance::ParaphraseSchema;
    cand.explanation_text = example.question;
    out.push_back(std::move(cand));
  }
  return out;
}

std::vector<CraftedQuery> craft_and_fill_sql(const DatabaseSchema& schema,
                                             const std::vector<SqlTemplate>& templates,
                                             Provider& provider,
                                             const PromptCatalog& prompts,
                                             const SqliteDb& db, int exec_timeout_ms) {
  std::vector<CraftedQuery> out;
  for (const auto& tpl : templates) {
    CraftedQuery crafted;
    crafted.source_template = tpl;
    crafted.db_id = schema.db_id;

    ChatRequest req;
    req.prompt = prompts.render(
        "fill_sql_template",
        {{"schema", schema_human(schema)},
         {"sql_template", tpl.shape},
         {"schema_compact", schema_compact(schema)}});  // aux binding for the stub
    try {
      crafted.query = trim(provider.chat(req).text);
    } catch (const std::exception& e) {
      crafted.error = std::string("provider: ") + e.what();
      out.push_back(std::move(crafted));
      continue;
    }

    try {
      parse_sql(crafted.query, schema);
    } catch (const SqlError& e) {
      crafted.error = std::string("parse: ") + e.what();
      out.push_back(std::move(crafted));
      continue;
    }
    auto result = db.query(crafted.query, 100, exec_timeout_ms);
    if (!result.ok) {
      crafted.error = "execute: " + result.error;
    } else {
      crafted.ok = true;  // empty result sets count as ok
    }
    out.push_back(std::move(crafted));
  }
  return out;
}

std::vector<CandidateQuestion> describe_and_paraphrase(CraftedQuery& crafted,
                                                       Provider& provider,
                                                       const PromptCatalog& prompts,
                                                       int n) {
  if (!crafted.ok)
    throw std::runtime_error("describe_and_paraphrase requires an executable query");
  ChatRequest desc;
  desc.prompt = prompts.render("describe_query", {{"query", crafted.query}});
  crafted.description = first_sentence(provider.chat(desc).text);
  if (n <= 0) return {};

  ChatRequest para;
  para.prompt = prompts.render("paraphrase_description",
                               {{"n", std::to_string(n)},
                                {"description", crafted.description}});
  std::vector<CandidateQuestion> out;
  for (const auto& line : split_lines(provider.chat(para).text)) {
    if (static_cast<int>(out.size()) >= n) break;
    CandidateQuestion cand;
    cand.question = line;
    cand.query = crafted.query;
    cand.db_id = crafted.db_id;
    cand.provenance = Provenance::ParaphraseCrafted;
    cand.explanation_text = crafted.description;
    out.push_back(std::move(cand));
  }
  return out;
}

}  // namespace reformer
