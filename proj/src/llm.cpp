#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "reformer/llm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "reformer/templating.hpp"
#include "reformer/text.hpp"

namespace reformer {

namespace fs = std::filesystem;
using nlohmann::json;

// --- prompt catalog ------------------------------------------------------

namespace {

const std::map<std::string, std::string> kDefaultTemplates = {
    {"explain_for_fill",
     "Explain what the following SQL query returns in a single sentence, "
     "without using table names.\n{shot}Query: {query}\nExplanation:"},
    {"explain_for_validate",
     "Explain what the following SQL query returns in one sentence, without "
     "using table names.\n{shot}Query: {query}\nExplanation:"},
    {"fill_template",
     "Fill in every MASK token of the question template using the "
     "explanation. Keep all other words unchanged and in the same order, and "
     "return only the completed question.\nExplanation: {explanation}\n"
     "Template: {question_template}\nQuestion:"},
    {"paraphrase_with_schema",
     "Paraphrase the question in {n} different ways, one per line. The "
     "question is about a database with the following tables and columns.\n"
     "Tables: {tables}\nColumns: {columns}\nQuestion: {question}\n"
     "Paraphrases:"},
    {"extract_tables",
     "From the table list below, name the tables related to the question. "
     "Reply with a comma-separated list of table names and nothing else.\n"
     "Tables: {tables}\nQuestion: {question}\nRelated tables:"},
    {"fill_sql_template",
     "Fill in the blanks of the SQL template with tables, columns and values "
     "from the schema. Return only the completed SQL query.\n"
     "Schema: {schema}\nTemplate: {sql_template}\nSQL:"},
    {"describe_query",
     "Describe what the following SQL query returns in one concise "
     "sentence.\nQuery: {query}\nDescription:"},
    {"paraphrase_description",
     "Paraphrase the description in {n} different ways, one per line.\n"
     "Description: {description}\nParaphrases:"},
};

// Placeholders are {lower_snake_case} runs.
std::vector<std::string> find_placeholders(const std::string& text) {
  std::vector<std::string> out;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    size_t j = i + 1;
    while (j < text.size() &&
           (std::islower(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
            std::isdigit(static_cast<unsigned char>(text[j]))))
      ++j;
    if (j < text.size() && text[j] == '}' && j > i + 1) {
      out.push_back(text.substr(i + 1, j - i - 1));
      i = j;
    }
  }
  return out;
}

}  // namespace

PromptCatalog PromptCatalog::defaults() {
  PromptCatalog c;
  c.templates_ = kDefaultTemplates;
  return c;
}

PromptCatalog PromptCatalog::from_directory(const std::string& dir) {
  PromptCatalog c = defaults();
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    while (!text.empty() && (text.back() == '\n' || text.back() == '\r'))
      text.pop_back();
    c.templates_[entry.path().stem().string()] = text;
  }
  return c;
}

bool PromptCatalog::has(const std::string& template_id) const {
  return templates_.count(template_id) > 0;
}

const std::string& PromptCatalog::text(const std::string& template_id) const {
  auto it = templates_.find(template_id);
  if (it == templates_.end())
    throw LlmError("unknown prompt template id '" + template_id + "'");
  return it->second;
}

void PromptCatalog::set(const std::string& template_id, std::string text) {
  templates_[template_id] = std::move(text);
}

PromptBundle PromptCatalog::render(
    const std::string& template_id,
    const std::map<std::string, std::string>& bindings) const {
  const std::string& tpl = text(template_id);
  std::string rendered = tpl;
  auto own = find_placeholders(tpl);
  for (const auto& name : own) {
    auto it = bindings.find(name);
    if (it == bindings.end())
      throw LlmError("missing binding '" + name + "' for template '" + template_id +
                     "'");
    std::string needle = "{" + name + "}";
    size_t pos = 0;
    while ((pos = rendered.find(needle, pos)) != std::string::npos) {
      rendered.replace(pos, needle.size(), it->second);
      pos += it->second.size();
    }
  }
  // Brace tokens contributed by binding values (SQL template holes, for
  // example) are payload; only the template's own placeholders must be gone.
  for (const auto& leftover : find_placeholders(rendered)) {
    if (std::find(own.begin(), own.end(), leftover) != own.end())
      throw LlmError("unbound placeholder '" + leftover +
                     "' survives rendering of '" + template_id + "'");
  }
  return PromptBundle{template_id, bindings, std::move(rendered)};
}

// --- stub provider -------------------------------------------------------

namespace {

std::string strip_qualifier(std::string item) {
  // "t1.name" -> "name"; leaves "*" alone
  auto dot = item.rfind('.');
  if (dot != std::string::npos && dot + 1 < item.size() && item[dot + 1] != ' ')
    item = item.substr(dot + 1);
  return item;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string describe_select_item(const std::string& raw) {
  std::string item = to_lower(trim(raw));
  for (const char* agg : {"count", "sum", "avg", "min", "max"}) {
    std::string prefix = std::string(agg) + "(";
    if (item.rfind(prefix, 0) == 0 && item.back() == ')') {
      std::string arg =
          strip_qualifier(trim(item.substr(prefix.size(), item.size() - prefix.size() - 1)));
      if (std::string(agg) == "count")
        return arg == "*" ? "number of rows" : "number of " + arg;
      static const std::map<std::string, std::string> words = {
          {"sum", "total"}, {"avg", "average"}, {"min", "smallest"}, {"max", "largest"}};
      return words.at(agg) + " " + arg;
    }
  }
  if (item == "*") return "all columns";
  return strip_qualifier(item);
}

std::string describe_condition(std::string cond) {
  cond = to_lower(cond);
  struct Sub {
    const char* from;
    const char* to;
  };
  static const Sub subs[] = {
      {">=", " is at least "}, {"<=", " is at most "}, {"!=", " is not "},
      {"<>", " is not "},      {"=", " is "},          {">", " is greater than "},
      {"<", " is less than "},
  };
  for (const auto& s : subs) {
    size_t pos;
    while ((pos = cond.find(s.from)) != std::string::npos)
      cond.replace(pos, std::strlen(s.from), s.to);
  }
  std::string cleaned;
  for (char c : cond) {
    if (c == '\'' || c == '"') continue;
    cleaned += c == '.' ? ' ' : c;
  }
  // collapse whitespace
  std::string out;
  for (const auto& tok : tokenize(cleaned)) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

// Keyword-level reading of a SELECT statement, enough to name its pieces.
std::string stub_explanation(const std::string& sql) {
  std::string low = to_lower(sql);
  auto find_kw = [&](const std::string& kw, size_t from) {
    size_t pos = low.find(kw, from);
    return pos;
  };
  size_t sel = find_kw("select", 0);
  size_t from = find_kw(" from ", sel == std::string::npos ? 0 : sel);
  if (sel == std::string::npos || from == std::string::npos)
    return "return the result of the query";
  std::string select_part = trim(sql.substr(sel + 6, from - sel - 6));

  size_t clause_end = low.size();
  for (const char* kw : {" where ", " group by ", " order by ", " limit ", " union ",
                         " except ", " intersect "}) {
    size_t p = low.find(kw, from + 6);
    if (p != std::string::npos) clause_end = std::min(clause_end, p);
  }
  std::string from_part = trim(sql.substr(from + 6, clause_end - from - 6));

  std::vector<std::string> items;
  for (const auto& raw : split_on(select_part, ',')) {
    std::string d = describe_select_item(raw);
    if (!d.empty()) items.push_back(d);
  }
  std::vector<std::string> tables;
  for (const auto& part : split_on(to_lower(from_part), ',')) {
    for (const auto& jp : [&] {
           // split on " join "
           std::vector<std::string> out;
           std::string rest = part;
           size_t p;
           while ((p = rest.find(" join ")) != std::string::npos) {
             out.push_back(rest.substr(0, p));
             rest = rest.substr(p + 6);
           }
           out.push_back(rest);
           return out;
         }()) {
      auto toks = tokenize(jp);
      if (!toks.empty()) tables.push_back(toks[0]);
    }
  }

  std::string text = "return the " + join(items, " and ") + " of the " +
                     join(tables, " and ") + (tables.size() > 1 ? " tables" : " table");
  size_t wh = low.find(" where ", from);
  if (wh != std::string::npos) {
    size_t wh_end = low.size();
    for (const char* kw : {" group by ", " order by ", " limit "}) {
      size_t p = low.find(kw, wh + 7);
      if (p != std::string::npos) wh_end = std::min(wh_end, p);
    }
    text += " where " + describe_condition(sql.substr(wh + 7, wh_end - wh - 7));
  }
  size_t gb = low.find(" group by ", from);
  if (gb != std::string::npos) {
    size_t gb_end = low.size();
    for (const char* kw : {" having ", " order by ", " limit "}) {
      size_t p = low.find(kw, gb + 10);
      if (p != std::string::npos) gb_end = std::min(gb_end, p);
    }
    text += " for each " + strip_qualifier(trim(low.substr(gb + 10, gb_end - gb - 10)));
  }
  return text;
}

std::string stub_fill(const std::string& tpl, const std::string& explanation) {
  std::vector<std::string> toks = tokenize(tpl);
  std::set<std::string> present;
  for (const auto& t : toks) {
    if (t != kMaskToken) present.insert(to_lower(t));
  }
  std::vector<std::string> pool;
  static const std::set<std::string> stop = {"the", "of", "a", "an", "to", "is",
                                             "return", "and", "for", "each"};
  for (const auto& w : tokenize(explanation)) {
    if (is_punctuation_token(w)) continue;
    std::string lw = to_lower(w);
    if (present.count(lw) || stop.count(lw)) continue;
    if (std::find(pool.begin(), pool.end(), lw) == pool.end()) pool.push_back(lw);
  }
  size_t next = 0;
  std::vector<std::string> out;
  for (const auto& t : toks) {
    if (t == kMaskToken && next < pool.size()) {
      out.push_back(pool[next++]);
    } else {
      out.push_back(t);  // an unfillable MASK stays; the caller rejects it
    }
  }
  return join(out, " ");
}

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string stub_paraphrases(const std::string& question, int n) {
  std::string base = trim(question);
  while (!base.empty() && (base.back() == '?' || base.back() == '.')) {
    base.pop_back();
    base = trim(base);
  }
  static const std::vector<std::string> prefixes = {
      "please tell me", "could you show", "i would like to know", "give me",
      "can you list"};
  std::vector<std::string> lines;
  for (int i = 0; i < n; ++i) {
    lines.push_back(prefixes[i % prefixes.size()] + " " + lower_first(base) +
                    (i % 2 == 0 ? " ?" : ""));
  }
  return join(lines, "\n");
}

std::string stub_extract_tables(const std::string& question, const std::string& tables) {
  std::string ql = to_lower(question);
  std::vector<std::string> hits;
  for (const auto& t : split_on(tables, ',')) {
    if (t.empty()) continue;
    if (ql.find(to_lower(t)) != std::string::npos) hits.push_back(t);
  }
  return join(hits, ", ");
}

std::string stub_fill_sql(const std::string& tpl, const std::string& schema_compact) {
  // schema_compact: "table:col1,col2;table2:col3"
  std::vector<std::pair<std::string, std::vector<std::string>>> tables;
  for (const auto& part : split_on(schema_compact, ';')) {
    if (part.empty()) continue;
    auto colon = part.find(':');
    if (colon == std::string::npos) continue;
    tables.emplace_back(trim(part.substr(0, colon)),
                        split_on(part.substr(colon + 1), ','));
  }
  if (tables.empty()) return tpl;
  // deterministic pick: the table with the most columns, first on ties
  size_t best = 0;
  for (size_t i = 1; i < tables.size(); ++i) {
    if (tables[i].second.size() > tables[best].second.size()) best = i;
  }
  const auto& table = tables[best].first;
  const auto& cols = tables[best].second;
  if (cols.empty()) return tpl;
  auto col = [&](size_t k) { return cols[std::min(k, cols.size() - 1)]; };

  std::map<std::string, std::string> values = {
      {"table", table},     {"table2", table},
      {"column", col(0)},   {"column2", col(1)}, {"column3", col(2)},
      {"agg", "count"},     {"op", ">"},
      {"value", "0"},       {"value2", "1"},     {"limit", "3"},
  };
  std::string out = tpl;
  for (const auto& [name, val] : values) {
    std::string needle = "{" + name + "}";
    size_t pos = 0;
    while ((pos = out.find(needle, pos)) != std::string::npos) {
      out.replace(pos, needle.size(), val);
      pos += val.size();
    }
  }
  return out;
}

std::string binding(const ChatRequest& r, const std::string& name) {
  auto it = r.prompt.bindings.find(name);
  if (it == r.prompt.bindings.end())
    throw LlmError("stub provider: request lacks binding '" + name + "'");
  return it->second;
}

}  // namespace

ChatResponse StubProvider::chat(const ChatRequest& request) {
  const std::string& id = request.prompt.template_id;
  std::string text;
  if (id == "explain_for_fill" || id == "explain_for_validate") {
    text = stub_explanation(binding(request, "query"));
  } else if (id == "describe_query") {
    text = stub_explanation(binding(request, "query"));
  } else if (id == "fill_template") {
    text = stub_fill(binding(request, "question_template"),
                     binding(request, "explanation"));
  } else if (id == "extract_tables") {
    text = stub_extract_tables(binding(request, "question"), binding(request, "tables"));
  } else if (id == "paraphrase_with_schema") {
    text = stub_paraphrases(binding(request, "question"),
                            std::stoi(binding(request, "n")));
  } else if (id == "paraphrase_description") {
    text = stub_paraphrases(binding(request, "description"),
                            std::stoi(binding(request, "n")));
  } else if (id == "fill_sql_template") {
    text = stub_fill_sql(binding(request, "sql_template"),
                         binding(request, "schema_compact"));
  } else {
    throw LlmError("stub provider: unknown template id '" + id + "'");
  }
  return ChatResponse{text, name(), false};
}

EmbeddingVector StubProvider::embed(const std::string& text) {
  if (trim(text).empty()) throw LlmError("cannot embed empty text");
  std::vector<double> v(embedding_dimension(), 0.0);
  std::string low = to_lower(text);
  if (low.size() < 3) low += std::string(3 - low.size(), '_');
  for (size_t i = 0; i + 3 <= low.size(); ++i) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (size_t k = 0; k < 3; ++k) {
      h ^= static_cast<unsigned char>(low[i + k]);
      h *= 0x100000001b3ULL;
    }
    v[h % v.size()] += 1.0;
  }
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double& x : v) x /= norm;
  }
  return EmbeddingVector{std::move(v), model_id()};
}

// --- http provider -------------------------------------------------------

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  const char* key = std::getenv(config_.api_key_env.c_str());
  if (!key || !*key)
    throw LlmError("API key environment variable '" + config_.api_key_env +
                   "' is not set");
  api_key_ = key;
}

std::string HttpProvider::post_json(const std::string& path, const std::string& body) {
  // base_url like https://api.example.com/v1
  std::string url = config_.base_url;
  std::string host_part = url;
  std::string prefix;
  auto scheme_end = url.find("://");
  size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto slash = url.find('/', host_start);
  if (slash != std::string::npos) {
    host_part = url.substr(0, slash);
    prefix = url.substr(slash);
  }
  httplib::Client client(host_part);
  client.set_connection_timeout(30);
  client.set_read_timeout(120);
  httplib::Headers headers = {{"Authorization", "Bearer " + api_key_}};

  int backoff = config_.initial_backoff_ms;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    auto res = client.Post(prefix + path, headers, body, "application/json");
    if (res) {
      if (res->status == 200) return res->body;
      if (res->status == 401 || res->status == 403)
        throw LlmError("provider auth failure (HTTP " + std::to_string(res->status) +
                       ")");
      if (res->status != 429 && res->status < 500)
        throw LlmError("provider error HTTP " + std::to_string(res->status) + ": " +
                       res->body);
    }
    if (attempt == config_.max_retries) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    backoff *= 2;
  }
  throw LlmError("provider request failed after " +
                 std::to_string(config_.max_retries + 1) + " attempts");
}

ChatResponse HttpProvider::chat(const ChatRequest& request) {
  if (trim(request.prompt.rendered).empty())
    throw LlmError("refusing to send an empty prompt");
  json body = {
      {"model", config_.chat_model},
      {"messages", json::array({{{"role", "user"}, {"content", request.prompt.rendered}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  json resp = json::parse(post_json("/chat/completions", body.dump()));
  const auto& choice = resp.at("choices").at(0);
  if (choice.value("finish_reason", "stop") == "length")
    throw LlmError("provider response was truncated (finish_reason=length)");
  return ChatResponse{choice.at("message").at("content").get<std::string>(), name(),
                      false};
}

EmbeddingVector HttpProvider::embed(const std::string& text) {
  if (trim(text).empty()) throw LlmError("cannot embed empty text");
  json body = {{"model", config_.embedding_model}, {"input", text}};
  json resp = json::parse(post_json("/embeddings", body.dump()));
  auto values = resp.at("data").at(0).at("embedding").get<std::vector<double>>();
  if (values.size() != config_.embedding_dim)
    throw LlmError("embedding dimension mismatch: got " +
                   std::to_string(values.size()));
  return EmbeddingVector{std::move(values), config_.embedding_model};
}

// --- caching wrapper -----------------------------------------------------

CachingProvider::CachingProvider(std::shared_ptr<Provider> inner, std::string cache_root)
    : inner_(std::move(inner)), cache_root_(std::move(cache_root)) {
  fs::create_directories(cache_root_);
}

std::string CachingProvider::chat_cache_key(const Provider& p, const ChatRequest& r) {
  json key = {
      {"kind", "chat"},
      {"provider", p.name()},
      {"model", p.model_id()},
      {"template_id", r.prompt.template_id},
      {"rendered", r.prompt.rendered},
      {"temperature", r.temperature},
      {"sample_index", r.sample_index},
  };
  return key.dump();
}

ChatResponse CachingProvider::chat(const ChatRequest& request) {
  std::string key = chat_cache_key(*inner_, request);
  fs::path path = fs::path(cache_root_) / (hex_digest(key) + ".json");
  if (fs::exists(path)) {
    std::ifstream in(path);
    json j;
    in >> j;
    return ChatResponse{j.at("text").get<std::string>(),
                        j.at("provider").get<std::string>(), true};
  }
  ChatResponse resp = inner_->chat(request);
  json j = {{"kind", "chat"}, {"text", resp.text}, {"provider", resp.provider},
            {"model", inner_->model_id()}, {"template_id", request.prompt.template_id}};
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(2) << "\n";
  }
  fs::rename(tmp, path);
  return resp;
}

EmbeddingVector CachingProvider::embed(const std::string& text) {
  json key = {{"kind", "embed"},
              {"provider", inner_->name()},
              {"model", inner_->model_id()},
              {"text", text}};
  fs::path path = fs::path(cache_root_) / (hex_digest(key.dump()) + ".json");
  if (fs::exists(path)) {
    std::ifstream in(path);
    json j;
    in >> j;
    return EmbeddingVector{j.at("values").get<std::vector<double>>(),
                           j.at("model").get<std::string>()};
  }
  EmbeddingVector v = inner_->embed(text);
  json j = {{"kind", "embed"}, {"values", v.values}, {"model", v.model_id}};
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump() << "\n";
  }
  fs::rename(tmp, path);
  return v;
}

}  // namespace reformer
