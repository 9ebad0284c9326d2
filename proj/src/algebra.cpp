#include "reformer/algebra.hpp"

#include <cctype>
#include <functional>

#include "reformer/text.hpp"

namespace reformer {

namespace {

const char* tag_name(NodeTag t) {
  switch (t) {
    case NodeTag::Project: return "Project";
    case NodeTag::Filter: return "Filter";
    case NodeTag::Join: return "Join";
    case NodeTag::Aggregate: return "Agg";
    case NodeTag::GroupBy: return "GroupBy";
    case NodeTag::OrderBy: return "OrderBy";
    case NodeTag::Limit: return "Limit";
    case NodeTag::Union: return "Union";
    case NodeTag::Except: return "Except";
    case NodeTag::Intersect: return "Intersect";
    case NodeTag::NestedIn: return "NestedIn";
    case NodeTag::In: return "In";
    case NodeTag::Between: return "Between";
    case NodeTag::Table: return "Table";
    case NodeTag::Column: return "Column";
    case NodeTag::Literal: return "Literal";
    case NodeTag::And: return "And";
    case NodeTag::Or: return "Or";
    case NodeTag::Not: return "Not";
    case NodeTag::Eq: return "Eq";
    case NodeTag::Ne: return "Ne";
    case NodeTag::Lt: return "Lt";
    case NodeTag::Le: return "Le";
    case NodeTag::Gt: return "Gt";
    case NodeTag::Ge: return "Ge";
    case NodeTag::Like: return "Like";
  }
  return "?";
}

// --- lexer ---------------------------------------------------------------

enum class TokKind { Ident, Number, String, Op, End };

struct Token {
  TokKind kind;
  std::string text;  // idents kept verbatim; keyword checks fold case
  size_t pos;
};

std::vector<Token> lex(const std::string& sql) {
  std::vector<Token> toks;
  size_t i = 0;
  const size_t n = sql.size();
  while (i < n) {
    char c = sql[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < n && (std::isalnum(static_cast<unsigned char>(sql[i])) || sql[i] == '_'))
        ++i;
      toks.push_back({TokKind::Ident, sql.substr(start, i - start), start});
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(sql[i + 1])))) {
      while (i < n && (std::isdigit(static_cast<unsigned char>(sql[i])) || sql[i] == '.'))
        ++i;
      toks.push_back({TokKind::Number, sql.substr(start, i - start), start});
    } else if (c == '\'' || c == '"') {
      char quote = c;
      ++i;
      std::string val;
      while (i < n) {
        if (sql[i] == quote) {
          if (i + 1 < n && sql[i + 1] == quote) {  // doubled-quote escape
            val += quote;
            i += 2;
            continue;
          }
          break;
        }
        val += sql[i++];
      }
      if (i >= n) throw SqlSyntaxError("unterminated string literal", start);
      ++i;
      // Double-quoted identifiers are treated as idents, per SQL.
      toks.push_back({quote == '\'' ? TokKind::String : TokKind::Ident, val, start});
    } else {
      static const char* two_char[] = {"<=", ">=", "!=", "<>"};
      bool matched = false;
      for (const char* op : two_char) {
        if (sql.compare(i, 2, op) == 0) {
          toks.push_back({TokKind::Op, op, start});
          i += 2;
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string("=<>(),.*;+-/%").find(c) == std::string::npos)
          throw SqlSyntaxError(std::string("unexpected character '") + c + "'", start);
        toks.push_back({TokKind::Op, std::string(1, c), start});
        ++i;
      }
    }
  }
  toks.push_back({TokKind::End, "", n});
  return toks;
}

// --- parser --------------------------------------------------------------

const std::vector<std::string> kAggFns = {"count", "sum", "avg", "min", "max"};

class Parser {
 public:
  Parser(const std::string& sql, const DatabaseSchema& schema)
      : schema_(schema), toks_(lex(sql)) {}

  AlgebraNode parse() {
    AlgebraNode root = parse_query();
    if (peek().text == ";") advance();
    if (peek().kind != TokKind::End)
      throw SqlSyntaxError("trailing input after query: '" + peek().text + "'", peek().pos);
    return root;
  }

 private:
  struct Scope {
    // alias (lowercased) -> schema table name
    std::vector<std::pair<std::string, std::string>> entries;
  };

  const Token& peek(int ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& advance() { return toks_[pos_++]; }

  bool is_kw(const Token& t, const char* kw) const {
    return t.kind == TokKind::Ident && to_lower(t.text) == kw;
  }
  bool accept_kw(const char* kw) {
    if (is_kw(peek(), kw)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_kw(const char* kw) {
    if (!accept_kw(kw))
      throw SqlSyntaxError(std::string("expected '") + kw + "', got '" + peek().text + "'",
                           peek().pos);
  }
  bool accept_op(const char* op) {
    if (peek().kind == TokKind::Op && peek().text == op) {
      advance();
      return true;
    }
    return false;
  }
  void expect_op(const char* op) {
    if (!accept_op(op))
      throw SqlSyntaxError(std::string("expected '") + op + "', got '" + peek().text + "'",
                           peek().pos);
  }

  AlgebraNode parse_query() {
    AlgebraNode left = parse_select();
    while (true) {
      NodeTag set_tag;
      if (is_kw(peek(), "union")) set_tag = NodeTag::Union;
      else if (is_kw(peek(), "except")) set_tag = NodeTag::Except;
      else if (is_kw(peek(), "intersect")) set_tag = NodeTag::Intersect;
      else break;
      advance();
      std::string detail = accept_kw("all") ? "all" : "";
      AlgebraNode right = parse_select();
      left = AlgebraNode{set_tag, detail, {std::move(left), std::move(right)}};
    }
    return left;
  }

  AlgebraNode parse_select() {
    expect_kw("select");
    bool distinct = accept_kw("distinct");

    // Select items are parsed after FROM so the scope is known; remember
    // the token range and come back.
    size_t items_start = pos_;
    int depth = 0;
    while (true) {
      const Token& t = peek();
      if (t.kind == TokKind::End)
        throw SqlSyntaxError("expected FROM clause", t.pos);
      if (depth == 0 && is_kw(t, "from")) break;
      if (t.kind == TokKind::Op && t.text == "(") ++depth;
      if (t.kind == TokKind::Op && t.text == ")") --depth;
      advance();
    }
    size_t items_end = pos_;
    if (items_end == items_start)
      throw SqlSyntaxError("empty select list", peek().pos);
    expect_kw("from");

    Scope scope;
    AlgebraNode from = parse_from(scope);

    AlgebraNode rel = std::move(from);
    if (accept_kw("where")) {
      AlgebraNode cond = parse_expr(scope);
      rel = AlgebraNode{NodeTag::Filter, "", {std::move(cond), std::move(rel)}};
    }
    bool has_group = false;
    if (is_kw(peek(), "group")) {
      advance();
      expect_kw("by");
      std::vector<AlgebraNode> children;
      do {
        children.push_back(parse_operand(scope));
      } while (accept_op(","));
      children.push_back(std::move(rel));
      rel = AlgebraNode{NodeTag::GroupBy, "", std::move(children)};
      has_group = true;
    }
    if (accept_kw("having")) {
      if (!has_group)
        throw SqlSyntaxError("HAVING without GROUP BY", peek().pos);
      AlgebraNode cond = parse_expr(scope);
      rel = AlgebraNode{NodeTag::Filter, "", {std::move(cond), std::move(rel)}};
    }

    // Now the deferred select list.
    size_t after = pos_;
    pos_ = items_start;
    std::vector<AlgebraNode> items;
    do {
      items.push_back(parse_operand(scope));
    } while (accept_op(","));
    if (pos_ != items_end)
      throw SqlSyntaxError("unexpected token in select list: '" + peek().text + "'",
                           peek().pos);
    pos_ = after;
    items.push_back(std::move(rel));
    rel = AlgebraNode{NodeTag::Project, distinct ? "distinct" : "", std::move(items)};

    if (is_kw(peek(), "order")) {
      advance();
      expect_kw("by");
      std::vector<AlgebraNode> keys;
      std::vector<std::string> dirs;
      do {
        keys.push_back(parse_operand(scope));
        if (accept_kw("desc")) dirs.push_back("desc");
        else {
          accept_kw("asc");
          dirs.push_back("asc");
        }
      } while (accept_op(","));
      keys.push_back(std::move(rel));
      rel = AlgebraNode{NodeTag::OrderBy, join(dirs, ","), std::move(keys)};
    }
    if (accept_kw("limit")) {
      const Token& t = peek();
      if (t.kind != TokKind::Number)
        throw SqlSyntaxError("expected numeric LIMIT, got '" + t.text + "'", t.pos);
      advance();
      AlgebraNode lit{NodeTag::Literal, "num:" + t.text, {}};
      rel = AlgebraNode{NodeTag::Limit, "", {std::move(lit), std::move(rel)}};
    }
    return rel;
  }

  AlgebraNode make_table(Scope& scope) {
    const Token& t = peek();
    if (t.kind != TokKind::Ident)
      throw SqlSyntaxError("expected table name, got '" + t.text + "'", t.pos);
    if (t.kind == TokKind::Op && t.text == "(")
      throw SqlUnsupportedError("subquery in FROM clause is not supported");
    advance();
    const TableDef* table = schema_.find_table(t.text);
    if (!table)
      throw SqlResolutionError("unknown table '" + t.text + "' in database '" +
                               schema_.db_id + "'");
    std::string alias = to_lower(table->name);
    if (accept_kw("as")) {
      const Token& a = advance();
      alias = to_lower(a.text);
    } else if (peek().kind == TokKind::Ident && !is_reserved(peek())) {
      alias = to_lower(advance().text);
    }
    for (const auto& [_, existing] : scope.entries) {
      if (to_lower(existing) == to_lower(table->name))
        throw SqlUnsupportedError("self-join of table '" + table->name +
                                  "' is not supported");
    }
    scope.entries.emplace_back(alias, table->name);
    if (alias != to_lower(table->name))
      scope.entries.emplace_back(to_lower(table->name), table->name);
    return AlgebraNode{NodeTag::Table, table->name, {}};
  }

  bool is_reserved(const Token& t) const {
    static const std::vector<std::string> kw = {
        "where", "group",  "having", "order", "limit",  "join", "on",
        "union", "except", "intersect", "inner", "left", "as",   "select",
        "from",  "and",    "or",     "not",   "in",     "like", "between",
        "asc",   "desc",   "distinct"};
    std::string low = to_lower(t.text);
    for (const auto& k : kw)
      if (low == k) return true;
    return false;
  }

  AlgebraNode parse_from(Scope& scope) {
    if (peek().kind == TokKind::Op && peek().text == "(")
      throw SqlUnsupportedError("subquery in FROM clause is not supported");
    AlgebraNode rel = make_table(scope);
    while (true) {
      if (accept_op(",")) {
        AlgebraNode right = make_table(scope);
        rel = AlgebraNode{NodeTag::Join, "", {std::move(rel), std::move(right)}};
        continue;
      }
      bool is_join = false;
      if (is_kw(peek(), "join")) {
        advance();
        is_join = true;
      } else if (is_kw(peek(), "inner") || is_kw(peek(), "left")) {
        advance();
        accept_kw("outer");
        expect_kw("join");
        is_join = true;
      }
      if (!is_join) break;
      AlgebraNode right = make_table(scope);
      std::vector<AlgebraNode> children;
      children.push_back(std::move(rel));
      children.push_back(std::move(right));
      if (accept_kw("on")) {
        AlgebraNode cond = parse_expr(scope);
        children.push_back(
            AlgebraNode{NodeTag::Filter, "", {std::move(cond)}});
      }
      rel = AlgebraNode{NodeTag::Join, "", std::move(children)};
    }
    return rel;
  }

  AlgebraNode resolve_column(const std::string& qualifier, const std::string& name,
                             const Scope& scope) {
    if (name == "*") {
      return AlgebraNode{NodeTag::Column, "*", {}};
    }
    std::string want = to_lower(name);
    if (!qualifier.empty()) {
      std::string q = to_lower(qualifier);
      for (const auto& [alias, table_name] : scope.entries) {
        if (alias != q) continue;
        const TableDef* t = schema_.find_table(table_name);
        for (const auto& c : t->columns) {
          if (to_lower(c.name) == want)
            return AlgebraNode{NodeTag::Column, t->name + "." + c.name, {}};
        }
        throw SqlResolutionError("column '" + name + "' not found in table '" +
                                 table_name + "'");
      }
      throw SqlResolutionError("unknown table or alias '" + qualifier + "'");
    }
    std::vector<std::string> hits;
    for (const auto& [alias, table_name] : scope.entries) {
      const TableDef* t = schema_.find_table(table_name);
      for (const auto& c : t->columns) {
        if (to_lower(c.name) == want) {
          std::string full = t->name + "." + c.name;
          if (std::find(hits.begin(), hits.end(), full) == hits.end())
            hits.push_back(full);
        }
      }
    }
    if (hits.size() == 1) return AlgebraNode{NodeTag::Column, hits[0], {}};
    if (hits.empty()) {
      auto candidates = schema_.resolve_column(name);
      std::string cand;
      for (const auto& c : candidates) cand += " " + c.table + "." + c.column;
      throw SqlResolutionError("cannot resolve column '" + name +
                               "' in current scope; schema candidates:" +
                               (cand.empty() ? " none" : cand));
    }
    throw SqlResolutionError("ambiguous column '" + name + "': " + join(hits, ", "));
  }

  AlgebraNode parse_operand(const Scope& scope) {
    const Token& t = peek();
    if (t.kind == TokKind::Number) {
      advance();
      return AlgebraNode{NodeTag::Literal, "num:" + t.text, {}};
    }
    if (t.kind == TokKind::String) {
      advance();
      return AlgebraNode{NodeTag::Literal, "str:" + t.text, {}};
    }
    if (t.kind == TokKind::Op && t.text == "*") {
      advance();
      return AlgebraNode{NodeTag::Column, "*", {}};
    }
    if (t.kind == TokKind::Op && t.text == "(") {
      advance();
      if (!is_kw(peek(), "select"))
        throw SqlUnsupportedError("parenthesized expressions are not supported");
      AlgebraNode sub = parse_query();
      expect_op(")");
      return sub;
    }
    if (t.kind != TokKind::Ident)
      throw SqlSyntaxError("expected expression, got '" + t.text + "'", t.pos);

    std::string low = to_lower(t.text);
    if (std::find(kAggFns.begin(), kAggFns.end(), low) != kAggFns.end() &&
        peek(1).kind == TokKind::Op && peek(1).text == "(") {
      advance();
      advance();  // '('
      std::string detail = low;
      if (accept_kw("distinct")) detail += ":distinct";
      AlgebraNode arg = parse_operand(scope);
      expect_op(")");
      return AlgebraNode{NodeTag::Aggregate, detail, {std::move(arg)}};
    }
    advance();
    std::string qualifier;
    std::string name = t.text;
    if (accept_op(".")) {
      qualifier = name;
      if (peek().kind == TokKind::Op && peek().text == "*") {
        advance();
        name = "*";
      } else {
        name = advance().text;
      }
    }
    if (name == "*") {
      // table.* folds to the bare star column
      return AlgebraNode{NodeTag::Column, "*", {}};
    }
    return resolve_column(qualifier, name, scope);
  }

  AlgebraNode parse_predicate(const Scope& scope) {
    AlgebraNode left = parse_operand(scope);
    bool negate = false;
    if (accept_kw("not")) negate = true;
    AlgebraNode result;
    if (accept_kw("in")) {
      expect_op("(");
      if (is_kw(peek(), "select")) {
        AlgebraNode sub = parse_query();
        expect_op(")");
        result = AlgebraNode{NodeTag::NestedIn, "", {std::move(left), std::move(sub)}};
      } else {
        std::vector<AlgebraNode> children;
        children.push_back(std::move(left));
        do {
          children.push_back(parse_operand(scope));
        } while (accept_op(","));
        expect_op(")");
        result = AlgebraNode{NodeTag::In, "", std::move(children)};
      }
    } else if (accept_kw("like")) {
      AlgebraNode pat = parse_operand(scope);
      result = AlgebraNode{NodeTag::Like, "", {std::move(left), std::move(pat)}};
    } else if (accept_kw("between")) {
      AlgebraNode lo = parse_operand(scope);
      expect_kw("and");
      AlgebraNode hi = parse_operand(scope);
      result = AlgebraNode{NodeTag::Between, "",
                           {std::move(left), std::move(lo), std::move(hi)}};
    } else if (negate) {
      throw SqlSyntaxError("expected IN/LIKE/BETWEEN after NOT", peek().pos);
    } else {
      NodeTag cmp;
      const Token& op = peek();
      if (op.kind != TokKind::Op)
        throw SqlSyntaxError("expected comparison operator, got '" + op.text + "'",
                             op.pos);
      if (op.text == "=") cmp = NodeTag::Eq;
      else if (op.text == "!=" || op.text == "<>") cmp = NodeTag::Ne;
      else if (op.text == "<") cmp = NodeTag::Lt;
      else if (op.text == "<=") cmp = NodeTag::Le;
      else if (op.text == ">") cmp = NodeTag::Gt;
      else if (op.text == ">=") cmp = NodeTag::Ge;
      else
        throw SqlSyntaxError("expected comparison operator, got '" + op.text + "'",
                             op.pos);
      advance();
      AlgebraNode right = parse_operand(scope);
      result = AlgebraNode{cmp, "", {std::move(left), std::move(right)}};
    }
    if (negate) result = AlgebraNode{NodeTag::Not, "", {std::move(result)}};
    return result;
  }

  AlgebraNode parse_not(const Scope& scope) {
    if (accept_kw("not")) {
      AlgebraNode inner = parse_not(scope);
      return AlgebraNode{NodeTag::Not, "", {std::move(inner)}};
    }
    return parse_predicate(scope);
  }

  AlgebraNode parse_and(const Scope& scope) {
    AlgebraNode left = parse_not(scope);
    while (accept_kw("and")) {
      AlgebraNode right = parse_not(scope);
      left = AlgebraNode{NodeTag::And, "", {std::move(left), std::move(right)}};
    }
    return left;
  }

  AlgebraNode parse_expr(const Scope& scope) {
    AlgebraNode left = parse_and(scope);
    while (accept_kw("or")) {
      AlgebraNode right = parse_and(scope);
      left = AlgebraNode{NodeTag::Or, "", {std::move(left), std::move(right)}};
    }
    return left;
  }

  const DatabaseSchema& schema_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
};

// --- emitter -------------------------------------------------------------

class Emitter {
 public:
  std::string emit_query(const AlgebraNode& n) {
    switch (n.tag) {
      case NodeTag::Union:
        return emit_query(n.children[0]) +
               (n.detail == "all" ? " UNION ALL " : " UNION ") +
               emit_query(n.children[1]);
      case NodeTag::Except:
        return emit_query(n.children[0]) + " EXCEPT " + emit_query(n.children[1]);
      case NodeTag::Intersect:
        return emit_query(n.children[0]) + " INTERSECT " + emit_query(n.children[1]);
      default:
        return emit_select(n);
    }
  }

 private:
  std::string emit_select(const AlgebraNode& node) {
    const AlgebraNode* cur = &node;
    std::string limit_txt, order_txt;
    if (cur->tag == NodeTag::Limit) {
      limit_txt = " LIMIT " + literal_text(cur->children[0]);
      cur = &cur->children[1];
    }
    if (cur->tag == NodeTag::OrderBy) {
      std::vector<std::string> dirs;
      {
        std::string d = cur->detail;
        size_t p = 0;
        while (true) {
          size_t q = d.find(',', p);
          dirs.push_back(d.substr(p, q - p));
          if (q == std::string::npos) break;
          p = q + 1;
        }
      }
      std::vector<std::string> keys;
      for (size_t i = 0; i + 1 < cur->children.size(); ++i) {
        std::string k = emit_expr(cur->children[i]);
        if (i < dirs.size() && dirs[i] == "desc") k += " DESC";
        keys.push_back(std::move(k));
      }
      order_txt = " ORDER BY " + join(keys, ", ");
      cur = &cur->children.back();
    }
    if (cur->tag != NodeTag::Project)
      throw SqlError("malformed tree: expected Project, got " +
                     std::string(tag_name(cur->tag)));
    std::vector<std::string> items;
    for (size_t i = 0; i + 1 < cur->children.size(); ++i)
      items.push_back(emit_expr(cur->children[i]));
    std::string select_txt = std::string("SELECT ") +
                             (cur->detail == "distinct" ? "DISTINCT " : "") +
                             join(items, ", ");
    cur = &cur->children.back();

    std::string having_txt;
    if (cur->tag == NodeTag::Filter && cur->children[1].tag == NodeTag::GroupBy) {
      having_txt = " HAVING " + emit_expr(cur->children[0]);
      cur = &cur->children[1];
    }
    std::string group_txt;
    if (cur->tag == NodeTag::GroupBy) {
      std::vector<std::string> keys;
      for (size_t i = 0; i + 1 < cur->children.size(); ++i)
        keys.push_back(emit_expr(cur->children[i]));
      group_txt = " GROUP BY " + join(keys, ", ");
      cur = &cur->children.back();
    }
    std::string where_txt;
    if (cur->tag == NodeTag::Filter) {
      where_txt = " WHERE " + emit_expr(cur->children[0]);
      cur = &cur->children[1];
    }
    std::string from_txt = " FROM " + emit_from(*cur);
    return select_txt + from_txt + where_txt + group_txt + having_txt + order_txt +
           limit_txt;
  }

  std::string emit_from(const AlgebraNode& n) {
    if (n.tag == NodeTag::Table) return n.detail;
    if (n.tag != NodeTag::Join)
      throw SqlError("malformed tree: expected Table/Join in FROM, got " +
                     std::string(tag_name(n.tag)));
    std::string left = emit_from(n.children[0]);
    std::string right = emit_from(n.children[1]);
    if (n.children.size() == 3) {
      return left + " JOIN " + right + " ON " + emit_expr(n.children[2].children[0]);
    }
    return left + ", " + right;
  }

  std::string literal_text(const AlgebraNode& n) {
    if (n.tag != NodeTag::Literal) throw SqlError("expected Literal node");
    if (n.detail.rfind("num:", 0) == 0) return n.detail.substr(4);
    if (n.detail.rfind("str:", 0) == 0) {
      std::string v = n.detail.substr(4);
      std::string escaped;
      for (char c : v) {
        escaped += c;
        if (c == '\'') escaped += '\'';
      }
      return "'" + escaped + "'";
    }
    throw SqlError("anonymized literal cannot be emitted");
  }

  std::string emit_expr(const AlgebraNode& n) {
    switch (n.tag) {
      case NodeTag::Column:
        return n.detail;
      case NodeTag::Literal:
        return literal_text(n);
      case NodeTag::Aggregate: {
        std::string fn = n.detail;
        bool distinct = false;
        if (auto p = fn.find(":distinct"); p != std::string::npos) {
          fn = fn.substr(0, p);
          distinct = true;
        }
        return fn + "(" + (distinct ? "DISTINCT " : "") + emit_expr(n.children[0]) + ")";
      }
      case NodeTag::And:
        return emit_expr(n.children[0]) + " AND " + emit_expr(n.children[1]);
      case NodeTag::Or:
        return "(" + emit_expr(n.children[0]) + " OR " + emit_expr(n.children[1]) + ")";
      case NodeTag::Not:
        if (n.children[0].tag == NodeTag::NestedIn || n.children[0].tag == NodeTag::In) {
          return emit_in(n.children[0], true);
        }
        return "NOT (" + emit_expr(n.children[0]) + ")";
      case NodeTag::NestedIn:
      case NodeTag::In:
        return emit_in(n, false);
      case NodeTag::Between:
        return emit_expr(n.children[0]) + " BETWEEN " + emit_expr(n.children[1]) +
               " AND " + emit_expr(n.children[2]);
      case NodeTag::Like:
        return emit_expr(n.children[0]) + " LIKE " + emit_expr(n.children[1]);
      case NodeTag::Eq:
        return cmp(n, "=");
      case NodeTag::Ne:
        return cmp(n, "!=");
      case NodeTag::Lt:
        return cmp(n, "<");
      case NodeTag::Le:
        return cmp(n, "<=");
      case NodeTag::Gt:
        return cmp(n, ">");
      case NodeTag::Ge:
        return cmp(n, ">=");
      default:
        // A relational subtree in expression position is a scalar subquery.
        return "(" + emit_query(n) + ")";
    }
  }

  std::string emit_in(const AlgebraNode& n, bool negated) {
    std::string head = emit_expr(n.children[0]) + (negated ? " NOT IN (" : " IN (");
    if (n.tag == NodeTag::NestedIn) {
      return head + emit_query(n.children[1]) + ")";
    }
    std::vector<std::string> vals;
    for (size_t i = 1; i < n.children.size(); ++i)
      vals.push_back(emit_expr(n.children[i]));
    return head + join(vals, ", ") + ")";
  }

  std::string cmp(const AlgebraNode& n, const char* op) {
    return emit_expr(n.children[0]) + " " + op + " " + emit_expr(n.children[1]);
  }
};

}  // namespace

std::string AlgebraNode::label() const {
  switch (tag) {
    case NodeTag::Table:
      return detail.empty() ? "TABLE" : "Table:" + detail;
    case NodeTag::Column:
      return detail.empty() ? "COLUMN" : "Column:" + detail;
    case NodeTag::Literal:
      if (detail == "num" || detail == "str") return "LITERAL:" + detail;
      return "Literal:" + detail;
    case NodeTag::Aggregate:
      return "Agg:" + detail;
    case NodeTag::OrderBy:
      return "OrderBy:" + detail;
    case NodeTag::Project:
      return detail == "distinct" ? "Project:distinct" : "Project";
    default: {
      std::string s = tag_name(tag);
      if (!detail.empty()) s += ":" + detail;
      return s;
    }
  }
}

int AlgebraNode::node_count() const {
  int n = 1;
  for (const auto& c : children) n += c.node_count();
  return n;
}

AlgebraTree parse_sql(const std::string& query, const DatabaseSchema& schema) {
  Parser p(query, schema);
  return AlgebraTree{p.parse(), false};
}

namespace {

void anonymize_node(AlgebraNode& n) {
  switch (n.tag) {
    case NodeTag::Table:
    case NodeTag::Column:
      n.detail.clear();
      break;
    case NodeTag::Literal:
      n.detail = n.detail.rfind("num:", 0) == 0 ? "num" : "str";
      break;
    default:
      break;
  }
  for (auto& c : n.children) anonymize_node(c);
}

}  // namespace

AlgebraTree anonymize(const AlgebraTree& tree) {
  AlgebraTree out = tree;
  anonymize_node(out.root);
  out.anonymized = true;
  return out;
}

std::string emit_sql(const AlgebraTree& tree) {
  if (tree.anonymized) throw SqlError("cannot emit SQL from an anonymized tree");
  Emitter e;
  return e.emit_query(tree.root);
}

namespace {

bool is_comparison(NodeTag t) {
  return t == NodeTag::Eq || t == NodeTag::Ne || t == NodeTag::Lt ||
         t == NodeTag::Le || t == NodeTag::Gt || t == NodeTag::Ge ||
         t == NodeTag::Like || t == NodeTag::Between || t == NodeTag::In;
}

void collect_constants(const AlgebraNode& n, std::vector<int>& path,
                       std::vector<ConstantSite>& out) {
  if (is_comparison(n.tag) && n.children[0].tag == NodeTag::Column &&
      n.children[0].detail != "*") {
    const std::string& column = n.children[0].detail;
    for (size_t i = 1; i < n.children.size(); ++i) {
      if (n.children[i].tag != NodeTag::Literal) continue;
      ConstantSite site;
      site.path = path;
      site.path.push_back(static_cast<int>(i));
      site.column = column;
      bool numeric = n.children[i].detail.rfind("num:", 0) == 0;
      site.numeric = numeric;
      site.value = n.children[i].detail.substr(4);
      out.push_back(std::move(site));
    }
  }
  for (size_t i = 0; i < n.children.size(); ++i) {
    path.push_back(static_cast<int>(i));
    collect_constants(n.children[i], path, out);
    path.pop_back();
  }
}

}  // namespace

std::vector<ConstantSite> find_constants(const AlgebraTree& tree) {
  std::vector<ConstantSite> out;
  std::vector<int> path;
  collect_constants(tree.root, path, out);
  return out;
}

void replace_constant(AlgebraTree& tree, const std::vector<int>& path,
                      const std::string& new_value) {
  AlgebraNode* n = &tree.root;
  for (int idx : path) {
    if (idx < 0 || static_cast<size_t>(idx) >= n->children.size())
      throw SqlError("constant path does not resolve");
    n = &n->children[idx];
  }
  if (n->tag != NodeTag::Literal) throw SqlError("constant path is not a literal");
  std::string kind = n->detail.rfind("num:", 0) == 0 ? "num:" : "str:";
  n->detail = kind + new_value;
}

namespace {

void hash_node(const AlgebraNode& n, std::string& buf) {
  buf += n.label();
  buf += '(';
  for (const auto& c : n.children) hash_node(c, buf);
  buf += ')';
}

}  // namespace

std::string tree_hash(const AlgebraTree& tree) {
  std::string buf;
  hash_node(tree.root, buf);
  return hex_digest(buf);
}

}  // namespace reformer
