#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "reformer/corpus.hpp"

namespace reformer {

enum class NodeTag {
  Project,
  Filter,
  Join,
  Aggregate,
  GroupBy,
  OrderBy,
  Limit,
  Union,
  Except,
  Intersect,
  NestedIn,
  In,
  Between,
  Table,
  Column,
  Literal,
  And,
  Or,
  Not,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  Like,
};

// Ordered labeled tree node. `detail` carries the schema-specific payload
// (table name, "table.column", literal "num:10" / "str:x", aggregate
// function, sort direction); anonymization blanks it for Table/Column and
// keeps only the kind for Literal.
struct AlgebraNode {
  NodeTag tag = NodeTag::Table;
  std::string detail;
  std::vector<AlgebraNode> children;

  std::string label() const;
  int node_count() const;

  bool operator==(const AlgebraNode&) const = default;
};

struct AlgebraTree {
  AlgebraNode root;
  bool anonymized = false;

  int node_count() const { return root.node_count(); }

  bool operator==(const AlgebraTree&) const = default;
};

struct ConstantSite {
  std::vector<int> path;   // child indices from root to the Literal node
  std::string column;      // "table.column" the literal is compared against
  std::string value;       // literal text
  bool numeric = false;
};

struct SqlError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SqlSyntaxError : SqlError {
  size_t position;
  SqlSyntaxError(const std::string& msg, size_t pos)
      : SqlError(msg + " (at offset " + std::to_string(pos) + ")"), position(pos) {}
};
struct SqlUnsupportedError : SqlError {
  using SqlError::SqlError;
};
struct SqlResolutionError : SqlError {
  using SqlError::SqlError;
};

AlgebraTree parse_sql(const std::string& query, const DatabaseSchema& schema);

AlgebraTree anonymize(const AlgebraTree& tree);

// Rejects anonymized input. Output re-parses to a structurally equal tree.
std::string emit_sql(const AlgebraTree& tree);

std::vector<ConstantSite> find_constants(const AlgebraTree& tree);

// Replaces the Literal at `path` with a new value of the same kind.
void replace_constant(AlgebraTree& tree, const std::vector<int>& path,
                      const std::string& new_value);

// Digest of the anonymized label structure; distance-cache key material.
std::string tree_hash(const AlgebraTree& tree);

}  // namespace reformer
