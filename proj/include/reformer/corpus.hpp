#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace reformer {

struct ExamplePair {
  std::string question;
  std::string query;
  std::string db_id;

  bool operator==(const ExamplePair&) const = default;
};

struct ColumnRef {
  std::string table;
  std::string column;

  bool operator==(const ColumnRef&) const = default;
};

struct ColumnDef {
  std::string name;
  std::string type;  // Spider column_types entry (text, number, ...)
};

struct TableDef {
  std::string name;
  std::vector<ColumnDef> columns;
};

struct DatabaseSchema {
  std::string db_id;
  std::vector<TableDef> tables;
  std::vector<ColumnRef> primary_keys;
  std::vector<std::pair<ColumnRef, ColumnRef>> foreign_keys;

  const TableDef* find_table(const std::string& name) const;
  // Resolves an unqualified column name; returns candidates when ambiguous.
  std::vector<ColumnRef> resolve_column(const std::string& name) const;
};

using SchemaCatalog = std::map<std::string, DatabaseSchema>;

// db_id -> category label; unmapped ids fall into the "train" bucket.
using CategorySplit = std::map<std::string, std::string>;

struct CorpusError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<ExamplePair> load_examples(const std::string& path);
void save_examples(const std::vector<ExamplePair>& examples, const std::string& path);

SchemaCatalog load_schemas(const std::string& path);

CategorySplit load_category_split(const std::string& path);

std::map<std::string, std::vector<ExamplePair>> split_by_category(
    const std::vector<ExamplePair>& examples, const CategorySplit& split);

}  // namespace reformer
