#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

struct sqlite3;

namespace reformer {

struct DbError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Minimal RAII wrapper; one connection, not shared across threads.
class SqliteDb {
 public:
  explicit SqliteDb(const std::string& path, bool create = false);
  ~SqliteDb();
  SqliteDb(SqliteDb&&) noexcept;
  SqliteDb& operator=(SqliteDb&&) noexcept;
  SqliteDb(const SqliteDb&) = delete;
  SqliteDb& operator=(const SqliteDb&) = delete;

  void execute(const std::string& sql);

  struct QueryResult {
    bool ok = false;
    std::string error;
    std::vector<std::vector<std::string>> rows;
  };
  // Runs a SELECT with a row cap and statement timeout; errors are data,
  // not exceptions.
  QueryResult query(const std::string& sql, int max_rows = 1000,
                    int timeout_ms = 5000) const;

  // DISTINCT values of table.column, excluding NULLs.
  std::vector<std::string> distinct_values(const std::string& table,
                                           const std::string& column,
                                           int limit = 1000) const;

 private:
  sqlite3* db_ = nullptr;
};

}  // namespace reformer
