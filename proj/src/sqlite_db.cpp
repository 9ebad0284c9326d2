#include "reformer/sqlite_db.hpp"

#include <sqlite3.h>

#include <chrono>

namespace reformer {

SqliteDb::SqliteDb(const std::string& path, bool create) {
  int flags = SQLITE_OPEN_READWRITE | (create ? SQLITE_OPEN_CREATE : 0);
  if (sqlite3_open_v2(path.c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    if (db_) sqlite3_close(db_);
    db_ = nullptr;
    throw DbError("cannot open database '" + path + "': " + msg);
  }
}

SqliteDb::~SqliteDb() {
  if (db_) sqlite3_close(db_);
}

SqliteDb::SqliteDb(SqliteDb&& other) noexcept : db_(other.db_) { other.db_ = nullptr; }

SqliteDb& SqliteDb::operator=(SqliteDb&& other) noexcept {
  if (this != &other) {
    if (db_) sqlite3_close(db_);
    db_ = other.db_;
    other.db_ = nullptr;
  }
  return *this;
}

void SqliteDb::execute(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw DbError(msg);
  }
}

namespace {

struct TimeoutState {
  std::chrono::steady_clock::time_point deadline;
};

int progress_cb(void* ctx) {
  auto* state = static_cast<TimeoutState*>(ctx);
  return std::chrono::steady_clock::now() > state->deadline ? 1 : 0;
}

}  // namespace

SqliteDb::QueryResult SqliteDb::query(const std::string& sql, int max_rows,
                                      int timeout_ms) const {
  QueryResult result;
  sqlite3_stmt* stmt = nullptr;
  if (sqlite3_prepare_v2(db_, sql.c_str(), -1, &stmt, nullptr) != SQLITE_OK) {
    result.error = sqlite3_errmsg(db_);
    return result;
  }
  TimeoutState state{std::chrono::steady_clock::now() +
                     std::chrono::milliseconds(timeout_ms)};
  sqlite3_progress_handler(db_, 10000, progress_cb, &state);

  int rc;
  while ((rc = sqlite3_step(stmt)) == SQLITE_ROW) {
    if (static_cast<int>(result.rows.size()) >= max_rows) break;
    std::vector<std::string> row;
    int cols = sqlite3_column_count(stmt);
    for (int i = 0; i < cols; ++i) {
      const unsigned char* v = sqlite3_column_text(stmt, i);
      row.push_back(v ? reinterpret_cast<const char*>(v) : "");
    }
    result.rows.push_back(std::move(row));
  }
  sqlite3_progress_handler(db_, 0, nullptr, nullptr);
  if (rc == SQLITE_DONE || rc == SQLITE_ROW) {
    result.ok = true;
  } else if (rc == SQLITE_INTERRUPT) {
    result.error = "query timed out";
  } else {
    result.error = sqlite3_errmsg(db_);
  }
  sqlite3_finalize(stmt);
  return result;
}

std::vector<std::string> SqliteDb::distinct_values(const std::string& table,
                                                   const std::string& column,
                                                   int limit) const {
  std::string sql = "SELECT DISTINCT \"" + column + "\" FROM \"" + table +
                    "\" WHERE \"" + column + "\" IS NOT NULL ORDER BY \"" + column +
                    "\" LIMIT " + std::to_string(limit);
  QueryResult r = query(sql);
  if (!r.ok) throw DbError("distinct_values failed: " + r.error);
  std::vector<std::string> out;
  out.reserve(r.rows.size());
  for (auto& row : r.rows) out.push_back(std::move(row[0]));
  return out;
}

}  // namespace reformer
