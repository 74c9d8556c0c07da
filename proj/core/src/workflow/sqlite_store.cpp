#include <sqlite3.h>

#include "restcheck/workflow/store.hpp"

namespace restcheck::workflow {

namespace {

// Entity tables in bundle order. Rows keep insertion order via rowid.
constexpr const char* kEntityTables[] = {"scenarios", "scripts", "executions", "metric_records", "actions",
                                         "completions"};

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(ErrorCode::store_unavailable, std::string("sqlite prepare failed: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int index, const std::string& text) {
    sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& bind(int index, int value) {
    sqlite3_bind_int(stmt_, index, value);
    return *this;
  }
  bool step() {
    int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(ErrorCode::store_unavailable, std::string("sqlite step failed: ") + sqlite3_errmsg(db_));
  }
  void run() {
    step();
    sqlite3_reset(stmt_);
    sqlite3_clear_bindings(stmt_);
  }
  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p == nullptr ? std::string() : std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)));
  }
  int integer(int col) const { return sqlite3_column_int(stmt_, col); }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

void exec_sql(sqlite3* db, const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err != nullptr ? err : "unknown error";
    sqlite3_free(err);
    throw Error(ErrorCode::store_unavailable, "sqlite: " + msg);
  }
}

}  // namespace

struct SqliteStore::Db {
  sqlite3* handle = nullptr;
  ~Db() {
    if (handle != nullptr) sqlite3_close(handle);
  }
};

SqliteStore::SqliteStore(const std::string& path) : db_(std::make_unique<Db>()) {
  if (sqlite3_open_v2(path.c_str(), &db_->handle, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    std::string msg = db_->handle != nullptr ? sqlite3_errmsg(db_->handle) : "out of memory";
    throw Error(ErrorCode::store_unavailable, "cannot open store " + path + ": " + msg);
  }
  sqlite3_busy_timeout(db_->handle, 5000);
  std::string ddl =
      "CREATE TABLE IF NOT EXISTS projects (id TEXT PRIMARY KEY, schema_version INTEGER NOT NULL, json TEXT NOT NULL);"
      "CREATE TABLE IF NOT EXISTS operations (project_id TEXT NOT NULL, id TEXT NOT NULL, json TEXT NOT NULL,"
      " PRIMARY KEY (project_id, id));";
  for (const char* table : kEntityTables) {
    ddl += std::string("CREATE TABLE IF NOT EXISTS ") + table +
           " (project_id TEXT NOT NULL, id TEXT NOT NULL, json TEXT NOT NULL, PRIMARY KEY (project_id, id));";
  }
  exec_sql(db_->handle, ddl);
}

SqliteStore::~SqliteStore() = default;

void SqliteStore::save(const Project& p) {
  Json bundle = to_bundle(p);
  std::lock_guard lock(mutex_);
  sqlite3* db = db_->handle;
  exec_sql(db, "BEGIN IMMEDIATE");
  try {
    Json meta{{"format", bundle["format"]}, {"project", bundle["project"]}, {"spec", bundle["spec"]}};
    meta["spec"].erase("operations");
    Statement put(db,
        "INSERT INTO projects (id, schema_version, json) VALUES (?1, ?2, ?3) "
        "ON CONFLICT(id) DO UPDATE SET schema_version = excluded.schema_version, json = excluded.json");
    put.bind(1, p.id).bind(2, kBundleVersion).bind(3, meta.dump());
    put.run();

    Statement clear_ops(db, "DELETE FROM operations WHERE project_id = ?1");
    clear_ops.bind(1, p.id);
    clear_ops.run();
    Statement put_op(db, "INSERT INTO operations (project_id, id, json) VALUES (?1, ?2, ?3)");
    for (const auto& op : bundle["spec"]["operations"]) {
      put_op.bind(1, p.id).bind(2, op["id"].get<std::string>()).bind(3, op.dump());
      put_op.run();
    }

    for (const char* table : kEntityTables) {
      Statement clear(db, (std::string("DELETE FROM ") + table + " WHERE project_id = ?1").c_str());
      clear.bind(1, p.id);
      clear.run();
      Statement insert(db, (std::string("INSERT INTO ") + table + " (project_id, id, json) VALUES (?1, ?2, ?3)").c_str());
      int seq = 0;
      for (const auto& row : bundle[table]) {
        // The action log has no entity id of its own.
        std::string id = row.contains("id") ? row["id"].get<std::string>() : std::to_string(++seq);
        insert.bind(1, p.id).bind(2, id).bind(3, row.dump());
        insert.run();
      }
    }
    exec_sql(db, "COMMIT");
  } catch (...) {
    sqlite3_exec(db, "ROLLBACK", nullptr, nullptr, nullptr);
    throw;
  }
}

Project SqliteStore::load(std::string_view id) {
  std::lock_guard lock(mutex_);
  sqlite3* db = db_->handle;
  const std::string pid(id);
  Statement get(db, "SELECT schema_version, json FROM projects WHERE id = ?1");
  get.bind(1, pid);
  if (!get.step()) throw Error(ErrorCode::not_found, "project " + pid + " not found");
  const int version = get.integer(0);
  if (version != kBundleVersion) {
    throw Error(ErrorCode::version_mismatch,
                "stored project " + pid + " has schema version " + std::to_string(version) + ", expected " +
                    std::to_string(kBundleVersion),
                Json{{"found", version}, {"expected", kBundleVersion}});
  }
  Json meta = Json::parse(get.text(1));
  Json bundle{{"format", meta["format"]}, {"version", version}, {"project", meta["project"]}, {"spec", meta["spec"]}};
  bundle["spec"]["operations"] = Json::array();
  for (const char* table : kEntityTables) {
    Statement rows(db, (std::string("SELECT json FROM ") + table + " WHERE project_id = ?1 ORDER BY rowid").c_str());
    rows.bind(1, pid);
    Json arr = Json::array();
    while (rows.step()) arr.push_back(Json::parse(rows.text(0)));
    bundle[table] = std::move(arr);
  }
  return from_bundle(bundle);
}

std::vector<std::string> SqliteStore::list() {
  std::lock_guard lock(mutex_);
  Statement rows(db_->handle, "SELECT id FROM projects ORDER BY rowid");
  std::vector<std::string> ids;
  while (rows.step()) ids.push_back(rows.text(0));
  return ids;
}

}  // namespace restcheck::workflow
