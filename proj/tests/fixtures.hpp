#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles
// here must stay independent of the implementation paths they check.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "reformer/algebra.hpp"
#include "reformer/corpus.hpp"
#include "reformer/sqlite_db.hpp"

namespace fixtures {

using namespace reformer;

// --- schemas -------------------------------------------------------------

inline DatabaseSchema pets_schema() {
  DatabaseSchema s;
  s.db_id = "pets_db";
  s.tables = {
      {"pets",
       {{"pet_id", "number"},
        {"name", "text"},
        {"weight", "number"},
        {"age", "number"},
        {"owner_id", "number"}}},
      {"owners", {{"owner_id", "number"}, {"name", "text"}, {"city", "text"}}},
  };
  s.primary_keys = {{"pets", "pet_id"}, {"owners", "owner_id"}};
  s.foreign_keys = {{{"pets", "owner_id"}, {"owners", "owner_id"}}};
  return s;
}

inline DatabaseSchema concerts_schema() {
  DatabaseSchema s;
  s.db_id = "concerts_db";
  s.tables = {
      {"concerts", {{"concert_id", "number"}, {"title", "text"}, {"year", "number"}}},
      {"singers", {{"singer_id", "number"}, {"name", "text"}, {"age", "number"}}},
  };
  return s;
}

inline DatabaseSchema schools_schema() {
  DatabaseSchema s;
  s.db_id = "schools_db";
  s.tables = {
      {"students", {{"student_id", "number"}, {"name", "text"}, {"gpa", "number"}}},
  };
  return s;
}

inline SchemaCatalog catalog() {
  SchemaCatalog c;
  for (auto s : {pets_schema(), concerts_schema(), schools_schema()})
    c.emplace(s.db_id, s);
  return c;
}

inline std::vector<ExamplePair> corpus() {
  return {
      {"What is the name of each pet ?", "SELECT name FROM pets", "pets_db"},
      {"How many pets are there ?", "SELECT count(*) FROM pets", "pets_db"},
      {"What is the average weight of pets ?", "SELECT avg(weight) FROM pets",
       "pets_db"},
      {"What is the title of each concert ?", "SELECT title FROM concerts",
       "concerts_db"},
      {"How many singers are there ?", "SELECT count(*) FROM singers", "concerts_db"},
      {"What is the name of each student ?", "SELECT name FROM students",
       "schools_db"},
      {"How many students are there ?", "SELECT count(*) FROM students",
       "schools_db"},
  };
}

// --- on-disk fixtures ----------------------------------------------------

inline std::string temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("reformer_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

inline void write_tables_json(const std::string& path) {
  std::ofstream out(path);
  out << R"([
  {
    "db_id": "pets_db",
    "table_names_original": ["pets", "owners"],
    "column_names_original": [
      [-1, "*"],
      [0, "pet_id"], [0, "name"], [0, "weight"], [0, "age"], [0, "owner_id"],
      [1, "owner_id"], [1, "name"], [1, "city"]
    ],
    "column_types": ["text", "number", "text", "number", "number", "number", "number", "text", "text"],
    "primary_keys": [1, 6],
    "foreign_keys": [[5, 6]]
  },
  {
    "db_id": "concerts_db",
    "table_names_original": ["concerts", "singers"],
    "column_names_original": [
      [-1, "*"],
      [0, "concert_id"], [0, "title"], [0, "year"],
      [1, "singer_id"], [1, "name"], [1, "age"]
    ],
    "column_types": ["text", "number", "text", "number", "number", "text", "number"],
    "primary_keys": [],
    "foreign_keys": []
  },
  {
    "db_id": "schools_db",
    "table_names_original": ["students"],
    "column_names_original": [
      [-1, "*"],
      [0, "student_id"], [0, "name"], [0, "gpa"]
    ],
    "column_types": ["text", "number", "text", "number"],
    "primary_keys": [],
    "foreign_keys": []
  }
])";
}

inline void create_pets_sqlite(const std::string& path) {
  std::filesystem::remove(path);
  SqliteDb db(path, /*create=*/true);
  db.execute(
      "CREATE TABLE pets (pet_id INTEGER, name TEXT, weight INTEGER, age INTEGER, "
      "owner_id INTEGER);"
      "CREATE TABLE owners (owner_id INTEGER, name TEXT, city TEXT);"
      "INSERT INTO pets VALUES (1,'Rex',10,2,1),(2,'Bella',12,3,1),(3,'Max',15,5,2);"
      "INSERT INTO owners VALUES (1,'Ann','Rome'),(2,'Bob','Oslo');");
}

inline void create_concerts_sqlite(const std::string& path) {
  std::filesystem::remove(path);
  SqliteDb db(path, /*create=*/true);
  db.execute(
      "CREATE TABLE concerts (concert_id INTEGER, title TEXT, year INTEGER);"
      "CREATE TABLE singers (singer_id INTEGER, name TEXT, age INTEGER);"
      "INSERT INTO concerts VALUES (1,'Opening',2020),(2,'Finale',2021);"
      "INSERT INTO singers VALUES (1,'Mia',30),(2,'Leo',41);");
}

inline void create_schools_sqlite(const std::string& path) {
  std::filesystem::remove(path);
  SqliteDb db(path, /*create=*/true);
  db.execute(
      "CREATE TABLE students (student_id INTEGER, name TEXT, gpa REAL);"
      "INSERT INTO students VALUES (1,'Kim',3.5),(2,'Ada',3.9);");
}

// Lays out corpus + tables + databases under dir, Spider style.
inline void write_full_fixture(const std::string& dir) {
  namespace fs = std::filesystem;
  write_tables_json(dir + "/tables.json");
  {
    std::ofstream out(dir + "/train.json");
    out << "[\n";
    auto all = corpus();
    for (size_t i = 0; i < all.size(); ++i) {
      out << "  {\"question\": \"" << all[i].question << "\", \"query\": \""
          << all[i].query << "\", \"db_id\": \"" << all[i].db_id << "\"}"
          << (i + 1 < all.size() ? ",\n" : "\n");
    }
    out << "]\n";
  }
  fs::create_directories(dir + "/database/pets_db");
  fs::create_directories(dir + "/database/concerts_db");
  fs::create_directories(dir + "/database/schools_db");
  create_pets_sqlite(dir + "/database/pets_db/pets_db.sqlite");
  create_concerts_sqlite(dir + "/database/concerts_db/concerts_db.sqlite");
  create_schools_sqlite(dir + "/database/schools_db/schools_db.sqlite");
}

// --- oracle: brute-force ordered-forest edit distance --------------------

inline int forest_size(const std::vector<const AlgebraNode*>& f) {
  int n = 0;
  for (const auto* t : f) n += t->node_count();
  return n;
}

inline int oracle_forest_dist(std::vector<const AlgebraNode*> f1,
                              std::vector<const AlgebraNode*> f2) {
  if (f1.empty()) return forest_size(f2);
  if (f2.empty()) return forest_size(f1);
  const AlgebraNode* t1 = f1.back();
  const AlgebraNode* t2 = f2.back();

  auto drop_root = [](std::vector<const AlgebraNode*> f, const AlgebraNode* t) {
    f.pop_back();
    for (const auto& c : t->children) f.push_back(&c);
    return f;
  };
  int del = oracle_forest_dist(drop_root(f1, t1), f2) + 1;
  int ins = oracle_forest_dist(f1, drop_root(f2, t2)) + 1;

  std::vector<const AlgebraNode*> r1(f1.begin(), f1.end() - 1);
  std::vector<const AlgebraNode*> r2(f2.begin(), f2.end() - 1);
  std::vector<const AlgebraNode*> c1, c2;
  for (const auto& c : t1->children) c1.push_back(&c);
  for (const auto& c : t2->children) c2.push_back(&c);
  int match = oracle_forest_dist(r1, r2) + oracle_forest_dist(c1, c2) +
              (t1->label() == t2->label() ? 0 : 1);
  return std::min({del, ins, match});
}

inline int oracle_ted(const AlgebraTree& a, const AlgebraTree& b) {
  return oracle_forest_dist({&a.root}, {&b.root});
}

// Seeded random ordered trees over a 6-symbol alphabet, <= max_nodes.
inline AlgebraTree random_tree(std::mt19937_64& rng, int max_nodes = 8) {
  std::uniform_int_distribution<int> size_dist(1, max_nodes);
  std::uniform_int_distribution<int> label_dist(0, 5);
  int n = size_dist(rng);
  std::vector<AlgebraNode> nodes(n);
  for (auto& node : nodes) {
    node.tag = NodeTag::Table;
    node.detail = std::string(1, static_cast<char>('A' + label_dist(rng)));
  }
  // attach nodes 1..n-1 to a random earlier node, preserving order
  for (int i = n - 1; i >= 1; --i) {
    std::uniform_int_distribution<int> parent_dist(0, i - 1);
    nodes[parent_dist(rng)].children.push_back(std::move(nodes[i]));
  }
  return AlgebraTree{std::move(nodes[0]), false};
}

// --- oracle: naive BLEU --------------------------------------------------

// Straightforward re-derivation of sentence BLEU-4 with add-one smoothing
// for zero-match precisions at n >= 2, written against the definition.
inline double naive_bleu(std::vector<std::string> cand,
                         std::vector<std::vector<std::string>> refs) {
  double logs = 0.0;
  for (int n = 1; n <= 4; ++n) {
    std::map<std::string, int> cgrams;
    int total = 0;
    for (size_t i = 0; i + n <= cand.size(); ++i) {
      std::string g;
      for (int k = 0; k < n; ++k) g += cand[i + k] + "\x01";
      cgrams[g] += 1;
      ++total;
    }
    int match = 0;
    for (const auto& [g, c] : cgrams) {
      int best = 0;
      for (const auto& ref : refs) {
        int count = 0;
        for (size_t i = 0; i + n <= ref.size(); ++i) {
          std::string rg;
          for (int k = 0; k < n; ++k) rg += ref[i + k] + "\x01";
          if (rg == g) ++count;
        }
        best = std::max(best, count);
      }
      match += std::min(c, best);
    }
    double p;
    if (n == 1) {
      if (total == 0 || match == 0) return 0.0;
      p = double(match) / total;
    } else if (match == 0) {
      p = 1.0 / (total + 1);
    } else {
      p = double(match) / total;
    }
    logs += std::log(p);
  }
  size_t best_len = refs[0].size();
  auto diff = [&](size_t l) {
    return l > cand.size() ? l - cand.size() : cand.size() - l;
  };
  for (const auto& r : refs) {
    if (diff(r.size()) < diff(best_len) ||
        (diff(r.size()) == diff(best_len) && r.size() < best_len))
      best_len = r.size();
  }
  double bp =
      cand.size() >= best_len ? 1.0 : std::exp(1.0 - double(best_len) / cand.size());
  return 100.0 * bp * std::exp(logs / 4.0);
}

// --- oracle: independent cosine ------------------------------------------

inline double oracle_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace fixtures
