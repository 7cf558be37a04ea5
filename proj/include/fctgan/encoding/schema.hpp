#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace fctgan {

/// Malformed schema document or a schema that violates its invariants.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Table contents that do not conform to the schema.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ColumnKind { continuous, categorical, mixed, minmax };
enum class Task { none, classification, regression };

const char* to_string(ColumnKind kind);
const char* to_string(Task task);
ColumnKind parse_column_kind(const std::string& s);
Task parse_task(const std::string& s);

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::continuous;
  std::vector<std::string> vocabulary;  // categorical
  std::vector<double> specials;         // mixed
  bool missing = false;                 // mixed: the missing token is a special value
  bool target = false;
  Task task = Task::none;
  std::optional<double> min;  // minmax bounds override
  std::optional<double> max;
  std::optional<std::size_t> max_modes;

  bool is_categorical() const { return kind == ColumnKind::categorical; }
  bool is_numeric() const { return !is_categorical(); }
};

struct TableSchema {
  std::vector<ColumnSpec> columns;
  std::string missing_token;

  std::size_t size() const { return columns.size(); }
  const ColumnSpec& operator[](std::size_t i) const { return columns[i]; }

  std::optional<std::size_t> target_index() const;
  std::optional<std::size_t> find(const std::string& name) const;
  std::vector<std::string> names() const;

  /// Throws SchemaError on duplicate names, multiple targets, empty
  /// vocabularies, or mixed columns without special values.
  void validate() const;

  /// Same schema with columns in the order `order[i]` = old index.
  TableSchema permuted(const std::vector<std::size_t>& order) const;
};

TableSchema schema_from_json(const nlohmann::json& j);
nlohmann::json schema_to_json(const TableSchema& schema);
TableSchema load_schema(const std::string& path);

/// FNV-1a hash of the canonical JSON form.
std::uint64_t schema_hash(const TableSchema& schema);

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace fctgan
