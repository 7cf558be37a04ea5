#include "fctgan/encoding/schema.hpp"

#include <fstream>
#include <set>

namespace fctgan {

const char* to_string(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::continuous: return "continuous";
    case ColumnKind::categorical: return "categorical";
    case ColumnKind::mixed: return "mixed";
    case ColumnKind::minmax: return "minmax";
  }
  return "?";
}

const char* to_string(Task task) {
  switch (task) {
    case Task::none: return "none";
    case Task::classification: return "classification";
    case Task::regression: return "regression";
  }
  return "?";
}

ColumnKind parse_column_kind(const std::string& s) {
  if (s == "continuous") return ColumnKind::continuous;
  if (s == "categorical") return ColumnKind::categorical;
  if (s == "mixed") return ColumnKind::mixed;
  if (s == "minmax") return ColumnKind::minmax;
  throw SchemaError("unknown column kind '" + s + "'");
}

Task parse_task(const std::string& s) {
  if (s == "none") return Task::none;
  if (s == "classification") return Task::classification;
  if (s == "regression") return Task::regression;
  throw SchemaError("unknown task '" + s + "'");
}

std::optional<std::size_t> TableSchema::target_index() const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].target) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TableSchema::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> TableSchema::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.name);
  return out;
}

void TableSchema::validate() const {
  if (columns.empty()) throw SchemaError("schema has no columns");
  std::set<std::string> seen;
  std::size_t targets = 0;
  for (const auto& c : columns) {
    if (c.name.empty()) throw SchemaError("column with empty name");
    if (!seen.insert(c.name).second) throw SchemaError("duplicate column name '" + c.name + "'");
    if (c.kind == ColumnKind::categorical) {
      if (c.vocabulary.empty()) throw SchemaError("categorical column '" + c.name + "' has an empty vocabulary");
      std::set<std::string> vocab(c.vocabulary.begin(), c.vocabulary.end());
      if (vocab.size() != c.vocabulary.size()) throw SchemaError("column '" + c.name + "' repeats a category");
    }
    if (c.kind == ColumnKind::mixed && c.specials.empty() && !c.missing) {
      throw SchemaError("mixed column '" + c.name + "' declares no special values");
    }
    if (c.min && c.max && !(*c.max >= *c.min)) throw SchemaError("column '" + c.name + "' has max < min");
    if (c.max_modes && *c.max_modes == 0) throw SchemaError("column '" + c.name + "' has max_modes 0");
    if (c.target) {
      ++targets;
      if (c.task == Task::none) throw SchemaError("target column '" + c.name + "' needs a task");
      if (c.task == Task::classification && c.kind != ColumnKind::categorical) {
        throw SchemaError("classification target '" + c.name + "' must be categorical");
      }
      if (c.task == Task::regression && c.kind == ColumnKind::categorical) {
        throw SchemaError("regression target '" + c.name + "' must be numeric");
      }
    }
  }
  if (targets > 1) throw SchemaError("schema declares more than one target column");
}

TableSchema TableSchema::permuted(const std::vector<std::size_t>& order) const {
  TableSchema out;
  out.missing_token = missing_token;
  for (std::size_t i : order) out.columns.push_back(columns.at(i));
  return out;
}

TableSchema schema_from_json(const nlohmann::json& j) {
  try {
    TableSchema s;
    s.missing_token = j.value("missing_token", std::string());
    for (const auto& jc : j.at("columns")) {
      ColumnSpec c;
      c.name = jc.at("name").get<std::string>();
      c.kind = parse_column_kind(jc.at("kind").get<std::string>());
      if (jc.contains("vocabulary")) c.vocabulary = jc["vocabulary"].get<std::vector<std::string>>();
      if (jc.contains("specials")) c.specials = jc["specials"].get<std::vector<double>>();
      c.missing = jc.value("missing", false);
      c.target = jc.value("target", false);
      if (jc.contains("task")) c.task = parse_task(jc["task"].get<std::string>());
      if (jc.contains("min")) c.min = jc["min"].get<double>();
      if (jc.contains("max")) c.max = jc["max"].get<double>();
      if (jc.contains("max_modes")) c.max_modes = jc["max_modes"].get<std::size_t>();
      s.columns.push_back(std::move(c));
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
}

nlohmann::json schema_to_json(const TableSchema& schema) {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : schema.columns) {
    nlohmann::json jc{{"name", c.name}, {"kind", to_string(c.kind)}};
    if (!c.vocabulary.empty()) jc["vocabulary"] = c.vocabulary;
    if (!c.specials.empty()) jc["specials"] = c.specials;
    if (c.missing) jc["missing"] = true;
    if (c.target) jc["target"] = true;
    if (c.task != Task::none) jc["task"] = to_string(c.task);
    if (c.min) jc["min"] = *c.min;
    if (c.max) jc["max"] = *c.max;
    if (c.max_modes) jc["max_modes"] = *c.max_modes;
    cols.push_back(std::move(jc));
  }
  return nlohmann::json{{"columns", cols}, {"missing_token", schema.missing_token}};
}

TableSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open schema file " + path);
  try {
    return schema_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t schema_hash(const TableSchema& schema) {
  const std::string text = schema_to_json(schema).dump();
  return fnv1a(text.data(), text.size());
}

}  // namespace fctgan
