#include "fctgan/encoding/table.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <unistd.h>

namespace fctgan {

Table Table::select_rows(const std::vector<std::size_t>& rows) const {
  Table out = empty(cols());
  for (std::size_t c = 0; c < cols(); ++c) {
    out.columns[c].reserve(rows.size());
    for (std::size_t r : rows) out.columns[c].push_back(columns[c].at(r));
  }
  return out;
}

Table Table::permuted(const std::vector<std::size_t>& order) const {
  Table out;
  for (std::size_t i : order) out.columns.push_back(columns.at(i));
  return out;
}

void check_table(const Table& table, const TableSchema& schema) {
  if (table.cols() != schema.size()) {
    throw DataError("table has " + std::to_string(table.cols()) + " columns, schema has " +
                    std::to_string(schema.size()));
  }
  const std::size_t n = table.rows();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& spec = schema[c];
    const auto& col = table.columns[c];
    if (col.size() != n) throw DataError("column '" + spec.name + "' has a different row count");
    for (std::size_t r = 0; r < n; ++r) {
      const double v = col[r];
      const std::string where = "column '" + spec.name + "' row " + std::to_string(r + 1);
      if (is_missing(v)) {
        if (!(spec.kind == ColumnKind::mixed && spec.missing)) throw DataError("missing value in " + where);
        continue;
      }
      if (!std::isfinite(v)) throw DataError("non-finite value in " + where);
      if (spec.is_categorical()) {
        if (v < 0 || v != std::floor(v) || v >= static_cast<double>(spec.vocabulary.size())) {
          throw DataError("category code out of range in " + where);
        }
      }
    }
  }
}

namespace {

std::vector<std::vector<std::string>> split_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false, any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          fields.push_back(std::move(field));
          records.push_back(std::move(fields));
        }
        fields.clear();
        field.clear();
        any = false;
        break;
      default:
        field += ch;
        any = true;
    }
  }
  if (quoted) throw DataError("unterminated quoted field at end of input");
  if (any || !field.empty()) {
    fields.push_back(std::move(field));
    records.push_back(std::move(fields));
  }
  return records;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& raw, double& out) {
  std::string s = trim(raw);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

Table parse_csv(const std::string& text, const TableSchema& schema) {
  const auto records = split_records(text);
  if (records.empty()) throw DataError("CSV has no header row");
  const auto& header = records.front();

  std::vector<std::size_t> source(schema.size(), static_cast<std::size_t>(-1));
  for (std::size_t j = 0; j < header.size(); ++j) {
    const auto idx = schema.find(trim(header[j]));
    if (!idx) throw DataError("CSV column '" + header[j] + "' is not in the schema");
    source[*idx] = j;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (source[c] == static_cast<std::size_t>(-1)) throw DataError("CSV lacks column '" + schema[c].name + "'");
  }

  std::vector<std::unordered_map<std::string, std::size_t>> vocab(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    for (std::size_t k = 0; k < schema[c].vocabulary.size(); ++k) vocab[c][schema[c].vocabulary[k]] = k;
  }

  Table table = Table::empty(schema.size());
  for (auto& col : table.columns) col.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != header.size()) {
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(rec.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const auto& spec = schema[c];
      const std::string& cell = rec[source[c]];
      const std::string where = "column '" + spec.name + "' row " + std::to_string(r);
      double v = 0;
      if (spec.is_categorical()) {
        auto it = vocab[c].find(cell);
        if (it == vocab[c].end()) it = vocab[c].find(trim(cell));
        if (it == vocab[c].end()) throw DataError("unknown category '" + cell + "' in " + where);
        v = static_cast<double>(it->second);
      } else if (cell == schema.missing_token || trim(cell) == schema.missing_token) {
        if (!(spec.kind == ColumnKind::mixed && spec.missing)) throw DataError("missing value in " + where);
        v = std::nan("");
      } else if (!parse_double(cell, v)) {
        throw DataError("cannot parse '" + cell + "' as a number in " + where);
      }
      table.columns[c].push_back(v);
    }
  }
  return table;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Table read_csv(const std::string& path, const TableSchema& schema) {
  try {
    return parse_csv(read_file(path), schema);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string format_csv(const Table& table, const TableSchema& schema) {
  check_table(table, schema);
  std::string out;
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out += ',';
    out += quote(schema[c].name);
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      if (c) out += ',';
      const double v = table.columns[c][r];
      if (schema[c].is_categorical()) {
        out += quote(schema[c].vocabulary[static_cast<std::size_t>(v)]);
      } else if (is_missing(v)) {
        out += quote(schema.missing_token);
      } else {
        out += format_number(v);
      }
    }
    out += '\n';
  }
  return out;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

void write_csv(const std::string& path, const Table& table, const TableSchema& schema) {
  write_file_atomic(path, format_csv(table, schema));
}

}  // namespace fctgan
