#include "mcpois/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "mcpois/errors.hpp"

namespace mcpois {

int CsvTable::column(const std::string& name) const {
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == name) return static_cast<int>(j);
  return -1;
}

int CsvTable::require_column(const std::string& name) const {
  const int j = column(name);
  if (j < 0) throw ValidationError("missing column: " + name);
  return j;
}

namespace {

std::vector<std::string> parse_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  CsvTable table;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() && in.eof()) break;
    auto fields = parse_line(line);
    if (first) {
      table.header = std::move(fields);
      first = false;
    } else {
      if (fields.size() != table.header.size())
        throw ValidationError(path + ": row with " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(table.header.size()));
      table.rows.push_back(std::move(fields));
    }
  }
  if (first) throw ValidationError(path + ": empty file");
  return table;
}

void write_csv(const std::string& path, const CsvTable& table) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  for (std::size_t j = 0; j < table.header.size(); ++j)
    out << (j ? "," : "") << quote_if_needed(table.header[j]);
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j)
      out << (j ? "," : "") << quote_if_needed(row[j]);
    out << '\n';
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::optional<double> parse_optional_double(const std::string& field) {
  if (field.empty()) return std::nullopt;
  std::size_t pos = 0;
  const double v = std::stod(field, &pos);
  if (pos != field.size())
    throw ValidationError("not a number: '" + field + "'");
  return v;
}

}  // namespace mcpois
