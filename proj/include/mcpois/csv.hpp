#ifndef MCPOIS_CSV_HPP
#define MCPOIS_CSV_HPP

#include <optional>
#include <string>
#include <vector>

namespace mcpois {

// RFC-4180-style delimited text with a header row. Empty field means absent.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;              // -1 if missing
  int require_column(const std::string& name) const;      // throws ValidationError
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

std::string format_double(double v);  // 17 significant digits
std::optional<double> parse_optional_double(const std::string& field);

}  // namespace mcpois

#endif
