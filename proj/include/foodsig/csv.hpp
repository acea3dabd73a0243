#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace foodsig {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by header name; throws DataError if absent.
  std::size_t col(std::string_view name) const;
};

// Reads a whole CSV file with a mandatory header row. Quoted fields with ""
// escapes are handled; fields may not span lines. Rows whose field count does
// not match the header are a DataError naming the line.
CsvTable read_csv(const std::string& path);

// Parses one CSV line into fields.
std::vector<std::string> parse_csv_line(std::string_view line);

std::string csv_escape(std::string_view field);

// Shortest round-trip decimal form (std::to_chars); deterministic everywhere.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);
  // Serializes header + rows with \n line endings.
  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Writes `content` to `path`, creating parent directories.
void write_text_file(const std::string& path, std::string_view content);

std::string read_text_file(const std::string& path);

}  // namespace foodsig
