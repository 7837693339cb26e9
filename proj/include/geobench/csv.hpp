#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace geobench::csv {

std::string escape_field(std::string_view field);

// One CSV record; quoted fields may contain commas and doubled quotes,
// but not embedded newlines (all files handled here are one record per line).
std::vector<std::string> parse_line(std::string_view line);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a header-first CSV. Lines starting with '#' and blank lines are
// skipped so data files can carry provenance notes.
Table read_file(const std::filesystem::path& path);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);
  void add_row(std::vector<std::string> row);  // must match header width
  std::string str() const;
  void write(const std::filesystem::path& path) const;
  size_t row_count() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace geobench::csv
