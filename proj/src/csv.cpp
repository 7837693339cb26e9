#include "geobench/csv.hpp"

#include <stdexcept>

#include "geobench/util.hpp"

namespace geobench::csv {

std::string escape_field(std::string_view field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool in_quotes = false;
  size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        cur += c;
      }
    } else {
      if (c == '"') {
        in_quotes = true;
      } else if (c == ',') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    ++i;
  }
  if (in_quotes) throw DataError("unterminated quoted CSV field");
  fields.push_back(cur);
  return fields;
}

Table read_file(const std::filesystem::path& path) {
  Table t;
  auto lines = util::read_lines(path);
  bool have_header = false;
  size_t lineno = 0;
  for (const auto& line : lines) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = parse_line(line);
    if (!have_header) {
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size()) {
      throw DataError(path.string() + ": line " + std::to_string(lineno) + ": expected " +
                      std::to_string(t.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    t.rows.push_back(std::move(fields));
  }
  if (!have_header) throw DataError(path.string() + ": missing CSV header");
  return t;
}

Writer::Writer(std::vector<std::string> header) : header_(std::move(header)) {}

void Writer::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size())
    throw std::invalid_argument("CSV row width does not match header");
  rows_.push_back(std::move(row));
}

std::string Writer::str() const {
  std::string out;
  auto emit = [&out](const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += escape_field(fields[i]);
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

void Writer::write(const std::filesystem::path& path) const {
  util::write_file(path, str());
}

}  // namespace geobench::csv
