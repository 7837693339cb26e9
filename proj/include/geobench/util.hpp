#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace geobench {

// Bad contents in an input file (schema violations, unknown references, ...).
// Carries enough context to name the offending line or field.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

namespace util {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string base64_encode(std::string_view bytes);

// Strict RFC 3339 timestamp, e.g. 2024-06-01T12:30:00Z or with a ±hh:mm offset.
// Returns seconds since the Unix epoch, or nullopt when malformed.
std::optional<std::int64_t> parse_rfc3339(std::string_view s);

std::optional<std::string> getenv_str(const std::string& name);

// Fixed-precision decimal rendering used by all CSV/report writers so output
// bytes do not depend on locale or default stream state.
std::string format_double(double v, int decimals = 6);

}  // namespace util
}  // namespace geobench
