#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geobench/geodesy.hpp"

namespace geobench {

// Seven-continent canonical list. "Australia" is accepted as an alias of
// Oceania on input.
enum class Continent {
  Africa,
  Antarctica,
  Asia,
  Europe,
  NorthAmerica,
  Oceania,
  SouthAmerica,
};

std::string_view to_string(Continent c);
std::optional<Continent> continent_from_string(std::string_view text);

class NotFoundError : public std::runtime_error {
 public:
  explicit NotFoundError(const std::string& what) : std::runtime_error(what) {}
};

class AmbiguousError : public std::runtime_error {
 public:
  AmbiguousError(const std::string& what, std::vector<std::string> candidates)
      : std::runtime_error(what), candidates_(std::move(candidates)) {}
  const std::vector<std::string>& candidates() const { return candidates_; }

 private:
  std::vector<std::string> candidates_;
};

// Case-folds, strips Latin diacritics, trims surrounding punctuation and
// whitespace, and collapses internal whitespace. Non-Latin scripts pass
// through unchanged.
std::string normalize_name(std::string_view raw);

// "bANGKOK" -> "Bangkok", keeping lowercase name particles ("Rio de Janeiro").
std::string title_case(std::string_view raw);

struct GazetteerEntry {
  std::string canonical_city;
  std::vector<std::string> aliases;  // normalized; includes the canonical name
  std::string country;               // ISO 3166-1 alpha-2
  std::vector<std::string> country_names;
  Continent continent;
  GeoPoint point;
  std::int64_t population = 0;
};

struct CountryInfo {
  std::string code;
  std::vector<std::string> names;  // display names; first is primary
  Continent continent;
};

// Offline place-name snapshot: city table plus country table, loaded once and
// immutable thereafter. Resolution is deterministic: exact normalized-alias
// match, ties broken by country hint then by population.
class Gazetteer {
 public:
  static Gazetteer load(const std::filesystem::path& cities_csv,
                        const std::filesystem::path& countries_csv);

  const GazetteerEntry& resolve_city(std::string_view city,
                                     std::optional<std::string_view> country_hint = {}) const;

  Continent country_to_continent(std::string_view country_name_or_code) const;

  // ISO code for a country given by code or any known name; nullopt if unknown.
  std::optional<std::string> country_code(std::string_view name_or_code) const;
  const CountryInfo& country(std::string_view code) const;

  const std::vector<GazetteerEntry>& entries() const { return entries_; }
  const std::map<std::string, CountryInfo>& countries() const { return countries_; }

 private:
  std::vector<GazetteerEntry> entries_;
  std::map<std::string, CountryInfo> countries_;            // code -> info
  std::map<std::string, std::string> country_name_index_;   // normalized name/code -> code
  std::map<std::string, std::vector<size_t>> alias_index_;  // normalized alias -> entry indices
};

}  // namespace geobench
