#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geobench/gazetteer.hpp"
#include "geobench/geodesy.hpp"

namespace geobench {

enum class MapSource { Google, Baidu, Tencent, Gaode };

std::string_view to_string(MapSource s);
std::optional<MapSource> map_source_from_string(std::string_view text);

// One geo-tagged task. Ground-truth labels at three granularities.
struct LocationRecord {
  std::string id;
  GeoPoint point;
  std::string image_ref;
  std::string city;
  std::string country;  // ISO 3166-1 alpha-2
  Continent continent;
  MapSource source;
};

// One human guess against a location.
struct GuessRecord {
  std::string player_id;
  std::string location_id;
  GeoPoint guess;
  int score;              // [0, 5000]
  std::string timestamp;  // RFC 3339 as given
  std::int64_t epoch_seconds;
};

// Line-delimited JSON, one record per line; see README for field names.
std::vector<LocationRecord> ingest_locations(const std::filesystem::path& path,
                                             const Gazetteer& gazetteer);
std::vector<GuessRecord> ingest_guesses(const std::filesystem::path& path);

struct ScoreStats {
  std::int64_t count = 0;
  double sum = 0.0;
  double mean() const { return sum / static_cast<double>(count); }
};

// Single-pass per-location running sums; keys are location ids.
std::map<std::string, ScoreStats> accumulate_difficulty(std::span<const GuessRecord> guesses);

// Mean human score for one location; a location with no guesses is an error,
// distinct from a genuine average of zero.
double location_difficulty(std::span<const GuessRecord> guesses, std::string_view location_id);

struct DifficultyBin {
  int lower;  // inclusive
  int upper;  // exclusive; the last bin also includes 5000
  std::int64_t location_count = 0;
  double share = 0.0;
};

std::array<DifficultyBin, 5> difficulty_histogram(std::span<const double> avg_scores);

// dataset_share / reference_share; serves both Area Bias and Population Bias.
double share_bias(double dataset_share, double reference_share);
inline double area_bias(double dataset_share, double area_share) {
  return share_bias(dataset_share, area_share);
}
inline double pop_bias(double dataset_share, double pop_share) {
  return share_bias(dataset_share, pop_share);
}

// Harmonic mean of the two bias ratios; 0 when either operand is 0.
double geo_pop_index(double area_bias, double pop_bias);

enum class BalanceCategory { HighBalance, ModerateBalance, Imbalance, CriticalImbalance };

std::string_view to_string(BalanceCategory c);

// Partition of [0, inf): Critical <0.1 or >4.5; Imbalance [0.1,0.3) or
// (3.0,4.5]; Moderate [0.3,0.8) or (1.4,3.0]; High [0.8,1.4].
BalanceCategory classify_balance(double index);

struct ReferenceShares {
  double area_share = 0.0;
  double pop_share = 0.0;
};

// CSV columns: country_code, area_share, pop_share.
std::map<std::string, ReferenceShares> load_reference_table(const std::filesystem::path& path);

struct BalanceRow {
  std::string country;
  double dataset_share;
  double area_share;
  double pop_share;
  double area_bias;
  double pop_bias;
  double index;
  BalanceCategory category;
};

struct BalanceTable {
  std::vector<BalanceRow> rows;  // sorted by dataset_share descending
  double index_stddev = 0.0;     // population standard deviation of indices
};

BalanceTable balance_table(std::span<const LocationRecord> locations,
                           const std::map<std::string, ReferenceShares>& reference);

enum class Granularity { Continent, Country };

std::string_view to_string(Granularity g);
std::optional<Granularity> granularity_from_string(std::string_view text);

// Deterministic stratified draw: per_stratum locations from every stratum
// present in `locations`, restricted to locations whose mean human score lies
// in score_band. Identical (inputs, seed) give byte-identical output.
std::vector<LocationRecord> stratified_sample(std::span<const LocationRecord> locations,
                                              std::span<const GuessRecord> guesses,
                                              Granularity strata, int per_stratum,
                                              std::pair<double, double> score_band,
                                              std::uint64_t seed);

std::string balance_csv(const BalanceTable& table);
std::string difficulty_csv(std::span<const DifficultyBin> bins);
std::string location_jsonl(std::span<const LocationRecord> locations);

}  // namespace geobench
