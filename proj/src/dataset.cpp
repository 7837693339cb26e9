#include "geobench/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "geobench/csv.hpp"
#include "geobench/rng.hpp"
#include "geobench/util.hpp"

namespace geobench {

using nlohmann::ordered_json;

std::string_view to_string(MapSource s) {
  switch (s) {
    case MapSource::Google: return "google";
    case MapSource::Baidu: return "baidu";
    case MapSource::Tencent: return "tencent";
    case MapSource::Gaode: return "gaode";
  }
  return "?";
}

std::optional<MapSource> map_source_from_string(std::string_view text) {
  const std::string t = util::to_lower(util::trim(text));
  if (t == "google") return MapSource::Google;
  if (t == "baidu") return MapSource::Baidu;
  if (t == "tencent") return MapSource::Tencent;
  if (t == "gaode") return MapSource::Gaode;
  return std::nullopt;
}

namespace {

[[noreturn]] void fail_line(const std::filesystem::path& path, size_t lineno,
                            const std::string& what) {
  throw DataError(path.string() + ": line " + std::to_string(lineno) + ": " + what);
}

double require_number(const ordered_json& j, const char* field, const std::filesystem::path& path,
                      size_t lineno) {
  if (!j.contains(field) || !j[field].is_number())
    fail_line(path, lineno, std::string("missing or non-numeric field \"") + field + "\"");
  return j[field].get<double>();
}

std::string require_string(const ordered_json& j, const char* field,
                           const std::filesystem::path& path, size_t lineno) {
  if (!j.contains(field) || !j[field].is_string() || j[field].get<std::string>().empty())
    fail_line(path, lineno, std::string("missing or empty field \"") + field + "\"");
  return j[field].get<std::string>();
}

}  // namespace

std::vector<LocationRecord> ingest_locations(const std::filesystem::path& path,
                                             const Gazetteer& gazetteer) {
  std::vector<LocationRecord> out;
  std::set<std::string> seen_ids;
  const auto lines = util::read_lines(path);
  size_t lineno = 0;
  for (const auto& line : lines) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      fail_line(path, lineno, std::string("invalid JSON: ") + e.what());
    }

    const std::string id = require_string(j, "id", path, lineno);
    if (!seen_ids.insert(id).second) fail_line(path, lineno, "duplicate id \"" + id + "\"");

    const double lat = require_number(j, "lat", path, lineno);
    const double lon = require_number(j, "lon", path, lineno);

    const std::string country_raw = require_string(j, "country", path, lineno);
    const auto code = gazetteer.country_code(country_raw);
    if (!code) fail_line(path, lineno, "unknown country \"" + country_raw + "\"");

    const std::string continent_raw = require_string(j, "continent", path, lineno);
    const auto continent = continent_from_string(continent_raw);
    if (!continent) fail_line(path, lineno, "unknown continent \"" + continent_raw + "\"");
    const Continent expected = gazetteer.country_to_continent(*code);
    if (*continent != expected)
      fail_line(path, lineno, "continent \"" + continent_raw + "\" inconsistent with country " +
                                  *code + " (" + std::string(to_string(expected)) + ")");

    const std::string source_raw = require_string(j, "source", path, lineno);
    const auto source = map_source_from_string(source_raw);
    if (!source) fail_line(path, lineno, "unknown source \"" + source_raw + "\"");

    try {
      out.push_back(LocationRecord{.id = id,
                                   .point = GeoPoint(lat, lon),
                                   .image_ref = require_string(j, "image_ref", path, lineno),
                                   .city = require_string(j, "city", path, lineno),
                                   .country = *code,
                                   .continent = *continent,
                                   .source = *source});
    } catch (const std::invalid_argument& e) {
      fail_line(path, lineno, e.what());
    }
  }
  return out;
}

std::vector<GuessRecord> ingest_guesses(const std::filesystem::path& path) {
  std::vector<GuessRecord> out;
  const auto lines = util::read_lines(path);
  size_t lineno = 0;
  for (const auto& line : lines) {
    ++lineno;
    if (util::trim(line).empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const std::exception& e) {
      fail_line(path, lineno, std::string("invalid JSON: ") + e.what());
    }

    const double lat = require_number(j, "guess_lat", path, lineno);
    const double lon = require_number(j, "guess_lon", path, lineno);
    const double score = require_number(j, "score", path, lineno);
    if (score < 0 || score > kMaxScore || score != std::floor(score))
      fail_line(path, lineno, "score must be an integer in [0, 5000]");
    const std::string ts = require_string(j, "timestamp", path, lineno);
    const auto epoch = util::parse_rfc3339(ts);
    if (!epoch) fail_line(path, lineno, "timestamp is not RFC 3339: \"" + ts + "\"");

    try {
      out.push_back(GuessRecord{.player_id = require_string(j, "player_id", path, lineno),
                                .location_id = require_string(j, "location_id", path, lineno),
                                .guess = GeoPoint(lat, lon),
                                .score = static_cast<int>(score),
                                .timestamp = ts,
                                .epoch_seconds = *epoch});
    } catch (const std::invalid_argument& e) {
      fail_line(path, lineno, e.what());
    }
  }
  return out;
}

std::map<std::string, ScoreStats> accumulate_difficulty(std::span<const GuessRecord> guesses) {
  std::map<std::string, ScoreStats> stats;
  for (const auto& g : guesses) {
    auto& s = stats[g.location_id];
    ++s.count;
    s.sum += g.score;
  }
  return stats;
}

double location_difficulty(std::span<const GuessRecord> guesses, std::string_view location_id) {
  ScoreStats s;
  for (const auto& g : guesses) {
    if (g.location_id == location_id) {
      ++s.count;
      s.sum += g.score;
    }
  }
  if (s.count == 0)
    throw DataError("no guesses for location \"" + std::string(location_id) + "\"");
  return s.mean();
}

std::array<DifficultyBin, 5> difficulty_histogram(std::span<const double> avg_scores) {
  std::array<DifficultyBin, 5> bins{};
  for (int i = 0; i < 5; ++i) bins[i] = DifficultyBin{i * 1000, (i + 1) * 1000, 0, 0.0};
  for (double s : avg_scores) {
    if (!(s >= 0.0 && s <= kMaxScore))
      throw std::invalid_argument("average score outside [0, 5000]: " + std::to_string(s));
    int idx = std::min(static_cast<int>(s / 1000.0), 4);  // 5000 lands in the last bin
    ++bins[idx].location_count;
  }
  if (!avg_scores.empty()) {
    for (auto& b : bins)
      b.share = static_cast<double>(b.location_count) / static_cast<double>(avg_scores.size());
  }
  return bins;
}

double share_bias(double dataset_share, double reference_share) {
  if (!(reference_share > 0.0))
    throw std::invalid_argument("reference share must be positive");
  if (dataset_share < 0.0) throw std::invalid_argument("dataset share must be non-negative");
  return dataset_share / reference_share;
}

double geo_pop_index(double area_bias, double pop_bias) {
  if (area_bias < 0.0 || pop_bias < 0.0)
    throw std::invalid_argument("bias ratios must be non-negative");
  if (area_bias == 0.0 || pop_bias == 0.0) return 0.0;
  return 2.0 * area_bias * pop_bias / (area_bias + pop_bias);
}

std::string_view to_string(BalanceCategory c) {
  switch (c) {
    case BalanceCategory::HighBalance: return "HighBalance";
    case BalanceCategory::ModerateBalance: return "ModerateBalance";
    case BalanceCategory::Imbalance: return "Imbalance";
    case BalanceCategory::CriticalImbalance: return "CriticalImbalance";
  }
  return "?";
}

BalanceCategory classify_balance(double index) {
  if (!(index >= 0.0)) throw std::invalid_argument("index must be non-negative");
  if (index < 0.1 || index > 4.5) return BalanceCategory::CriticalImbalance;
  if (index < 0.3 || index > 3.0) return BalanceCategory::Imbalance;
  if (index < 0.8 || index > 1.4) return BalanceCategory::ModerateBalance;
  return BalanceCategory::HighBalance;
}

std::map<std::string, ReferenceShares> load_reference_table(const std::filesystem::path& path) {
  const csv::Table t = csv::read_file(path);
  if (t.header != std::vector<std::string>{"country_code", "area_share", "pop_share"})
    throw DataError(path.string() + ": unexpected header");
  std::map<std::string, ReferenceShares> out;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::string code = util::trim(row[0]);
    for (auto& c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    ReferenceShares shares{std::stod(row[1]), std::stod(row[2])};
    if (!(shares.area_share > 0.0) || !(shares.pop_share > 0.0))
      throw DataError(path.string() + ": row " + std::to_string(r + 1) +
                      ": shares must be positive");
    if (!out.emplace(code, shares).second)
      throw DataError(path.string() + ": duplicate country code " + code);
  }
  return out;
}

BalanceTable balance_table(std::span<const LocationRecord> locations,
                           const std::map<std::string, ReferenceShares>& reference) {
  if (locations.empty()) throw std::invalid_argument("balance table of an empty dataset");
  std::map<std::string, std::int64_t> counts;
  for (const auto& loc : locations) ++counts[loc.country];

  BalanceTable table;
  const double total = static_cast<double>(locations.size());
  for (const auto& [country, count] : counts) {
    const auto ref = reference.find(country);
    if (ref == reference.end())
      throw DataError("country missing from reference table: " + country);
    BalanceRow row;
    row.country = country;
    row.dataset_share = static_cast<double>(count) / total;
    row.area_share = ref->second.area_share;
    row.pop_share = ref->second.pop_share;
    row.area_bias = area_bias(row.dataset_share, row.area_share);
    row.pop_bias = pop_bias(row.dataset_share, row.pop_share);
    row.index = geo_pop_index(row.area_bias, row.pop_bias);
    row.category = classify_balance(row.index);
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const BalanceRow& a, const BalanceRow& b) {
    if (a.dataset_share != b.dataset_share) return a.dataset_share > b.dataset_share;
    return a.country < b.country;
  });

  double mean = 0.0;
  for (const auto& r : table.rows) mean += r.index;
  mean /= static_cast<double>(table.rows.size());
  double var = 0.0;
  for (const auto& r : table.rows) var += (r.index - mean) * (r.index - mean);
  table.index_stddev = std::sqrt(var / static_cast<double>(table.rows.size()));
  return table;
}

std::string_view to_string(Granularity g) {
  return g == Granularity::Continent ? "continent" : "country";
}

std::optional<Granularity> granularity_from_string(std::string_view text) {
  const std::string t = util::to_lower(util::trim(text));
  if (t == "continent") return Granularity::Continent;
  if (t == "country") return Granularity::Country;
  return std::nullopt;
}

std::vector<LocationRecord> stratified_sample(std::span<const LocationRecord> locations,
                                              std::span<const GuessRecord> guesses,
                                              Granularity strata, int per_stratum,
                                              std::pair<double, double> score_band,
                                              std::uint64_t seed) {
  if (per_stratum < 1) throw std::invalid_argument("per_stratum must be at least 1");
  const auto [lo, hi] = score_band;
  if (!(lo <= hi) || lo < 0.0 || hi > kMaxScore)
    throw std::invalid_argument("score band must satisfy 0 <= lo <= hi <= 5000");

  std::set<std::string> known_ids;
  for (const auto& loc : locations) known_ids.insert(loc.id);
  for (const auto& g : guesses)
    if (!known_ids.count(g.location_id))
      throw DataError("guess references unknown location \"" + g.location_id + "\"");

  const auto stats = accumulate_difficulty(guesses);
  auto stratum_of = [&](const LocationRecord& loc) {
    return strata == Granularity::Continent ? std::string(to_string(loc.continent)) : loc.country;
  };

  // Strata are every distinct key present in the input, eligible or not.
  std::map<std::string, std::vector<size_t>> eligible;
  for (size_t i = 0; i < locations.size(); ++i) {
    const auto& loc = locations[i];
    eligible[stratum_of(loc)];
    const auto it = stats.find(loc.id);
    if (it == stats.end()) continue;
    const double mean = it->second.mean();
    if (mean >= lo && mean <= hi) eligible[stratum_of(loc)].push_back(i);
  }

  std::vector<std::string> deficient;
  for (const auto& [name, idxs] : eligible) {
    if (static_cast<int>(idxs.size()) < per_stratum)
      deficient.push_back(name + " (eligible: " + std::to_string(idxs.size()) + ")");
  }
  if (!deficient.empty())
    throw DataError("strata with fewer eligible locations than requested " +
                    std::to_string(per_stratum) + ": " + util::join(deficient, ", "));

  std::mt19937_64 gen(seed);
  std::vector<LocationRecord> out;
  for (auto& [name, idxs] : eligible) {  // std::map iterates strata in sorted order
    std::sort(idxs.begin(), idxs.end(),
              [&](size_t a, size_t b) { return locations[a].id < locations[b].id; });
    auto picked = rng::sample_without_replacement(idxs, static_cast<size_t>(per_stratum), gen);
    std::sort(picked.begin(), picked.end(),
              [&](size_t a, size_t b) { return locations[a].id < locations[b].id; });
    for (size_t i : picked) out.push_back(locations[i]);
  }
  return out;
}

std::string balance_csv(const BalanceTable& table) {
  csv::Writer w({"country", "dataset_share", "area_share", "pop_share", "area_bias", "pop_bias",
                 "index", "category"});
  for (const auto& r : table.rows) {
    w.add_row({r.country, util::format_double(r.dataset_share), util::format_double(r.area_share),
               util::format_double(r.pop_share), util::format_double(r.area_bias),
               util::format_double(r.pop_bias), util::format_double(r.index),
               std::string(to_string(r.category))});
  }
  return w.str();
}

std::string difficulty_csv(std::span<const DifficultyBin> bins) {
  csv::Writer w({"lower", "upper", "location_count", "share"});
  for (const auto& b : bins) {
    w.add_row({std::to_string(b.lower), std::to_string(b.upper), std::to_string(b.location_count),
               util::format_double(b.share)});
  }
  return w.str();
}

std::string location_jsonl(std::span<const LocationRecord> locations) {
  std::string out;
  for (const auto& loc : locations) {
    ordered_json j;
    j["id"] = loc.id;
    j["lat"] = loc.point.lat();
    j["lon"] = loc.point.lon();
    j["image_ref"] = loc.image_ref;
    j["city"] = loc.city;
    j["country"] = loc.country;
    j["continent"] = std::string(to_string(loc.continent));
    j["source"] = std::string(to_string(loc.source));
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace geobench
