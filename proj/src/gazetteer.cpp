#include "geobench/gazetteer.hpp"

#include <algorithm>
#include <set>

#include "geobench/csv.hpp"
#include "geobench/util.hpp"

namespace geobench {

namespace {

struct Utf8Char {
  std::uint32_t cp = 0;
  size_t len = 1;
};

Utf8Char decode_utf8(std::string_view s, size_t i) {
  const unsigned char c0 = static_cast<unsigned char>(s[i]);
  if (c0 < 0x80) return {c0, 1};
  if ((c0 & 0xE0) == 0xC0 && i + 1 < s.size()) {
    const unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
    if ((c1 & 0xC0) == 0x80) return {static_cast<std::uint32_t>((c0 & 0x1F) << 6 | (c1 & 0x3F)), 2};
  }
  if ((c0 & 0xF0) == 0xE0 && i + 2 < s.size()) {
    const unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
    const unsigned char c2 = static_cast<unsigned char>(s[i + 2]);
    if ((c1 & 0xC0) == 0x80 && (c2 & 0xC0) == 0x80)
      return {static_cast<std::uint32_t>((c0 & 0x0F) << 12 | (c1 & 0x3F) << 6 | (c2 & 0x3F)), 3};
  }
  if ((c0 & 0xF8) == 0xF0 && i + 3 < s.size()) {
    const unsigned char c1 = static_cast<unsigned char>(s[i + 1]);
    const unsigned char c2 = static_cast<unsigned char>(s[i + 2]);
    const unsigned char c3 = static_cast<unsigned char>(s[i + 3]);
    if ((c1 & 0xC0) == 0x80 && (c2 & 0xC0) == 0x80 && (c3 & 0xC0) == 0x80)
      return {static_cast<std::uint32_t>((c0 & 0x07) << 18 | (c1 & 0x3F) << 12 | (c2 & 0x3F) << 6 |
                                         (c3 & 0x3F)),
              4};
  }
  return {0xFFFD, 1};  // invalid byte; treated as replacement
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// ASCII transliteration (already lowercased) of Latin-1 Supplement and
// Latin Extended-A letters; nullptr for codepoints outside those blocks.
const char* latin_to_ascii(std::uint32_t cp) {
  if (cp >= 0xC0 && cp <= 0xFF) {
    switch (cp) {
      case 0xC6: case 0xE6: return "ae";
      case 0xC7: case 0xE7: return "c";
      case 0xD0: case 0xF0: return "d";
      case 0xD1: case 0xF1: return "n";
      case 0xD7: case 0xF7: return nullptr;  // multiplication/division signs
      case 0xDE: case 0xFE: return "th";
      case 0xDF: return "ss";
      case 0xFF: return "y";
      default: break;
    }
    const std::uint32_t base = cp >= 0xE0 ? cp - 0x20 : cp;  // fold to uppercase row
    if (base <= 0xC5) return "a";
    if (base >= 0xC8 && base <= 0xCB) return "e";
    if (base >= 0xCC && base <= 0xCF) return "i";
    if ((base >= 0xD2 && base <= 0xD6) || base == 0xD8) return "o";
    if (base >= 0xD9 && base <= 0xDC) return "u";
    if (base == 0xDD) return "y";
    return nullptr;
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    switch (cp) {
      case 0x132: case 0x133: return "ij";
      case 0x152: case 0x153: return "oe";
      case 0x138: return "k";
      case 0x149: return "n";
      case 0x17F: return "s";
      default: break;
    }
    if (cp <= 0x105) return "a";
    if (cp <= 0x10D) return "c";
    if (cp <= 0x111) return "d";
    if (cp <= 0x11B) return "e";
    if (cp <= 0x123) return "g";
    if (cp <= 0x127) return "h";
    if (cp <= 0x131) return "i";
    if (cp <= 0x135) return "j";
    if (cp <= 0x137) return "k";
    if (cp <= 0x142) return "l";
    if (cp <= 0x14B) return "n";
    if (cp <= 0x151) return "o";
    if (cp <= 0x159) return "r";
    if (cp <= 0x161) return "s";
    if (cp <= 0x167) return "t";
    if (cp <= 0x173) return "u";
    if (cp <= 0x175) return "w";
    if (cp <= 0x178) return "y";
    return "z";
  }
  return nullptr;
}

bool is_ascii_punct(std::uint32_t cp) {
  return cp < 0x80 && std::ispunct(static_cast<int>(cp));
}

const std::set<std::string>& name_particles() {
  static const std::set<std::string> particles = {
      "de", "del", "della", "der", "den", "di", "da", "do",  "dos", "das", "la", "le",
      "les", "el",  "los",   "van", "von", "of", "the", "and", "upon", "on", "am", "an",
      "au", "aux", "sur"};
  return particles;
}

}  // namespace

std::string normalize_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_space = false;
  auto push_space = [&] {
    if (!out.empty()) pending_space = true;
  };
  auto push = [&](auto&& appender) {
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    appender();
  };

  for (size_t i = 0; i < raw.size();) {
    const Utf8Char u = decode_utf8(raw, i);
    i += u.len;
    const std::uint32_t cp = u.cp;
    if (cp < 0x80) {
      if (std::isspace(static_cast<int>(cp))) {
        push_space();
      } else if (cp == '\'' || cp == '`') {
        // apostrophes vanish: "N'Djamena" -> "ndjamena"
      } else if (is_ascii_punct(cp)) {
        push_space();
      } else if (std::isalpha(static_cast<int>(cp))) {
        push([&] { out += static_cast<char>(std::tolower(static_cast<int>(cp))); });
      } else {
        push([&] { out += static_cast<char>(cp); });
      }
      continue;
    }
    if (cp == 0x2019 || cp == 0x2018) continue;  // curly apostrophes
    if (const char* ascii = latin_to_ascii(cp)) {
      push([&] { out += ascii; });
    } else if (cp == 0xFFFD) {
      // drop undecodable bytes
    } else {
      push([&] { append_utf8(out, cp); });
    }
  }
  return out;
}

std::string title_case(std::string_view raw) {
  const std::string trimmed = util::trim(raw);
  std::vector<std::string> words = util::split(trimmed, ' ');
  std::vector<std::string> out_words;
  for (size_t w = 0; w < words.size(); ++w) {
    const std::string& word = words[w];
    if (word.empty()) continue;
    if (!out_words.empty() && name_particles().count(normalize_name(word))) {
      out_words.push_back(util::to_lower(word));
      continue;
    }
    std::string out;
    bool first = true;
    for (size_t i = 0; i < word.size();) {
      const Utf8Char u = decode_utf8(word, i);
      i += u.len;
      std::uint32_t cp = u.cp;
      const bool latin1_upper = cp >= 0xC0 && cp <= 0xDE && cp != 0xD7;
      const bool latin1_lower = cp >= 0xE0 && cp <= 0xFE && cp != 0xF7;
      if (first && (std::isalpha(static_cast<int>(cp < 0x80 ? cp : 0)) || latin1_upper ||
                    latin1_lower || cp >= 0x80)) {
        if (cp < 0x80) cp = static_cast<std::uint32_t>(std::toupper(static_cast<int>(cp)));
        else if (latin1_lower) cp -= 0x20;
        first = false;
      } else if (cp < 0x80) {
        cp = static_cast<std::uint32_t>(std::tolower(static_cast<int>(cp)));
      } else if (latin1_upper) {
        cp += 0x20;
      }
      append_utf8(out, cp);
    }
    out_words.push_back(std::move(out));
  }
  return util::join(out_words, " ");
}

std::string_view to_string(Continent c) {
  switch (c) {
    case Continent::Africa: return "Africa";
    case Continent::Antarctica: return "Antarctica";
    case Continent::Asia: return "Asia";
    case Continent::Europe: return "Europe";
    case Continent::NorthAmerica: return "North America";
    case Continent::Oceania: return "Oceania";
    case Continent::SouthAmerica: return "South America";
  }
  return "?";
}

std::optional<Continent> continent_from_string(std::string_view text) {
  const std::string n = normalize_name(text);
  if (n == "africa") return Continent::Africa;
  if (n == "antarctica") return Continent::Antarctica;
  if (n == "asia") return Continent::Asia;
  if (n == "europe") return Continent::Europe;
  if (n == "north america") return Continent::NorthAmerica;
  if (n == "oceania" || n == "australia") return Continent::Oceania;
  if (n == "south america") return Continent::SouthAmerica;
  return std::nullopt;
}

Gazetteer Gazetteer::load(const std::filesystem::path& cities_csv,
                          const std::filesystem::path& countries_csv) {
  Gazetteer g;

  const csv::Table ctable = csv::read_file(countries_csv);
  if (ctable.header != std::vector<std::string>{"code", "names", "continent"})
    throw DataError(countries_csv.string() + ": unexpected header");
  for (size_t r = 0; r < ctable.rows.size(); ++r) {
    const auto& row = ctable.rows[r];
    CountryInfo info;
    info.code = util::trim(row[0]);
    if (info.code.size() != 2)
      throw DataError(countries_csv.string() + ": row " + std::to_string(r + 1) +
                      ": country code must be 2 letters: " + row[0]);
    info.code = util::to_lower(info.code);
    for (auto& c : info.code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& name : util::split(row[1], '|')) {
      const std::string t = util::trim(name);
      if (!t.empty()) info.names.push_back(t);
    }
    if (info.names.empty())
      throw DataError(countries_csv.string() + ": row " + std::to_string(r + 1) + ": no names");
    const auto cont = continent_from_string(row[2]);
    if (!cont)
      throw DataError(countries_csv.string() + ": row " + std::to_string(r + 1) +
                      ": unknown continent: " + row[2]);
    info.continent = *cont;
    if (g.countries_.count(info.code))
      throw DataError(countries_csv.string() + ": duplicate country code: " + info.code);

    g.country_name_index_[normalize_name(info.code)] = info.code;
    for (const auto& name : info.names) {
      const std::string key = normalize_name(name);
      auto [it, inserted] = g.country_name_index_.emplace(key, info.code);
      if (!inserted && it->second != info.code)
        throw DataError(countries_csv.string() + ": country name \"" + name +
                        "\" maps to both " + it->second + " and " + info.code);
    }
    g.countries_.emplace(info.code, std::move(info));
  }

  const csv::Table table = csv::read_file(cities_csv);
  if (table.header !=
      std::vector<std::string>{"canonical_city", "aliases", "country_code", "lat", "lon",
                               "population"})
    throw DataError(cities_csv.string() + ": unexpected header");
  for (size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = cities_csv.string() + ": row " + std::to_string(r + 1);
    try {
      GazetteerEntry e{.canonical_city = util::trim(row[0]),
                       .aliases = {},
                       .country = util::to_lower(row[2]),
                       .country_names = {},
                       .continent = Continent::Africa,
                       .point = GeoPoint(std::stod(row[3]), std::stod(row[4])),
                       .population = std::stoll(row[5])};
      for (auto& c : e.country) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      if (e.canonical_city.empty()) throw DataError("empty canonical city");
      if (e.population < 0) throw DataError("negative population");
      const auto cit = g.countries_.find(e.country);
      if (cit == g.countries_.end()) throw DataError("unknown country code: " + e.country);
      e.continent = cit->second.continent;
      e.country_names = cit->second.names;

      std::set<std::string> aliases;
      aliases.insert(normalize_name(e.canonical_city));
      for (const auto& a : util::split(row[1], '|')) {
        const std::string n = normalize_name(a);
        if (!n.empty()) aliases.insert(n);
      }
      aliases.erase("");
      e.aliases.assign(aliases.begin(), aliases.end());

      const size_t idx = g.entries_.size();
      g.entries_.push_back(std::move(e));
      for (const auto& a : g.entries_.back().aliases) g.alias_index_[a].push_back(idx);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    } catch (const std::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return g;
}

const GazetteerEntry& Gazetteer::resolve_city(std::string_view city,
                                              std::optional<std::string_view> country_hint) const {
  const std::string key = normalize_name(city);
  if (key.empty()) throw NotFoundError("empty city name");
  const auto it = alias_index_.find(key);
  if (it == alias_index_.end())
    throw NotFoundError("city not found in gazetteer: " + std::string(city));

  std::vector<size_t> candidates = it->second;
  if (candidates.size() > 1 && country_hint) {
    if (const auto code = country_code(*country_hint)) {
      std::vector<size_t> filtered;
      for (size_t i : candidates)
        if (entries_[i].country == *code) filtered.push_back(i);
      if (!filtered.empty()) candidates = std::move(filtered);
    }
  }
  if (candidates.size() == 1) return entries_[candidates[0]];

  auto best = candidates.end();
  bool tied = false;
  for (auto c = candidates.begin(); c != candidates.end(); ++c) {
    if (best == candidates.end() || entries_[*c].population > entries_[*best].population) {
      best = c;
      tied = false;
    } else if (entries_[*c].population == entries_[*best].population) {
      tied = true;
    }
  }
  if (!tied) return entries_[*best];

  std::vector<std::string> names;
  for (size_t i : candidates)
    names.push_back(entries_[i].canonical_city + " (" + entries_[i].country + ")");
  throw AmbiguousError("ambiguous city name: " + std::string(city) + " [" +
                           util::join(names, "; ") + "]",
                       std::move(names));
}

Continent Gazetteer::country_to_continent(std::string_view country_name_or_code) const {
  const auto code = country_code(country_name_or_code);
  if (!code) throw NotFoundError("unknown country: " + std::string(country_name_or_code));
  return countries_.at(*code).continent;
}

std::optional<std::string> Gazetteer::country_code(std::string_view name_or_code) const {
  const auto it = country_name_index_.find(normalize_name(name_or_code));
  if (it == country_name_index_.end()) return std::nullopt;
  return it->second;
}

const CountryInfo& Gazetteer::country(std::string_view code) const {
  const auto it = countries_.find(std::string(code));
  if (it == countries_.end()) throw NotFoundError("unknown country code: " + std::string(code));
  return it->second;
}

}  // namespace geobench
