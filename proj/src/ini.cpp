#include "geobench/ini.hpp"

#include <sstream>

#include "geobench/util.hpp"

namespace geobench::ini {

Document parse(const std::string& text, const std::string& origin) {
  Document doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = util::trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw DataError(origin + ": line " + std::to_string(lineno) + ": unterminated section");
      section = util::trim(t.substr(1, t.size() - 2));
      doc[section];
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw DataError(origin + ": line " + std::to_string(lineno) + ": expected key=value");
    std::string key = util::trim(t.substr(0, eq));
    std::string value = util::trim(t.substr(eq + 1));
    if (key.empty())
      throw DataError(origin + ": line " + std::to_string(lineno) + ": empty key");
    doc[section][key] = value;
  }
  return doc;
}

Document parse_file(const std::filesystem::path& path) {
  return parse(util::read_file(path), path.string());
}

}  // namespace geobench::ini
