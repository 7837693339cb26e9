#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace geobench::ini {

// section -> key -> value. Keys outside any [section] land in section "".
using Document = std::map<std::string, std::map<std::string, std::string>>;

Document parse(const std::string& text, const std::string& origin = "<string>");
Document parse_file(const std::filesystem::path& path);

}  // namespace geobench::ini
