#pragma once

#include <map>
#include <string>
#include <vector>

namespace fedroute {

// Flat "section.key" -> value map parsed from the scenario config format:
// '[section]' headers, 'key = value' lines, '#' comments.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(const std::string& text);
ConfigMap parse_config_file(const std::string& path);

// Typed lookups with defaults; throw std::runtime_error on a bad value.
std::string cfg_str(const ConfigMap& m, const std::string& key, const std::string& def);
double cfg_double(const ConfigMap& m, const std::string& key, double def);
std::size_t cfg_size(const ConfigMap& m, const std::string& key, std::size_t def);
bool cfg_bool(const ConfigMap& m, const std::string& key, bool def);

}  // namespace fedroute
