#include "fedroute/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fedroute {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key");
        if (section.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": key '" + key + "' outside any [section]");
        out[section + "." + key] = val;
    }
    return out;
}

ConfigMap parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

std::string cfg_str(const ConfigMap& m, const std::string& key, const std::string& def) {
    const auto it = m.find(key);
    return it == m.end() ? def : it->second;
}

double cfg_double(const ConfigMap& m, const std::string& key, double def) {
    const auto it = m.find(key);
    if (it == m.end()) return def;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("trailing chars");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad numeric value for " + key + ": '" +
                                 it->second + "'");
    }
}

std::size_t cfg_size(const ConfigMap& m, const std::string& key, std::size_t def) {
    const auto it = m.find(key);
    if (it == m.end()) return def;
    try {
        if (!it->second.empty() && it->second.front() == '-')
            throw std::invalid_argument("negative");
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument("bad");
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad integer value for " + key + ": '" +
                                 it->second + "'");
    }
}

bool cfg_bool(const ConfigMap& m, const std::string& key, bool def) {
    const auto it = m.find(key);
    if (it == m.end()) return def;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw std::runtime_error("config: bad boolean value for " + key + ": '" +
                             it->second + "'");
}

}  // namespace fedroute
