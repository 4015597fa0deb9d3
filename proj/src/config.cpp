#include "crowdnav/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crowdnav {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_string(buf.str());
}

Config Config::from_string(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("config line missing '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config line with empty key: " + line);
        cfg.entries_.emplace_back(key, value);
    }
    return cfg;
}

bool Config::has(const std::string& key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return true;
    return false;
}

void Config::set(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }

std::string Config::get_string(const std::string& key, const std::string& def) const {
    std::string out = def;
    for (const auto& [k, v] : entries_)
        if (k == key) out = v;
    return out;
}

double Config::get_double(const std::string& key, double def) const {
    const std::string v = get_string(key);
    return has(key) ? std::stod(v) : def;
}

int Config::get_int(const std::string& key, int def) const {
    const std::string v = get_string(key);
    return has(key) ? std::stoi(v) : def;
}

uint64_t Config::get_uint64(const std::string& key, uint64_t def) const {
    const std::string v = get_string(key);
    return has(key) ? static_cast<uint64_t>(std::stoull(v)) : def;
}

bool Config::get_bool(const std::string& key, bool def) const {
    if (!has(key)) return def;
    const std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::runtime_error("config key '" + key + "' is not a boolean: " + v);
}

std::vector<double> Config::get_numbers(const std::string& key) const { return parse_numbers(get_string(key)); }

std::vector<std::string> Config::get_all(const std::string& key) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : entries_)
        if (k == key) out.push_back(v);
    return out;
}

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream in(cleaned);
    double v = 0.0;
    while (in >> v) out.push_back(v);
    return out;
}

}  // namespace crowdnav
