#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace crowdnav {

/// Flat key-value configuration, parsed from "key = value" lines with '#'
/// comments. Repeated keys accumulate; single-value getters take the last
/// occurrence so later entries override earlier ones.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& def = "") const;
    double get_double(const std::string& key, double def) const;
    int get_int(const std::string& key, int def) const;
    uint64_t get_uint64(const std::string& key, uint64_t def) const;
    bool get_bool(const std::string& key, bool def) const;

    /// Whitespace- or comma-separated numbers from the last value of key.
    std::vector<double> get_numbers(const std::string& key) const;
    /// All values recorded for a repeated key, in file order.
    std::vector<std::string> get_all(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::vector<double> parse_numbers(const std::string& text);

}  // namespace crowdnav
