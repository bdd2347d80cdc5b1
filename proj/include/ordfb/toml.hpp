#pragma once

// Reader for the TOML subset used by experiment configs: one level of
// [section] headers, key = value lines with strings, numbers, booleans, and
// flat arrays, plus # comments. Keys are exposed as "section.key". Anything
// outside the subset is a ConfigError naming the offending line or field.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ordfb {

struct TomlValue {
    enum class Kind { String, Number, Boolean, NumberList, StringList };
    Kind kind = Kind::String;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<double> num_list;
    std::vector<std::string> str_list;
};

class TomlTable {
public:
    static TomlTable parse(const std::string& text);
    static TomlTable parse_file(const std::string& path);

    bool has(const std::string& key) const;

    // typed getters; missing key or wrong type is a ConfigError(key)
    std::string get_string(const std::string& key) const;
    double get_number(const std::string& key) const;
    std::int64_t get_integer(const std::string& key) const;  // must be integral
    bool get_boolean(const std::string& key) const;
    std::vector<double> get_numbers(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    // defaults for optional keys
    std::string get_string_or(const std::string& key, std::string dflt) const;
    double get_number_or(const std::string& key, double dflt) const;
    std::int64_t get_integer_or(const std::string& key, std::int64_t dflt) const;
    bool get_boolean_or(const std::string& key, bool dflt) const;

    const std::map<std::string, TomlValue>& entries() const { return values_; }

private:
    std::map<std::string, TomlValue> values_;
};

}  // namespace ordfb
