#include "ordfb/toml.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ordfb/core_types.hpp"

namespace ordfb {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// strips a trailing comment that is not inside a string
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

bool parse_number(const std::string& tok, double& out) {
    if (tok.empty()) return false;
    std::size_t pos = 0;
    try {
        out = std::stod(tok, &pos);
    } catch (...) {
        return false;
    }
    return pos == tok.size();
}

TomlValue parse_scalar(const std::string& tok, std::size_t lineno) {
    TomlValue v;
    if (tok.size() >= 2 && tok.front() == '"' && tok.back() == '"') {
        v.kind = TomlValue::Kind::String;
        v.str = tok.substr(1, tok.size() - 2);
        return v;
    }
    if (tok == "true" || tok == "false") {
        v.kind = TomlValue::Kind::Boolean;
        v.boolean = tok == "true";
        return v;
    }
    double num;
    if (parse_number(tok, num)) {
        v.kind = TomlValue::Kind::Number;
        v.num = num;
        return v;
    }
    std::ostringstream os;
    os << "line " << lineno << ": cannot parse value '" << tok << "'";
    raise(Errc::ConfigError, os.str());
}

std::vector<std::string> split_array_items(const std::string& body,
                                           std::size_t lineno) {
    std::vector<std::string> items;
    std::string cur;
    bool in_str = false;
    for (char c : body) {
        if (c == '"') in_str = !in_str;
        if (c == ',' && !in_str) {
            items.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    std::string last = trim(cur);
    if (!last.empty()) items.push_back(last);
    if (in_str) {
        std::ostringstream os;
        os << "line " << lineno << ": unterminated string in array";
        raise(Errc::ConfigError, os.str());
    }
    return items;
}

}  // namespace

TomlTable TomlTable::parse(const std::string& text) {
    TomlTable table;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                std::ostringstream os;
                os << "line " << lineno << ": malformed section header";
                raise(Errc::ConfigError, os.str());
            }
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) {
                std::ostringstream os;
                os << "line " << lineno << ": empty section name";
                raise(Errc::ConfigError, os.str());
            }
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "line " << lineno << ": expected key = value";
            raise(Errc::ConfigError, os.str());
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            std::ostringstream os;
            os << "line " << lineno << ": empty key or value";
            raise(Errc::ConfigError, os.str());
        }
        std::string full = section.empty() ? key : section + "." + key;

        TomlValue v;
        if (value.front() == '[') {
            if (value.back() != ']') {
                std::ostringstream os;
                os << "line " << lineno << ": unterminated array";
                raise(Errc::ConfigError, os.str());
            }
            auto items = split_array_items(value.substr(1, value.size() - 2), lineno);
            bool all_numbers = true;
            for (const auto& it : items) {
                double tmp;
                if (!parse_number(it, tmp)) all_numbers = false;
            }
            if (items.empty() || all_numbers) {
                v.kind = TomlValue::Kind::NumberList;
                for (const auto& it : items) {
                    double tmp = 0.0;
                    parse_number(it, tmp);
                    v.num_list.push_back(tmp);
                }
            } else {
                v.kind = TomlValue::Kind::StringList;
                for (const auto& it : items) {
                    TomlValue s = parse_scalar(it, lineno);
                    if (s.kind != TomlValue::Kind::String) {
                        std::ostringstream os;
                        os << "line " << lineno << ": mixed array types";
                        raise(Errc::ConfigError, os.str());
                    }
                    v.str_list.push_back(s.str);
                }
            }
        } else {
            v = parse_scalar(value, lineno);
        }
        table.values_[full] = std::move(v);
    }
    return table;
}

TomlTable TomlTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(Errc::ConfigError, "cannot open config file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

bool TomlTable::has(const std::string& key) const {
    return values_.count(key) > 0;
}

namespace {

[[noreturn]] void field_error(const std::string& key, const char* why) {
    raise(Errc::ConfigError, key + " (" + why + ")");
}

}  // namespace

std::string TomlTable::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) field_error(key, "missing");
    if (it->second.kind != TomlValue::Kind::String) field_error(key, "not a string");
    return it->second.str;
}

double TomlTable::get_number(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) field_error(key, "missing");
    if (it->second.kind != TomlValue::Kind::Number) field_error(key, "not a number");
    return it->second.num;
}

std::int64_t TomlTable::get_integer(const std::string& key) const {
    double v = get_number(key);
    double r = std::nearbyint(v);
    if (std::fabs(v - r) > 1e-9) field_error(key, "not an integer");
    return static_cast<std::int64_t>(r);
}

bool TomlTable::get_boolean(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) field_error(key, "missing");
    if (it->second.kind != TomlValue::Kind::Boolean)
        field_error(key, "not a boolean");
    return it->second.boolean;
}

std::vector<double> TomlTable::get_numbers(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) field_error(key, "missing");
    if (it->second.kind != TomlValue::Kind::NumberList)
        field_error(key, "not a number array");
    return it->second.num_list;
}

std::vector<std::string> TomlTable::get_strings(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) field_error(key, "missing");
    if (it->second.kind != TomlValue::Kind::StringList)
        field_error(key, "not a string array");
    return it->second.str_list;
}

std::string TomlTable::get_string_or(const std::string& key,
                                     std::string dflt) const {
    return has(key) ? get_string(key) : std::move(dflt);
}

double TomlTable::get_number_or(const std::string& key, double dflt) const {
    return has(key) ? get_number(key) : dflt;
}

std::int64_t TomlTable::get_integer_or(const std::string& key,
                                       std::int64_t dflt) const {
    return has(key) ? get_integer(key) : dflt;
}

bool TomlTable::get_boolean_or(const std::string& key, bool dflt) const {
    return has(key) ? get_boolean(key) : dflt;
}

}  // namespace ordfb
