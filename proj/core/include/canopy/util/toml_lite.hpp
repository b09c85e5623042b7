#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace canopy::util {

// Minimal TOML subset: [table] headers, key = value pairs, strings, integers,
// floats, booleans and flat arrays, with # comments. Every diagnostic carries
// source:line. No nested arrays/inline tables/dates.
class TomlDoc {
public:
    using Scalar = std::variant<bool, std::int64_t, double, std::string>;
    struct Value {
        bool is_array = false;
        std::vector<Scalar> items; // one element when scalar
        int line = 0;
    };

    static TomlDoc parse(const std::string& text, const std::string& source);
    static TomlDoc parse_file(const std::filesystem::path& path);

    bool has(const std::string& dotted_key) const;
    // dotted keys, insertion order
    std::vector<std::string> keys() const;

    // Typed getters; throw ConfigError when the key is present with another
    // type. *_or variants return the fallback when the key is absent.
    std::string get_string(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    double get_double(const std::string& key) const; // accepts integer values
    bool get_bool(const std::string& key) const;
    std::vector<double> get_double_array(const std::string& key) const;
    std::vector<std::string> get_string_array(const std::string& key) const;

    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    std::int64_t get_int_or(const std::string& key, std::int64_t fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    bool get_bool_or(const std::string& key, bool fallback) const;

    int line_of(const std::string& key) const;

private:
    const Value& require(const std::string& key) const;
    Scalar require_scalar(const std::string& key) const;

    std::string source_;
    std::map<std::string, Value> values_;
    std::vector<std::string> order_;
};

} // namespace canopy::util
