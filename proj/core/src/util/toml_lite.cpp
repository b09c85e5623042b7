#include "canopy/util/toml_lite.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "canopy/util/error.hpp"

namespace canopy::util {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
    throw ParseError(source + ":" + std::to_string(line) + ": " + msg);
}

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char c : key) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.')
            return false;
    }
    return true;
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (c == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

struct Cursor {
    const std::string& text;
    std::size_t pos = 0;
    const std::string& source;
    int line;

    void skip_ws() {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() { return text[pos]; }
};

std::string parse_quoted(Cursor& c) {
    ++c.pos; // opening quote
    std::string out;
    while (c.pos < c.text.size()) {
        const char ch = c.text[c.pos];
        if (ch == '\\') {
            if (c.pos + 1 >= c.text.size()) fail(c.source, c.line, "dangling escape");
            const char esc = c.text[c.pos + 1];
            switch (esc) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                default: fail(c.source, c.line, std::string("unknown escape \\") + esc);
            }
            c.pos += 2;
            continue;
        }
        if (ch == '"') {
            ++c.pos;
            return out;
        }
        out += ch;
        ++c.pos;
    }
    fail(c.source, c.line, "unterminated string");
}

TomlDoc::Scalar parse_bare(Cursor& c) {
    const std::size_t start = c.pos;
    while (c.pos < c.text.size() && c.text[c.pos] != ',' && c.text[c.pos] != ']')
        ++c.pos;
    const std::string token = trim(c.text.substr(start, c.pos - start));
    if (token.empty()) fail(c.source, c.line, "empty value");
    if (token == "true") return true;
    if (token == "false") return false;

    const bool looks_float = token.find_first_of(".eE") != std::string::npos ||
                             token == "inf" || token == "-inf" || token == "nan";
    if (!looks_float) {
        std::int64_t iv = 0;
        const auto [ptr, ec] =
            std::from_chars(token.data(), token.data() + token.size(), iv);
        if (ec == std::errc() && ptr == token.data() + token.size()) return iv;
    }
    double dv = 0.0;
    try {
        std::size_t used = 0;
        dv = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
        fail(c.source, c.line, "cannot parse value '" + token + "'");
    }
    return dv;
}

TomlDoc::Scalar parse_scalar(Cursor& c) {
    c.skip_ws();
    if (c.pos >= c.text.size()) fail(c.source, c.line, "missing value");
    if (c.peek() == '"') return parse_quoted(c);
    return parse_bare(c);
}

} // namespace

TomlDoc TomlDoc::parse(const std::string& text, const std::string& source) {
    TomlDoc doc;
    doc.source_ = source;

    std::istringstream in(text);
    std::string raw;
    std::string table;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(source, line_no, "unterminated table header");
            table = trim(line.substr(1, line.size() - 2));
            if (!valid_key(table)) fail(source, line_no, "bad table name '" + table + "'");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(source, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_key(key) || key.find('.') != std::string::npos)
            fail(source, line_no, "bad key '" + key + "'");
        const std::string dotted = table.empty() ? key : table + "." + key;
        if (doc.values_.count(dotted))
            fail(source, line_no,
                 "duplicate key '" + dotted + "' (first set on line " +
                     std::to_string(doc.values_.at(dotted).line) + ")");

        Value value;
        value.line = line_no;
        const std::string rhs = trim(line.substr(eq + 1));
        if (rhs.empty()) fail(source, line_no, "missing value for '" + dotted + "'");

        Cursor c{rhs, 0, source, line_no};
        if (rhs.front() == '[') {
            value.is_array = true;
            ++c.pos;
            c.skip_ws();
            if (!c.done() && c.peek() == ']') {
                ++c.pos;
            } else {
                while (true) {
                    value.items.push_back(parse_scalar(c));
                    c.skip_ws();
                    if (c.pos >= c.text.size()) fail(source, line_no, "unterminated array");
                    if (c.peek() == ',') {
                        ++c.pos;
                        continue;
                    }
                    if (c.peek() == ']') {
                        ++c.pos;
                        break;
                    }
                    fail(source, line_no, "expected ',' or ']' in array");
                }
            }
        } else {
            value.items.push_back(parse_scalar(c));
        }
        if (!c.done()) fail(source, line_no, "trailing characters after value");

        doc.values_.emplace(dotted, std::move(value));
        doc.order_.push_back(dotted);
    }
    return doc;
}

TomlDoc TomlDoc::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

bool TomlDoc::has(const std::string& dotted_key) const { return values_.count(dotted_key) > 0; }

std::vector<std::string> TomlDoc::keys() const { return order_; }

int TomlDoc::line_of(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? 0 : it->second.line;
}

const TomlDoc::Value& TomlDoc::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError(source_ + ": missing required key '" + key + "'");
    return it->second;
}

TomlDoc::Scalar TomlDoc::require_scalar(const std::string& key) const {
    const Value& v = require(key);
    if (v.is_array)
        throw ConfigError(source_ + ": key '" + key + "' is an array, expected a scalar");
    return v.items.at(0);
}

namespace {

[[noreturn]] void type_error(const std::string& source, const std::string& key,
                             const char* want) {
    throw ConfigError(source + ": key '" + key + "' is not " + want);
}

} // namespace

std::string TomlDoc::get_string(const std::string& key) const {
    const Scalar s = require_scalar(key);
    if (const auto* v = std::get_if<std::string>(&s)) return *v;
    type_error(source_, key, "a string");
}

std::int64_t TomlDoc::get_int(const std::string& key) const {
    const Scalar s = require_scalar(key);
    if (const auto* v = std::get_if<std::int64_t>(&s)) return *v;
    type_error(source_, key, "an integer");
}

double TomlDoc::get_double(const std::string& key) const {
    const Scalar s = require_scalar(key);
    if (const auto* v = std::get_if<double>(&s)) return *v;
    if (const auto* v = std::get_if<std::int64_t>(&s)) return static_cast<double>(*v);
    type_error(source_, key, "a number");
}

bool TomlDoc::get_bool(const std::string& key) const {
    const Scalar s = require_scalar(key);
    if (const auto* v = std::get_if<bool>(&s)) return *v;
    type_error(source_, key, "a boolean");
}

std::vector<double> TomlDoc::get_double_array(const std::string& key) const {
    const Value& v = require(key);
    if (!v.is_array) type_error(source_, key, "an array");
    std::vector<double> out;
    for (const Scalar& s : v.items) {
        if (const auto* d = std::get_if<double>(&s)) out.push_back(*d);
        else if (const auto* i = std::get_if<std::int64_t>(&s))
            out.push_back(static_cast<double>(*i));
        else
            type_error(source_, key, "a numeric array");
    }
    return out;
}

std::vector<std::string> TomlDoc::get_string_array(const std::string& key) const {
    const Value& v = require(key);
    if (!v.is_array) type_error(source_, key, "an array");
    std::vector<std::string> out;
    for (const Scalar& s : v.items) {
        if (const auto* str = std::get_if<std::string>(&s)) out.push_back(*str);
        else
            type_error(source_, key, "a string array");
    }
    return out;
}

std::string TomlDoc::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}
std::int64_t TomlDoc::get_int_or(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}
double TomlDoc::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}
bool TomlDoc::get_bool_or(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

} // namespace canopy::util
