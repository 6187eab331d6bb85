#include "modalfuse/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "modalfuse/errors.hpp"

namespace modalfuse {

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

KeyValueFile KeyValueFile::parse_text(const std::string& text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        kv.set(key, value);
    }
    return kv;
}

bool KeyValueFile::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KeyValueFile::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key: " + key);
    return it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
    std::string v = get_string(key);
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    double d = std::strtod(begin, &end);
    if (end != begin + v.size() || v.empty() || errno == ERANGE)
        throw ConfigError("config key '" + key + "': not a number: " + v);
    return d;
}

int64_t KeyValueFile::get_int(const std::string& key) const {
    std::string v = get_string(key);
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    long long d = std::strtoll(begin, &end, 10);
    if (end != begin + v.size() || v.empty() || errno == ERANGE)
        throw ConfigError("config key '" + key + "': not an integer: " + v);
    return d;
}

uint64_t KeyValueFile::get_uint(const std::string& key) const {
    int64_t v = get_int(key);
    if (v < 0) throw ConfigError("config key '" + key + "': must be non-negative");
    return static_cast<uint64_t>(v);
}

std::string KeyValueFile::get_string_or(const std::string& key,
                                        const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}
double KeyValueFile::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}
int64_t KeyValueFile::get_int_or(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}
uint64_t KeyValueFile::get_uint_or(const std::string& key, uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

void KeyValueFile::set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) order_.push_back(key);
    values_[key] = value;
}
void KeyValueFile::set(const std::string& key, double value) { set(key, format_double(value)); }
void KeyValueFile::set(const std::string& key, int64_t value) { set(key, std::to_string(value)); }
void KeyValueFile::set(const std::string& key, uint64_t value) { set(key, std::to_string(value)); }

void KeyValueFile::require_known_keys(const std::vector<std::string>& allowed) const {
    for (const std::string& k : order_) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("unknown config key: " + k);
    }
}

std::string KeyValueFile::to_text() const {
    std::string out;
    for (const std::string& k : order_) {
        out += k;
        out += " = ";
        out += values_.at(k);
        out += "\n";
    }
    return out;
}

void KeyValueFile::write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write config file: " + path);
    out << to_text();
    if (!out) throw IoError("write failed: " + path);
}

std::string format_double(double v) {
    // shortest representation that parses back to the same double
    for (int prec = 1; prec <= 17; ++prec) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

}  // namespace modalfuse
