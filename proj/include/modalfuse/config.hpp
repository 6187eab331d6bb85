#ifndef MODALFUSE_CONFIG_HPP_
#define MODALFUSE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace modalfuse {

// Flat key=value text files (UTF-8, one entry per line, '#' comments).
// Used for run configs, synthetic-data specs, and run manifests.
class KeyValueFile {
public:
    KeyValueFile() = default;

    static KeyValueFile parse_file(const std::string& path);
    static KeyValueFile parse_text(const std::string& text);

    bool has(const std::string& key) const;

    // Typed getters; throw ConfigError on missing key or unparsable value.
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    int64_t get_int(const std::string& key) const;
    uint64_t get_uint(const std::string& key) const;

    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    double get_double_or(const std::string& key, double fallback) const;
    int64_t get_int_or(const std::string& key, int64_t fallback) const;
    uint64_t get_uint_or(const std::string& key, uint64_t fallback) const;

    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, int64_t value);
    void set(const std::string& key, uint64_t value);

    // Keys in first-set order.
    const std::vector<std::string>& keys() const { return order_; }

    // Throws ConfigError naming the first key not in `allowed`.
    void require_known_keys(const std::vector<std::string>& allowed) const;

    std::string to_text() const;
    void write_file(const std::string& path) const;

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

// Shortest round-trippable decimal representation of a double.
std::string format_double(double v);

std::vector<std::string> split(const std::string& s, char sep);

}  // namespace modalfuse

#endif  // MODALFUSE_CONFIG_HPP_
