#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace speclab {

// Plain-text "key = value" configuration with [section] headers. Keys outside
// any header land in the unnamed section "". Parsing and serialization are
// inverse up to canonical form (sorted sections and keys, single spaces),
// so serialize(parse(serialize(c))) == serialize(c) byte for byte.
class Config {
  public:
    using Section = std::map<std::string, std::string>;

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    long long get_int(const std::string& section, const std::string& key) const;
    long long get_int_or(const std::string& section, const std::string& key,
                         long long fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);
    void set_double(const std::string& section, const std::string& key, double value);
    void set_int(const std::string& section, const std::string& key, long long value);

    const std::map<std::string, Section>& sections() const { return sections_; }

  private:
    std::map<std::string, Section> sections_;
};

Config parse_config(const std::string& text);
Config load_config_file(const std::string& path);
std::string serialize_config(const Config& c);

// FNV-1a over the canonical serialization.
std::uint64_t config_hash(const Config& c);

// 17-significant-digit decimal form that round-trips the double exactly.
std::string format_double(double v);

// Atomic write: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace speclab
