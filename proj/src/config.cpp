#include "speclab/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace speclab {
namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

bool Config::has(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    return it != sections_.end() && it->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key) const {
    auto it = sections_.find(section);
    if (it == sections_.end() || !it->second.count(key))
        throw std::invalid_argument("config: missing key '" + key + "' in section [" + section + "]");
    return it->second.at(key);
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
    return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        size_t end = 0;
        double d = std::stod(v, &end);
        if (trim(v.substr(end)).empty()) return d;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("config: key '" + key + "' in [" + section + "] is not a number: " + v);
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
    const std::string v = get(section, key);
    try {
        size_t end = 0;
        long long i = std::stoll(v, &end);
        if (trim(v.substr(end)).empty()) return i;
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("config: key '" + key + "' in [" + section + "] is not an integer: " + v);
}

long long Config::get_int_or(const std::string& section, const std::string& key,
                             long long fallback) const {
    return has(section, key) ? get_int(section, key) : fallback;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

void Config::set_double(const std::string& section, const std::string& key, double value) {
    set(section, key, format_double(value));
}

void Config::set_int(const std::string& section, const std::string& key, long long value) {
    set(section, key, std::to_string(value));
}

Config parse_config(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config: malformed section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: expected 'key = value' at line " +
                                        std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::invalid_argument("config: empty key at line " + std::to_string(lineno));
        c.set(section, key, value);
    }
    return c;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("config: cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const Config& c) {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, section] : c.sections()) {
        if (section.empty()) continue;
        if (!first) out << "\n";
        first = false;
        if (!name.empty()) out << "[" << name << "]\n";
        for (const auto& [key, value] : section) out << key << " = " << value << "\n";
    }
    return out.str();
}

std::uint64_t config_hash(const Config& c) {
    const std::string s = serialize_config(c);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char byte : s) {
        h ^= byte;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

}  // namespace speclab
