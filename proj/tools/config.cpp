#include "config.hpp"

#include <fstream>
#include <stdexcept>

namespace cmlp::exp {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("config: cannot open " + path);
    Config cfg;
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: bad line " + std::to_string(lineno) + " in " +
                                     path);
        cfg.set(section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    sections_[section][key] = value;
}

bool Config::has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    const auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
    if (!has(section, key)) return fallback;
    return std::stod(get(section, key, ""));
}

std::size_t Config::get_size(const std::string& section, const std::string& key,
                             std::size_t fallback) const {
    if (!has(section, key)) return fallback;
    return static_cast<std::size_t>(std::stoull(get(section, key, "")));
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key,
                              std::uint64_t fallback) const {
    if (!has(section, key)) return fallback;
    return std::stoull(get(section, key, ""));
}

std::vector<std::pair<std::string, std::string>> Config::section_items(
    const std::string& section) const {
    std::vector<std::pair<std::string, std::string>> out;
    const auto s = sections_.find(section);
    if (s != sections_.end())
        for (const auto& [k, v] : s->second) out.emplace_back(k, v);
    return out;
}

}  // namespace cmlp::exp
