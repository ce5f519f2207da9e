#pragma once

#include <map>
#include <string>
#include <vector>

namespace cmlp::exp {

// Flat key-value config with one section per experiment. Values from the
// file are overridden per key by CLI flags of the same name.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path);

    void set(const std::string& section, const std::string& key, const std::string& value);
    bool has(const std::string& section, const std::string& key) const;

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& section, const std::string& key,
                         std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key,
                          std::uint64_t fallback) const;

    // Key-sorted view of one section, for manifests.
    std::vector<std::pair<std::string, std::string>> section_items(
        const std::string& section) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace cmlp::exp
