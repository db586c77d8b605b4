#pragma once

// Run configuration files:
//
//   scenario = fig2          # top-level keys
//   [params]
//   alpha = 1/40             # numbers, simple fractions, strings
//   Gamma = 2.5e-5, 5e-5     # comma lists
//
// Keys inside a section are addressed as "section.key".

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phonongate::cli {

class Config {
public:
    static Config parse(std::string_view text, std::string origin = "<string>");
    static Config load(const std::filesystem::path& path);

    const std::string& origin() const noexcept { return origin_; }
    bool has(std::string_view key) const;

    std::string text(std::string_view key) const;
    std::string text(std::string_view key, std::string fallback) const;
    double number(std::string_view key) const;
    double number(std::string_view key, double fallback) const;
    int integer(std::string_view key, int fallback) const;
    bool flag(std::string_view key, bool fallback) const;
    /// Non-empty comma list; a single value is a one-element list.
    std::vector<double> numbers(std::string_view key) const;
    std::vector<double> numbers(std::string_view key, std::vector<double> fallback) const;

    /// Adds or replaces a key (command-line overrides, tests).
    void set(std::string key, std::string value);

    /// Keys present in the file that no getter has read.
    std::vector<std::string> unused_keys() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool used = false;
    };
    const Entry& entry(std::string_view key) const;

    std::string origin_;
    std::map<std::string, Entry, std::less<>> entries_;
};

/// Parses "2.5e-5", "1/40" or "-3"; throws ConfigError on anything else.
double parse_number(std::string_view token, std::string_view context);

struct RunConfig {
    std::string scenario;
    Config values;
    std::optional<std::filesystem::path> output;
    std::uint64_t seed = 0;  ///< reserved; every scenario is deterministic

    static RunConfig from(Config values);
};

}  // namespace phonongate::cli
