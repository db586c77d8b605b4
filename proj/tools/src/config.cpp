#include "phonongate/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "phonongate/errors.hpp"

namespace phonongate::cli {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return std::string(s.substr(1, s.size() - 2));
    return std::string(s);
}

bool valid_key(std::string_view k) {
    return !k.empty() && std::all_of(k.begin(), k.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    });
}

double plain_number(std::string_view token, std::string_view context) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
        throw ConfigError(std::string(context) + ": '" + std::string(token) + "' is not a number");
    }
    return v;
}

}  // namespace

double parse_number(std::string_view token, std::string_view context) {
    token = trim(token);
    if (const auto slash = token.find('/'); slash != std::string_view::npos) {
        const double num = plain_number(token.substr(0, slash), context);
        const double den = plain_number(token.substr(slash + 1), context);
        if (den == 0.0) throw ConfigError(std::string(context) + ": division by zero");
        return num / den;
    }
    return plain_number(token, context);
}

Config Config::parse(std::string_view text, std::string origin) {
    Config c;
    c.origin_ = std::move(origin);
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = [&] { return c.origin_ + ":" + std::to_string(line_no); };
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where() + ": unterminated section header");
            const auto name = trim(line.substr(1, line.size() - 2));
            if (!valid_key(name)) throw ConfigError(where() + ": bad section name");
            section = std::string(name);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where() + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        if (!valid_key(key)) throw ConfigError(where() + ": bad key '" + std::string(key) + "'");
        std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
        const auto value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError(where() + ": empty value for '" + full + "'");
        if (c.entries_.contains(full)) throw ConfigError(where() + ": duplicate key '" + full + "'");
        c.entries_.emplace(std::move(full), Entry{std::string(value), line_no});
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path.string());
}

bool Config::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

const Config::Entry& Config::entry(std::string_view key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw ConfigError(origin_ + ": missing key '" + std::string(key) + "'");
    it->second.used = true;
    return it->second;
}

std::string Config::text(std::string_view key) const { return unquote(entry(key).value); }

std::string Config::text(std::string_view key, std::string fallback) const {
    return has(key) ? text(key) : std::move(fallback);
}

double Config::number(std::string_view key) const {
    const auto& e = entry(key);
    return parse_number(e.value, origin_ + ":" + std::to_string(e.line));
}

double Config::number(std::string_view key, double fallback) const { return has(key) ? number(key) : fallback; }

int Config::integer(std::string_view key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = number(key);
    if (v != static_cast<double>(static_cast<int>(v))) {
        throw ConfigError(origin_ + ": '" + std::string(key) + "' must be an integer");
    }
    return static_cast<int>(v);
}

bool Config::flag(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = text(key);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(origin_ + ": '" + std::string(key) + "' must be true or false");
}

std::vector<double> Config::numbers(std::string_view key) const {
    const auto& e = entry(key);
    std::vector<double> out;
    std::string_view rest = e.value;
    const std::string ctx = origin_ + ":" + std::to_string(e.line);
    while (true) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        if (item.empty()) throw ConfigError(ctx + ": empty list element in '" + std::string(key) + "'");
        out.push_back(parse_number(item, ctx));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return out;
}

std::vector<double> Config::numbers(std::string_view key, std::vector<double> fallback) const {
    return has(key) ? numbers(key) : std::move(fallback);
}

void Config::set(std::string key, std::string value) {
    auto& e = entries_[std::move(key)];
    e.value = std::move(value);
    e.used = false;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, e] : entries_) {
        if (!e.used) out.push_back(k);
    }
    return out;
}

RunConfig RunConfig::from(Config values) {
    RunConfig r;
    r.scenario = values.text("scenario");
    if (values.has("output")) r.output = values.text("output");
    const int seed = values.integer("seed", 0);
    if (seed < 0) throw ConfigError("seed must be >= 0");
    r.seed = static_cast<std::uint64_t>(seed);
    r.values = std::move(values);
    return r;
}

}  // namespace phonongate::cli
