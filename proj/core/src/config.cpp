#include "relayguard/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "relayguard/digest.hpp"
#include "relayguard/errors.hpp"

namespace relayguard {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* kind) {
    throw Error(Errc::InvalidConfig, "config key '" + key + "': '" + value + "' is not a valid " + kind);
}

}  // namespace

Config Config::parse(std::istream& in, std::string_view origin) {
    Config cfg;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        if (view.front() == '[') {
            if (view.back() != ']') {
                throw Error(Errc::InvalidConfig, std::string(origin) + ":" + std::to_string(line_no) +
                                                     ": unterminated section header");
            }
            section = std::string(trim(view.substr(1, view.size() - 2)));
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw Error(Errc::InvalidConfig,
                        std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
        }
        std::string key(trim(view.substr(0, eq)));
        if (key.empty()) {
            throw Error(Errc::InvalidConfig, std::string(origin) + ":" + std::to_string(line_no) + ": empty key");
        }
        if (!section.empty()) key = section + "." + key;
        cfg.entries_[key] = std::string(trim(view.substr(eq + 1)));
    }
    return cfg;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::InvalidConfig, "cannot open config file '" + path + "'");
    return parse(in, path);
}

void Config::set_assignment(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || trim(assignment.substr(0, eq)).empty()) {
        throw Error(Errc::InvalidConfig, "override '" + std::string(assignment) + "' is not key=value");
    }
    set(std::string(trim(assignment.substr(0, eq))), std::string(trim(assignment.substr(eq + 1))));
}

void Config::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

bool Config::contains(const std::string& key) const { return entries_.count(key) != 0; }

const std::string* Config::find(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    used_.insert(key);
    return &it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) bad_value(key, *v, "number");
    return out;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) bad_value(key, *v, "integer");
    return out;
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size()) bad_value(key, *v, "non-negative integer");
    return out;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
    if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
    bad_value(key, *v, "boolean");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto* v = find(key);
    return v ? *v : fallback;
}

std::vector<std::string> Config::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : entries_) {
        if (!used_.count(k)) out.push_back(k);
    }
    return out;
}

void ResolvedConfig::add(const std::string& key, double value) { entries_[key] = format_double(value); }
void ResolvedConfig::add(const std::string& key, std::int64_t value) { entries_[key] = std::to_string(value); }
void ResolvedConfig::add(const std::string& key, std::uint64_t value) { entries_[key] = std::to_string(value); }
void ResolvedConfig::add(const std::string& key, bool value) { entries_[key] = value ? "true" : "false"; }
void ResolvedConfig::add(const std::string& key, const std::string& value) { entries_[key] = value; }

std::string ResolvedConfig::canonical_text() const {
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    return out;
}

std::string ResolvedConfig::fingerprint() const {
    const auto d = sha256(canonical_text());
    return to_hex(std::span<const std::uint8_t>(d.data(), 8));
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

std::string format_fixed(double value, int digits) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed, digits);
    return std::string(buf, ptr);
}

}  // namespace relayguard
