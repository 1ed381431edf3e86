#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace relayguard {

/// Flat key=value configuration. Lines are `key = value`; `#` starts a
/// comment; a `[section]` line prefixes following keys with `section.`.
/// Getters record which keys were consumed so that unknown (mistyped) keys
/// can be reported after all consumers have run.
class Config {
public:
    Config() = default;

    static Config parse(std::istream& in, std::string_view origin = "<config>");
    static Config load_file(const std::string& path);

    /// Parses `key=value`; throws Error(InvalidConfig) otherwise.
    void set_assignment(std::string_view assignment);
    void set(std::string key, std::string value);

    bool contains(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    std::vector<std::string> unused_keys() const;
    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

private:
    const std::string* find(const std::string& key) const;

    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> used_;
};

/// Ordered key=value list describing a fully resolved configuration; the
/// canonical text form feeds the config fingerprint.
class ResolvedConfig {
public:
    void add(const std::string& key, double value);
    void add(const std::string& key, std::int64_t value);
    void add(const std::string& key, std::uint64_t value);
    void add(const std::string& key, bool value);
    void add(const std::string& key, const std::string& value);

    /// Sorted `key=value\n` lines.
    std::string canonical_text() const;

    /// First 16 hex digits of SHA-256 over canonical_text().
    std::string fingerprint() const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

/// Fixed-point text with `digits` decimals, used for report columns.
std::string format_fixed(double value, int digits);

}  // namespace relayguard
