// SPDX-License-Identifier: Apache-2.0
//
// Minimal `key = value` configuration files for the CLI: '#' comments,
// optional [section] headers (keys become "section.key"), duplicate and
// unknown keys rejected, and every diagnostic carries file:line.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ghostsim_cli {

/// Parse or lookup failure; the message already includes file:line context.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& name);

    bool has(const std::string& key) const;

    /// Required typed lookups; throw ConfigError when missing or malformed.
    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    uint64_t get_uint64(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::string> get_string_list(const std::string& key) const;

    /// Optional variants returning `fallback` when the key is absent.
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    uint64_t get_uint64(const std::string& key, uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    /// Throws when any key was never read by a getter (catches typos).
    void fail_on_unused() const;

    /// Canonical "key = value" serialization (sections inlined into key
    /// names, comments dropped).  Parsing the output reproduces the same
    /// entries, and serializing again is byte-identical.
    std::string canonical() const;

    const std::string& name() const { return name_; }

private:
    struct Entry {
        std::string key;
        std::string value;
        int line = 0;
        mutable bool used = false;
    };

    const Entry* find(const std::string& key) const;
    const Entry& require(const std::string& key) const;

    std::string name_;
    std::vector<Entry> entries_;
};

} // namespace ghostsim_cli
