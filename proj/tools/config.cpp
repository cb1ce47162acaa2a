// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace ghostsim_cli {

namespace {

std::string trim(const std::string& s) {
    const size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string where(const std::string& name, int line) {
    return name + ":" + std::to_string(line) + ": ";
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    size_t pos = 0;
    while (pos <= value.size()) {
        const size_t comma = value.find(',', pos);
        const size_t stop = comma == std::string::npos ? value.size() : comma;
        out.push_back(trim(value.substr(pos, stop - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    // A trailing comma (empty last element) is tolerated.
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

double parse_double(const std::string& text, const std::string& context) {
    const std::string t = trim(text);
    double value = 0.0;
    const std::from_chars_result res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(context + "expected a number, got '" + t + "'");
    return value;
}

} // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& name) {
    ConfigFile out;
    out.name_ = name;
    std::string section;
    int line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t eol = text.find('\n', pos);
        const size_t stop = eol == std::string::npos ? text.size() : eol;
        std::string line = text.substr(pos, stop - pos);
        ++line_no;
        pos = stop + 1;
        if (eol == std::string::npos && line.empty()) break;

        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where(name, line_no) + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError(where(name, line_no) + "empty section name");
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where(name, line_no) + "expected 'key = value', got '" + line +
                              "'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where(name, line_no) + "empty key");
        if (!section.empty()) key = section + "." + key;

        for (const Entry& e : out.entries_)
            if (e.key == key)
                throw ConfigError(where(name, line_no) + "duplicate key '" + key +
                                  "' (first set on line " + std::to_string(e.line) + ")");
        out.entries_.push_back(Entry{key, value, line_no, false});
    }
    return out;
}

const ConfigFile::Entry* ConfigFile::find(const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.key == key) {
            e.used = true;
            return &e;
        }
    return nullptr;
}

const ConfigFile::Entry& ConfigFile::require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(name_ + ": missing required key '" + key + "'");
    return *e;
}

bool ConfigFile::has(const std::string& key) const { return find(key) != nullptr; }

std::string ConfigFile::get_string(const std::string& key) const { return require(key).value; }

double ConfigFile::get_double(const std::string& key) const {
    const Entry& e = require(key);
    return parse_double(e.value, where(name_, e.line) + "key '" + key + "': ");
}

long long ConfigFile::get_int(const std::string& key) const {
    const Entry& e = require(key);
    const std::string t = trim(e.value);
    long long value = 0;
    const std::from_chars_result res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(where(name_, e.line) + "key '" + key + "': expected an integer, got '" +
                          t + "'");
    return value;
}

uint64_t ConfigFile::get_uint64(const std::string& key) const {
    const Entry& e = require(key);
    const std::string t = trim(e.value);
    uint64_t value = 0;
    const std::from_chars_result res = std::from_chars(t.data(), t.data() + t.size(), value);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(where(name_, e.line) + "key '" + key +
                          "': expected a non-negative integer, got '" + t + "'");
    return value;
}

bool ConfigFile::get_bool(const std::string& key) const {
    const Entry& e = require(key);
    const std::string t = trim(e.value);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError(where(name_, e.line) + "key '" + key + "': expected a boolean, got '" + t +
                      "'");
}

std::vector<double> ConfigFile::get_double_list(const std::string& key) const {
    const Entry& e = require(key);
    std::vector<double> out;
    for (const std::string& item : split_list(e.value))
        out.push_back(parse_double(item, where(name_, e.line) + "key '" + key + "': "));
    return out;
}

std::vector<std::string> ConfigFile::get_string_list(const std::string& key) const {
    return split_list(require(key).value);
}

std::string ConfigFile::get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long ConfigFile::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

uint64_t ConfigFile::get_uint64(const std::string& key, uint64_t fallback) const {
    return has(key) ? get_uint64(key) : fallback;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    return has(key) ? get_bool(key) : fallback;
}

void ConfigFile::fail_on_unused() const {
    std::string unknown;
    for (const Entry& e : entries_)
        if (!e.used) {
            if (!unknown.empty()) unknown += ", ";
            unknown += "'" + e.key + "' (line " + std::to_string(e.line) + ")";
        }
    if (!unknown.empty())
        throw ConfigError(name_ + ": unknown key(s): " + unknown);
}

std::string ConfigFile::canonical() const {
    std::string out;
    for (const Entry& e : entries_) {
        out += e.key;
        out += " = ";
        out += e.value;
        out += '\n';
    }
    return out;
}

} // namespace ghostsim_cli
