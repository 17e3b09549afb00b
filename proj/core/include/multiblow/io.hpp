#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace multiblow {

/// Sectioned key=value text, '#' or ';' comments. Section and key order is
/// preserved for canonical hashing.
class KeyValueFile {
public:
    static KeyValueFile parse_file(const std::filesystem::path& path);
    static KeyValueFile parse_string(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get(const std::string& section, const std::string& key) const;
    void set(const std::string& section, const std::string& key, const std::string& value);

    /// "section.key=value" lines, sorted; input order independent.
    std::string canonical() const;

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_; // keys are "section.key"
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::map<std::string, std::size_t> index_;
};

/// FNV-1a 64-bit, returned as 16 hex chars. Stable across platforms.
std::string fnv1a_hex(const std::string& data);

/// Writes content to path atomically (temp file + rename).
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// Minimal CSV writer: header row then data rows, %.17g formatting.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> columns);
    void add_row(const std::vector<double>& values);
    std::string str() const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<double>> rows_;
};

} // namespace multiblow
