#include "multiblow/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "multiblow/errors.hpp"

namespace multiblow {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

KeyValueFile KeyValueFile::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

KeyValueFile KeyValueFile::parse_string(const std::string& text) {
    KeyValueFile kv;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line = line.substr(0, cut);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("malformed section header at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value at line " + std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key at line " + std::to_string(lineno));
        kv.set(section, key, val);
    }
    return kv;
}

bool KeyValueFile::has(const std::string& section, const std::string& key) const {
    return index_.count(section + "." + key) > 0;
}

std::string KeyValueFile::get(const std::string& section, const std::string& key) const {
    const auto it = index_.find(section + "." + key);
    if (it == index_.end())
        throw ConfigError("missing key [" + section + "] " + key);
    return entries_[it->second].second;
}

void KeyValueFile::set(const std::string& section, const std::string& key,
                       const std::string& value) {
    const std::string full = section + "." + key;
    const auto it = index_.find(full);
    if (it != index_.end()) {
        entries_[it->second].second = value;
    } else {
        index_[full] = entries_.size();
        entries_.emplace_back(full, value);
    }
}

std::string KeyValueFile::canonical() const {
    std::vector<std::string> lines;
    lines.reserve(entries_.size());
    for (const auto& [k, v] : entries_) lines.push_back(k + "=" + v);
    std::sort(lines.begin(), lines.end());
    std::string out;
    for (const auto& l : lines) {
        out += l;
        out += '\n';
    }
    return out;
}

std::string fnv1a_hex(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvWriter::add_row(const std::vector<double>& values) {
    rows_.push_back(values);
}

std::string CsvWriter::str() const {
    std::string out;
    for (std::size_t k = 0; k < columns_.size(); ++k) {
        out += columns_[k];
        out += (k + 1 < columns_.size()) ? ',' : '\n';
    }
    char buf[32];
    for (const auto& row : rows_) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", row[k]);
            out += buf;
            out += (k + 1 < row.size()) ? ',' : '\n';
        }
    }
    return out;
}

} // namespace multiblow
