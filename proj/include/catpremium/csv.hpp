#pragma once

// Minimal comma-separated-values support: RFC 4180 style quoting on a single
// physical line, header lookup by name, and shortest round-trip number
// formatting so written files re-parse to identical doubles.

#include "catpremium/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <vector>

namespace catpremium::csv {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r' || s.front() == '\n'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

/// Splits one line into fields. Quoted fields may contain commas and doubled quotes.
inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else if (ch != '\r' && ch != '\n') {
            field.push_back(ch);
        }
    }
    out.push_back(std::move(field));
    return out;
}

inline std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<long long> parse_int(std::string_view s) {
    s = trim(s);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

/// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out += '"';
    return out;
}

/// Streaming reader. The first non-empty line is the header.
class Reader {
public:
    explicit Reader(const std::string& path) : path_(path), in_(path) {
        require(in_.good(), ErrorKind::io, "cannot open file: " + path);
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!trim(line).empty()) {
                header_ = split_line(line);
                for (auto& h : header_) h = std::string(trim(h));
                // strip a UTF-8 byte-order mark from the first column name
                if (!header_.empty() && header_[0].rfind("\xEF\xBB\xBF", 0) == 0) header_[0].erase(0, 3);
                for (std::size_t i = 0; i < header_.size(); ++i) index_.emplace(header_[i], i);
                has_header_ = true;
                break;
            }
        }
    }

    bool has_header() const { return has_header_; }
    const std::vector<std::string>& header() const { return header_; }
    const std::string& path() const { return path_; }

    std::optional<std::size_t> column(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t require_column(const std::string& name) const {
        auto c = column(name);
        require(c.has_value(), ErrorKind::data, "missing required column '" + name + "' in " + path_);
        return *c;
    }

    /// Reads the next non-empty record; returns false at end of file.
    bool next(std::vector<std::string>& fields) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (trim(line).empty()) continue;
            fields = split_line(line);
            return true;
        }
        return false;
    }

    std::size_t line_number() const { return line_no_; }

private:
    std::string path_;
    std::ifstream in_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t line_no_ = 0;
    bool has_header_ = false;
};

/// Field i, or an empty string for short rows. The reference stays valid
/// while `fields` does.
inline const std::string& field_or_empty(const std::vector<std::string>& fields, std::size_t i) {
    static const std::string empty;
    return i < fields.size() ? fields[i] : empty;
}

/// Writes rows to a string; callers decide where the bytes go.
class Writer {
public:
    explicit Writer(const std::vector<std::string>& header) { row(header); }

    Writer& row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << quote_if_needed(fields[i]);
        }
        out_ << '\n';
        return *this;
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorKind::io, "cannot write file: " + path);
    out << contents;
    require(out.good(), ErrorKind::io, "write failed: " + path);
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorKind::io, "cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace catpremium::csv
