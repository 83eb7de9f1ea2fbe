/**
 * Text formats: numeric CSV (header line, comma separated, '\n' endings, no
 * quoting, values printed with 17 significant digits) and flat
 * `key = value` blocks used for reports, config files and manifests.
 */
#ifndef STABSIM_IO_HPP
#define STABSIM_IO_HPP

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace stabsim::io {

inline std::string format_csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Shortest decimal that parses back to the same double.
inline std::string format_shortest(double v) {
    char buf[40];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline void write_csv(std::ostream& os, std::span<const std::string> header,
                      std::span<const std::span<const double>> columns) {
    if (header.size() != columns.size()) throw ShapeError("write_csv: header and column counts differ");
    for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
    os << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& col : columns)
        if (col.size() != rows) throw ShapeError("write_csv: columns differ in length");
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << format_csv_number(columns[c][r]);
        os << '\n';
    }
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline double parse_double(std::string_view s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        throw DomainError("not a number: '" + std::string(s) + "'");
    return v;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline CsvTable read_csv(std::istream& is) {
    CsvTable t;
    std::string line;
    if (!std::getline(is, line)) throw DomainError("read_csv: missing header");
    for (auto f : split(line, ',')) t.header.emplace_back(f);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != t.header.size()) throw ShapeError("read_csv: ragged row");
        auto& row = t.rows.emplace_back();
        for (auto f : fields) row.push_back(parse_double(f));
    }
    return t;
}

/// Ordered `key = value` pairs.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Blank lines and lines starting with '#' are skipped.
inline KeyValues parse_key_values(std::istream& is) {
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string_view::npos)
            throw DomainError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = trim(t.substr(0, eq));
        if (key.empty()) throw DomainError("line " + std::to_string(lineno) + ": empty key");
        kv.emplace_back(std::string(key), std::string(trim(t.substr(eq + 1))));
    }
    return kv;
}

inline void write_key_values(std::ostream& os, const KeyValues& kv) {
    for (const auto& [k, v] : kv) os << k << " = " << v << '\n';
}

inline const std::string* find_value(const KeyValues& kv, std::string_view key) {
    for (const auto& [k, v] : kv)
        if (k == key) return &v;
    return nullptr;
}

} // namespace stabsim::io

#endif // STABSIM_IO_HPP
