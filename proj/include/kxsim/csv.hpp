#pragma once

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kxsim/error.hpp"

namespace kxsim::csv {

/// RFC 4180 field quoting: only fields containing a comma, quote or line break are quoted.
inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline void write_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t k = 0; k < fields.size(); ++k) {
        if (k) os << ',';
        os << quote(fields[k]);
    }
    os << "\r\n";
}

/// Parsed table: header plus rows, all fields as text.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ConfigError("missing column \"" + std::string(name) + "\"");
        return static_cast<std::size_t>(it - header.begin());
    }

    bool has_column(std::string_view name) const {
        return std::find(header.begin(), header.end(), name) != header.end();
    }

    /// Throws naming expected vs found columns unless every name in `expected` is present.
    void require_columns(const std::vector<std::string>& expected, std::string_view what) const {
        for (const auto& name : expected) {
            if (has_column(name)) continue;
            std::string msg = std::string(what) + ": expected columns [";
            for (std::size_t k = 0; k < expected.size(); ++k) msg += (k ? "," : "") + expected[k];
            msg += "], found [";
            for (std::size_t k = 0; k < header.size(); ++k) msg += (k ? "," : "") + header[k];
            throw ConfigError(msg + "]");
        }
    }
};

inline Table parse(std::istream& is) {
    Table table;
    std::vector<std::string> row;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    char c;
    auto end_row = [&] {
        row.push_back(std::move(field));
        field.clear();
        if (table.header.empty())
            table.header = std::move(row);
        else
            table.rows.push_back(std::move(row));
        row.clear();
        any = false;
    };
    while (is.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (is.peek() == '"') {
                    is.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        any = true;
        if (c == '"') {
            in_quotes = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (c == '\r') {
            if (is.peek() == '\n') is.get(c);
            end_row();
        } else if (c == '\n') {
            end_row();
        } else {
            field += c;
        }
    }
    if (in_quotes) throw ConfigError("csv: unterminated quoted field");
    if (any) end_row();
    return table;
}

inline Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + path);
    return parse(in);
}

}  // namespace kxsim::csv
