#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace surprise::io {

/// Shortest text that reads back as the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

/// RFC 4180 writer: fields with commas, quotes or newlines are quoted.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
        for (const auto& h : header) cell(h);
        end_row();
    }

    CsvWriter& cell(std::string_view s) {
        if (count_++) out_ << ',';
        if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
            out_ << s;
            return *this;
        }
        out_ << '"';
        for (const char c : s) {
            if (c == '"') out_ << '"';
            out_ << c;
        }
        out_ << '"';
        return *this;
    }

    CsvWriter& cell(const std::string& s) { return cell(std::string_view(s)); }
    CsvWriter& cell(const char* s) { return cell(std::string_view(s)); }
    CsvWriter& cell(double v) { return cell(format_double(v)); }
    CsvWriter& cell(bool v) { return cell(v ? "true" : "false"); }

    template <typename T>
        requires std::is_integral_v<T> && (!std::is_same_v<T, bool>)
    CsvWriter& cell(T v) {
        return cell(std::to_string(v));
    }

    template <typename T>
    CsvWriter& cell(const std::optional<T>& v) {
        return v ? cell(*v) : cell(std::string_view{});
    }

    void end_row() {
        while (count_ < columns_) cell(std::string_view{});
        out_ << '\n';
        count_ = 0;
    }

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t count_ = 0;
};

/// Splits one CSV record (no embedded newlines) into fields.
inline std::vector<std::string> parse_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    return fields;
}

} // namespace surprise::io
