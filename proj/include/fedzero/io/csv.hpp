#pragma once

/// @file csv.hpp
/// @brief Trace CSV files (`timestep,value`) and a small writer for metrics tables.

#include <fedzero/traces/trace_series.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

namespace fedzero::io {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw CsvError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

inline std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw CsvError("not an integer: '" + std::string(s) + "'");
    }
    return v;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Parses `timestep,value` rows. Timesteps must be evenly spaced; the spacing
/// becomes the native resolution. Values are multiplied by `scale`.
inline TraceSeries parse_trace_csv(std::istream& in, double scale = 1.0, const std::string& name = "trace") {
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    std::vector<Timestep> steps;
    std::vector<double> values;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        if (!header) {
            if (text != "timestep,value") throw CsvError(name + ": expected header 'timestep,value'");
            header = true;
            continue;
        }
        const auto comma = text.find(',');
        if (comma == std::string_view::npos) {
            throw CsvError(name + ":" + std::to_string(lineno) + ": expected two columns");
        }
        try {
            steps.push_back(parse_int(detail::trim(text.substr(0, comma))));
            values.push_back(parse_double(detail::trim(text.substr(comma + 1))) * scale);
        } catch (const CsvError& e) {
            throw CsvError(name + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!header) throw CsvError(name + ": empty file");
    if (steps.empty()) throw CsvError(name + ": no samples");
    Timestep resolution = 1;
    if (steps.size() > 1) resolution = steps[1] - steps[0];
    if (resolution < 1) throw CsvError(name + ": timesteps must increase");
    for (std::size_t i = 1; i < steps.size(); ++i) {
        if (steps[i] - steps[i - 1] != resolution) throw CsvError(name + ": timesteps must be evenly spaced");
    }
    try {
        return TraceSeries(steps.front(), std::move(values), resolution);
    } catch (const std::invalid_argument& e) {
        throw CsvError(name + ": " + e.what());
    }
}

inline TraceSeries read_trace_csv(const std::filesystem::path& path, double scale = 1.0) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    return parse_trace_csv(in, scale, path.string());
}

/// Writes one row per stored sample; values are divided by `scale`.
inline void write_trace_csv(std::ostream& out, const TraceSeries& series, double scale = 1.0) {
    out << "timestep,value\n";
    const auto& v = series.samples();
    for (std::size_t i = 0; i < v.size(); ++i) {
        out << series.start() + static_cast<Timestep>(i) * series.native_resolution() << ','
            << format_double(v[i] / scale) << '\n';
    }
}

inline void write_trace_csv(const std::filesystem::path& path, const TraceSeries& series, double scale = 1.0) {
    std::ofstream out(path);
    if (!out) throw CsvError("cannot write " + path.string());
    write_trace_csv(out, series, scale);
}

/// Comma-separated table writer with deterministic number formatting.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header)
        : out_(out)
        , columns_(header.size()) {
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << '\n';
    }

    template <typename... Fields>
    void row(const Fields&... fields) {
        if (sizeof...(Fields) != columns_) throw CsvError("row width does not match header");
        std::size_t i = 0;
        ((out_ << (i++ ? "," : "") << cell(fields)), ...);
        out_ << '\n';
    }

    template <typename T>
    static std::string cell(const T& v) {
        if constexpr (std::is_same_v<T, bool>) {
            return v ? "1" : "0";
        } else if constexpr (std::is_floating_point_v<T>) {
            return format_double(static_cast<double>(v));
        } else if constexpr (std::is_integral_v<T>) {
            return std::to_string(v);
        } else {
            return std::string(v);
        }
    }

private:
    std::ostream& out_;
    std::size_t columns_;
};

/// Rows of a CSV file with a header; no quoting support.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw CsvError("missing column '" + std::string(name) + "'");
    }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        std::vector<std::string> cells;
        const auto text = detail::trim(line);
        std::size_t from = 0;
        while (true) {
            const auto comma = text.find(',', from);
            cells.emplace_back(text.substr(from, comma == std::string_view::npos ? comma : comma - from));
            if (comma == std::string_view::npos) break;
            from = comma + 1;
        }
        if (first) {
            t.header = std::move(cells);
            first = false;
        } else {
            if (cells.size() != t.header.size()) throw CsvError(path.string() + ": ragged row");
            t.rows.push_back(std::move(cells));
        }
    }
    if (first) throw CsvError(path.string() + ": empty file");
    return t;
}

} // namespace fedzero::io
