#include "core/csv_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "core/errors.hpp"

namespace imsprep {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(const std::string& cell, const std::string& context) {
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end || cell.empty()) {
        throw FormatError("non-numeric cell '" + cell + "' at " + context);
    }
    return value;
}

std::int64_t parse_int(const std::string& cell, const std::string& context) {
    std::int64_t value = 0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    const auto result = std::from_chars(begin, end, value);
    if (result.ec != std::errc() || result.ptr != end || cell.empty()) {
        throw FormatError("non-integer cell '" + cell + "' at " + context);
    }
    return value;
}

// Expects "key=value", returns value.
std::string header_field(const std::string& token, const std::string& key) {
    const std::string prefix = key + "=";
    if (token.rfind(prefix, 0) != 0) {
        throw FormatError("imsc header: expected '" + key + "=<value>', got '" + token + "'");
    }
    return token.substr(prefix.size());
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

Imsc read_imsc(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "': " + std::strerror(errno));
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw FormatError("'" + path + "': empty file");
    }
    const auto header = split(strip_cr(line), ',');
    if (header.size() != 5 || header[0] != "#imsc") {
        throw FormatError("'" + path + "': malformed imsc header");
    }
    AxisConfig axes;
    const auto rows = parse_int(header_field(header[1], "rows"), "header rows");
    const auto cols = parse_int(header_field(header[2], "cols"), "header cols");
    if (rows < 1 || cols < 1) {
        throw FormatError("'" + path + "': header declares empty matrix");
    }
    axes.num_rows = static_cast<std::size_t>(rows);
    axes.num_cols = static_cast<std::size_t>(cols);
    axes.retention_max = parse_double(header_field(header[3], "retention_max"), "header retention_max");
    axes.rim_max = parse_double(header_field(header[4], "rim_max"), "header rim_max");
    if (!(axes.retention_max > 0.0) || !(axes.rim_max > 0.0)) {
        throw FormatError("'" + path + "': axis maxima must be positive");
    }

    if (!std::getline(in, line)) {
        throw FormatError("'" + path + "': missing RIM axis line");
    }
    const auto rim_axis = split(strip_cr(line), ',');
    if (rim_axis.size() != axes.num_cols) {
        throw FormatError("'" + path + "': RIM axis line has " + std::to_string(rim_axis.size()) +
                          " entries, expected " + std::to_string(axes.num_cols));
    }

    std::vector<double> values;
    values.reserve(axes.num_rows * axes.num_cols);
    for (std::size_t r = 0; r < axes.num_rows; ++r) {
        if (!std::getline(in, line)) {
            throw FormatError("'" + path + "': missing data row " + std::to_string(r + 1));
        }
        const auto cells = split(strip_cr(line), ',');
        if (cells.size() != axes.num_cols + 1) {
            throw FormatError("'" + path + "': row " + std::to_string(r + 1) + " has " +
                              std::to_string(cells.size() ? cells.size() - 1 : 0) +
                              " value cells, expected " + std::to_string(axes.num_cols));
        }
        // cells[0] is the retention coordinate; informative, not stored
        parse_double(cells[0], "row " + std::to_string(r + 1) + " retention coordinate");
        for (std::size_t c = 0; c < axes.num_cols; ++c) {
            values.push_back(parse_double(cells[c + 1], "row " + std::to_string(r + 1) + ", col " +
                                                            std::to_string(c + 1)));
        }
    }
    return Imsc(axes, std::move(values));
}

void write_imsc(const Imsc& imsc, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "': " + std::strerror(errno));
    }
    const AxisConfig& axes = imsc.axes();
    out << "#imsc,rows=" << axes.num_rows << ",cols=" << axes.num_cols
        << ",retention_max=" << format_double(axes.retention_max)
        << ",rim_max=" << format_double(axes.rim_max) << "\n";
    for (std::size_t c = 0; c < axes.num_cols; ++c) {
        if (c) out << ',';
        out << format_double(axes.rim_at(c));
    }
    out << "\n";
    for (std::size_t r = 0; r < axes.num_rows; ++r) {
        out << format_double(axes.retention_at(r));
        for (std::size_t c = 0; c < axes.num_cols; ++c) {
            out << ',' << format_double(imsc(r, c));
        }
        out << "\n";
    }
    if (!out.flush()) {
        throw IoError("write failed for '" + path + "'");
    }
}

namespace {
const char* kPeakHeader = "measurement,peak_id,retention_s,rim_vs_cm2,label";
}

std::vector<PeakLocation> read_peaks(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "': " + std::strerror(errno));
    }
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != kPeakHeader) {
        throw FormatError("'" + path + "': expected peak header '" + std::string(kPeakHeader) + "'");
    }
    std::vector<PeakLocation> peaks;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        line = strip_cr(line);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (cells.size() != 5) {
            throw FormatError("'" + path + "': peak row " + std::to_string(row) + " has " +
                              std::to_string(cells.size()) + " columns, expected 5");
        }
        PeakLocation p;
        p.measurement = cells[0];
        p.peak_id = parse_int(cells[1], "peak row " + std::to_string(row) + " peak_id");
        p.retention = parse_double(cells[2], "peak row " + std::to_string(row) + " retention_s");
        p.rim = parse_double(cells[3], "peak row " + std::to_string(row) + " rim_vs_cm2");
        if (!cells[4].empty()) {
            p.truth_label = parse_int(cells[4], "peak row " + std::to_string(row) + " label");
        }
        if (p.retention < 0.0 || p.rim < 0.0) {
            throw FormatError("'" + path + "': peak row " + std::to_string(row) +
                              " has negative coordinates");
        }
        peaks.push_back(std::move(p));
    }
    return peaks;
}

void write_peaks(const std::vector<PeakLocation>& peaks, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write '" + path + "': " + std::strerror(errno));
    }
    out << kPeakHeader << "\n";
    for (const PeakLocation& p : peaks) {
        out << p.measurement << ',' << p.peak_id << ',' << format_double(p.retention) << ','
            << format_double(p.rim) << ',';
        if (p.truth_label) out << *p.truth_label;
        out << "\n";
    }
    if (!out.flush()) {
        throw IoError("write failed for '" + path + "'");
    }
}

}  // namespace imsprep
