#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "qtm/protocol.hpp"
#include "qtm/pulse.hpp"

namespace qtm {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip decimal representation of a double.
inline std::string format_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// 17 significant digits, always round-trip exact.
inline std::string format_double_17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

/// step,delay_s,compensation_rad,outcome,p0,...,p{d-1}
inline void write_records_csv(const std::string& path,
                              const std::vector<MeasurementRecord>& records, int d) {
    auto out = open_output(path);
    out << "step,delay_s,compensation_rad,outcome";
    for (int j = 0; j < d; ++j) out << ",p" << j;
    out << "\n";
    for (const auto& r : records) {
        out << r.step << ',' << format_double(r.delay) << ','
            << format_double(r.compensation) << ',' << r.outcome;
        for (double p : r.probabilities) out << ',' << format_double(p);
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

/// t_s,v_volts with fixed-point time and 17-significant-digit voltage.
inline void write_waveform_csv(const std::string& path, const Waveform& w) {
    auto out = open_output(path);
    out << "t_s,v_volts\n";
    char tbuf[48];
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        std::snprintf(tbuf, sizeof(tbuf), "%.15f", w.time(i));
        out << tbuf << ',' << format_double_17(w.samples[i]) << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

/// re,im pairs per row: re0,im0,re1,im1,re2,im2.
inline void write_unitary_csv(const std::string& path, const UnitaryMatrix& u) {
    auto out = open_output(path);
    for (int r = 0; r < u.dim(); ++r) {
        for (int c = 0; c < u.dim(); ++c) {
            if (c) out << ',';
            out << format_double_17(u(r, c).real()) << ',' << format_double_17(u(r, c).imag());
        }
        out << "\n";
    }
    if (!out) throw IoError("write failed: " + path);
}

struct WaveformFile {
    std::vector<double> times;
    std::vector<double> values;
};

inline WaveformFile read_waveform_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open waveform file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "t_s,v_volts")
        throw IoError(path + ": missing t_s,v_volts header");
    WaveformFile f;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError(path + ": malformed row: " + line);
        f.times.push_back(std::stod(line.substr(0, comma)));
        f.values.push_back(std::stod(line.substr(comma + 1)));
    }
    return f;
}

} // namespace qtm
