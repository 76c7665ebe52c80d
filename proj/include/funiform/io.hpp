#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "funiform/error.hpp"
#include "funiform/inference.hpp"

namespace funiform {

/// Fixed 15-significant-digit rendering used for every CSV number, so that
/// reruns are byte-identical.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return std::string(buf);
}

/// Minimal CSV emitter: one header, rows of numbers or strings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw input_error("cannot open output file '" + path + "'");
        columns_ = header.size();
        for (std::size_t i = 0; i < header.size(); ++i)
            out_ << header[i] << (i + 1 < header.size() ? "," : "\n");
    }

    void row(const std::vector<double>& values) {
        if (values.size() != columns_) throw input_error("csv row width mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << format_double(values[i]) << (i + 1 < values.size() ? "," : "\n");
    }

    void row_mixed(const std::vector<std::string>& values) {
        if (values.size() != columns_) throw input_error("csv row width mismatch");
        for (std::size_t i = 0; i < values.size(); ++i)
            out_ << values[i] << (i + 1 < values.size() ? "," : "\n");
    }

private:
    std::ofstream out_;
    std::size_t columns_ = 0;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace detail

/// Reads a dataset CSV: header `x,y` (normal rows) or `x,n,s` (binomial).
inline Dataset read_dataset_csv(const std::string& path, LikKind* kind_out = nullptr) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open data file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw input_error("data file '" + path + "' is empty");
    const std::vector<std::string> header = detail::split_csv_line(line);
    LikKind kind;
    if (header.size() == 2 && header[0] == "x" && header[1] == "y")
        kind = LikKind::normal;
    else if (header.size() == 3 && header[0] == "x" && header[1] == "n" && header[2] == "s")
        kind = LikKind::binomial;
    else
        throw input_error("data file header must be 'x,y' or 'x,n,s'");
    Dataset data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> f = detail::split_csv_line(line);
        try {
            if (kind == LikKind::normal) {
                if (f.size() != 2) throw input_error("expected 2 fields");
                data.rows.push_back(make_normal_row(std::stod(f[0]), std::stod(f[1])));
            } else {
                if (f.size() != 3) throw input_error("expected 3 fields");
                data.rows.push_back(
                    make_binomial_row(std::stod(f[0]), std::stoi(f[1]), std::stoi(f[2])));
            }
        } catch (const std::exception& e) {
            throw input_error("data file '" + path + "' line " + std::to_string(line_no) + ": " +
                              e.what());
        }
    }
    if (kind_out) *kind_out = kind;
    return data;
}

/// FNV-1a checksum of a file's bytes, as a fixed-width hex string.
inline std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file for checksum: '" + path + "'");
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(hex);
}

/// Record of one CLI invocation: inputs, outputs with checksums, timing.
/// Re-running the recorded command line reproduces every output byte for
/// byte (checksums included here make that verifiable).
struct RunManifest {
    std::string command_line;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, checksum
    std::vector<std::pair<std::string, std::string>> outputs; // path, checksum
    double duration_seconds = 0.0;
};

inline void write_manifest(const RunManifest& m, const std::string& path) {
    nlohmann::json j;
    j["command_line"] = m.command_line;
    j["seed"] = m.seed;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [p, c] : m.inputs) j["inputs"].push_back({{"path", p}, {"checksum", c}});
    j["outputs"] = nlohmann::json::array();
    for (const auto& [p, c] : m.outputs) j["outputs"].push_back({{"path", p}, {"checksum", c}});
    j["duration_seconds"] = m.duration_seconds;
    std::ofstream out(path);
    if (!out) throw input_error("cannot open manifest path '" + path + "'");
    out << j.dump(2) << "\n";
}

/// Wall-clock stopwatch for manifests.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace funiform
