#pragma once

// File interchange: ground truth and detections as JSON lines, metrics and
// sweep tables as CSV.  Output files are written to a temp path and renamed
// into place so partial writes never appear.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lzn/detector.hpp"
#include "lzn/simulator.hpp"

namespace lzn::io {

inline std::string to_hex(const std::vector<std::uint8_t>& bytes) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(2 * bytes.size());
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xF]);
    }
    return s;
}

inline std::vector<std::uint8_t> from_hex(const std::string& s) {
    if (s.size() % 2) throw std::invalid_argument("odd hex string");
    auto nib = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return unsigned(c - '0');
        if (c >= 'a' && c <= 'f') return unsigned(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return unsigned(c - 'A' + 10);
        throw std::invalid_argument("bad hex digit");
    };
    std::vector<std::uint8_t> out(s.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint8_t>((nib(s[2 * i]) << 4) | nib(s[2 * i + 1]));
    return out;
}

/// Writes content to path atomically (temp file + rename).
inline void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + tmp);
        f << content;
        if (!f) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline void save_truth(const std::string& path, const sim::GroundTruth& truth) {
    std::ostringstream out;
    for (const auto& f : truth.frames) {
        nlohmann::json j{{"start", f.start},
                         {"cfo_hz", f.cfo_hz},
                         {"snr_db", f.snr_db},
                         {"payload_hex", to_hex(f.payload)},
                         {"cr", static_cast<unsigned>(f.coding_rate)},
                         {"has_crc", f.has_crc},
                         {"n_payload_symbols", f.n_payload_symbols}};
        out << j.dump() << "\n";
    }
    write_atomic(path, out.str());
}

inline sim::GroundTruth load_truth(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    sim::GroundTruth truth;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        sim::TruthFrame tf;
        tf.start = j.at("start").get<double>();
        tf.cfo_hz = j.at("cfo_hz").get<double>();
        tf.snr_db = j.at("snr_db").get<double>();
        tf.payload = from_hex(j.at("payload_hex").get<std::string>());
        tf.coding_rate = static_cast<phy::CodingRate>(j.at("cr").get<unsigned>());
        tf.has_crc = j.at("has_crc").get<bool>();
        tf.n_payload_symbols = j.at("n_payload_symbols").get<unsigned>();
        truth.frames.push_back(std::move(tf));
    }
    return truth;
}

inline void save_hypotheses(const std::string& path, const std::vector<Hypothesis>& hyps) {
    std::ostringstream out;
    for (const auto& h : hyps) {
        nlohmann::json j{{"start", h.start_estimate},
                         {"cfo_bins", h.cfo_estimate},
                         {"score", h.score}};
        out << j.dump() << "\n";
    }
    write_atomic(path, out.str());
}

inline void save_detections(const std::string& path, const std::vector<SyncResult>& results) {
    std::ostringstream out;
    for (const auto& r : results) {
        nlohmann::json j{{"start_samples", r.start},
                         {"cfo_bins", r.cfo_bins},
                         {"validated", r.validated},
                         {"score", r.score}};
        out << j.dump() << "\n";
    }
    write_atomic(path, out.str());
}

inline std::vector<SyncResult> load_detections(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::vector<SyncResult> out;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line);
        SyncResult r;
        r.start = j.at("start_samples").get<double>();
        r.cfo_bins = j.at("cfo_bins").get<double>();
        r.validated = j.at("validated").get<bool>();
        r.score = j.at("score").get<double>();
        out.push_back(r);
    }
    return out;
}

/// Simple CSV assembly; header first, then one row per call.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& values) {
        if (values.size() != header_.size())
            throw std::invalid_argument("CSV row width mismatch");
        rows_.push_back(values);
    }

    std::string str() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < header_.size(); ++i)
            out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
        out.setf(std::ios::fixed);
        out.precision(6);
        for (const auto& row : rows_) {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << row[i] << (i + 1 < row.size() ? "," : "\n");
        }
        return out.str();
    }

    void save(const std::string& path) const { write_atomic(path, str()); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

} // namespace lzn::io
