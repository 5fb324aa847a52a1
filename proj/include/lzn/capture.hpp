#pragma once

// Complex baseband capture buffer plus its on-disk format: raw interleaved
// little-endian float32 (I,Q) pairs with a JSON metadata sidecar.

#include <complex>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lzn/params.hpp"

namespace lzn {

struct IqCapture {
    std::vector<std::complex<double>> samples; ///< raw-rate baseband
    unsigned oversampling = 1;                 ///< raw rate = oversampling * B
    std::int64_t origin_offset = 0;            ///< scene-time index of samples[0] (raw units)

    std::size_t raw_size() const { return samples.size(); }
    /// Capture length in Nyquist-rate samples (floor).
    std::int64_t nyquist_size() const {
        return static_cast<std::int64_t>(samples.size() / oversampling);
    }
};

struct CaptureMeta {
    double sample_rate_hz = 0.0;
    double bandwidth_hz = 0.0;
    unsigned sf = 0;
    unsigned oversampling = 1;
};

inline void save_capture(const std::string& path, const IqCapture& cap,
                         const LoRaParams& params) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    static_assert(sizeof(std::complex<float>) == 8);
    std::vector<std::complex<float>> quantized(cap.samples.size());
    for (std::size_t i = 0; i < cap.samples.size(); ++i)
        quantized[i] = std::complex<float>(float(cap.samples[i].real()),
                                           float(cap.samples[i].imag()));
    f.write(reinterpret_cast<const char*>(quantized.data()),
            static_cast<std::streamsize>(quantized.size() * sizeof(std::complex<float>)));
    if (!f) throw std::runtime_error("short write to " + path);

    nlohmann::json meta{{"sample_rate_hz", params.bandwidth_hz * cap.oversampling},
                        {"bandwidth_hz", params.bandwidth_hz},
                        {"sf", params.sf},
                        {"oversampling", cap.oversampling}};
    std::ofstream mf(path + ".meta.json");
    if (!mf) throw std::runtime_error("cannot write capture metadata");
    mf << meta.dump(2) << "\n";
}

inline IqCapture load_capture(const std::string& path, CaptureMeta* meta_out = nullptr) {
    std::ifstream mf(path + ".meta.json");
    if (!mf) throw std::runtime_error("missing metadata sidecar for " + path);
    nlohmann::json meta = nlohmann::json::parse(mf);

    IqCapture cap;
    cap.oversampling = meta.at("oversampling").get<unsigned>();
    if (meta_out) {
        meta_out->sample_rate_hz = meta.at("sample_rate_hz").get<double>();
        meta_out->bandwidth_hz = meta.at("bandwidth_hz").get<double>();
        meta_out->sf = meta.at("sf").get<unsigned>();
        meta_out->oversampling = cap.oversampling;
    }

    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(f.tellg());
    f.seekg(0);
    if (bytes % sizeof(std::complex<float>) != 0)
        throw std::runtime_error("capture size is not a whole number of IQ pairs");
    std::vector<std::complex<float>> raw(bytes / sizeof(std::complex<float>));
    f.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
    if (!f) throw std::runtime_error("short read from " + path);
    cap.samples.assign(raw.begin(), raw.end());
    return cap;
}

} // namespace lzn
