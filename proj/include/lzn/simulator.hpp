#pragma once

// Scene generation: places modulated frames with fractional delay, CFO and
// per-frame amplitude into a complex-Gaussian noise floor of unit variance
// per complex sample.  With that convention SNR_dB = 20·log10(amplitude).
// Everything is reproducible from the scene seed; each frame and the noise
// use independent derived streams.

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "lzn/capture.hpp"
#include "lzn/codec.hpp"
#include "lzn/modem.hpp"
#include "lzn/params.hpp"
#include "lzn/rng.hpp"

namespace lzn::sim {

struct FrameSpec {
    double start = 0.0;     ///< Nyquist samples, fractional allowed
    double cfo_hz = 0.0;
    double amplitude = 1.0; ///< 10^(SNR_dB/20) against unit noise
    double phase = std::nan(""); ///< initial phase; NaN = draw from the scene seed
    phy::FramePayload payload;
};

struct TrafficScene {
    std::vector<FrameSpec> frames;
    std::int64_t duration_samples = 0; ///< Nyquist samples
    double noise_power = 1.0;          ///< per complex sample
    std::uint64_t seed = 1;
};

struct TruthFrame {
    double start = 0.0;   ///< realized start (after oversampled placement)
    double cfo_hz = 0.0;
    double snr_db = 0.0;
    std::vector<std::uint8_t> payload;
    phy::CodingRate coding_rate = phy::CodingRate::cr48;
    bool has_crc = true;
    unsigned n_payload_symbols = 0;
};

struct GroundTruth {
    std::vector<TruthFrame> frames;
};

/// Frame length in Nyquist samples (header + payload).
inline double frame_length_samples(const phy::FramePayload& payload, const LoRaParams& params) {
    const unsigned n_payload = phy::payload_symbol_count(
        payload.bytes.size(), payload.coding_rate, payload.has_crc, params.sf);
    return (params.header_symbols() + n_payload) * params.symbol_bins();
}

struct RenderedScene {
    IqCapture capture;
    GroundTruth truth;
};

inline RenderedScene render_scene(const TrafficScene& scene, const LoRaParams& params) {
    params.validate();
    const unsigned os = params.oversampling;
    const std::size_t raw_len = std::size_t(scene.duration_samples) * os;

    RenderedScene out;
    out.capture.oversampling = os;
    out.capture.origin_offset = 0;
    out.capture.samples.assign(raw_len, cplx{0.0, 0.0});

    std::size_t idx = 0;
    for (const FrameSpec& spec : scene.frames) {
        if (!(spec.amplitude > 0.0)) throw std::domain_error("frame amplitude must be > 0");
        if (std::abs(spec.cfo_hz) > params.max_cfo_hz)
            throw std::domain_error("frame CFO exceeds max_cfo_hz");
        const std::vector<unsigned> symbols = phy::encode(spec.payload, params);
        auto rng = make_rng(scene.seed, idx, 0x66726d); // per-frame stream
        double phase0 = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
        if (!std::isnan(spec.phase)) phase0 = spec.phase;
        const std::vector<cplx> wave =
            phy::modulate_frame(symbols, params, spec.cfo_hz, spec.amplitude, phase0);

        const std::int64_t raw0 = std::llround(spec.start * os);
        if (spec.start < 0.0 || raw0 + std::int64_t(wave.size()) > std::int64_t(raw_len))
            throw std::domain_error("frame does not fit inside the scene duration");
        for (std::size_t q = 0; q < wave.size(); ++q) {
            auto& dst = out.capture.samples[std::size_t(raw0) + q];
            dst += wave[q];
        }

        TruthFrame tf;
        tf.start = double(raw0) / os;
        tf.cfo_hz = spec.cfo_hz;
        tf.snr_db = 20.0 * std::log10(spec.amplitude);
        tf.payload = spec.payload.bytes;
        tf.coding_rate = spec.payload.coding_rate;
        tf.has_crc = spec.payload.has_crc;
        tf.n_payload_symbols = static_cast<unsigned>(symbols.size());
        out.truth.frames.push_back(std::move(tf));
        ++idx;
    }

    if (scene.noise_power > 0.0) {
        auto rng = make_rng(scene.seed, 0, 0x6e6f6973); // noise stream
        std::normal_distribution<double> gauss(0.0, std::sqrt(scene.noise_power / 2.0));
        for (auto& s : out.capture.samples)
            s += cplx{gauss(rng), gauss(rng)};
    }
    return out;
}

/// Per-frame SNR draw for traffic generation.
struct SnrDistribution {
    double lo_db = 0.0;
    double hi_db = 0.0; ///< equal to lo_db for a fixed SNR
    double sample(std::mt19937_64& rng) const {
        if (hi_db <= lo_db) return lo_db;
        return std::uniform_real_distribution<double>(lo_db, hi_db)(rng);
    }
};

/// Homogeneous Poisson arrivals over the scene duration; every frame fits
/// fully inside it.  CFO uniform in ±cfo_range_hz, fractional start uniform.
inline TrafficScene poisson_traffic(double rate_pkt_s, double duration_s,
                                    const LoRaParams& params,
                                    const phy::FramePayload& payload_proto,
                                    const SnrDistribution& snr, std::uint64_t seed,
                                    double cfo_range_hz = 4880.0,
                                    bool randomize_payload = true) {
    if (rate_pkt_s < 0.0) throw std::domain_error("rate must be >= 0");
    TrafficScene scene;
    scene.seed = seed;
    scene.duration_samples =
        std::llround(duration_s * params.bandwidth_hz);

    const double frame_len = frame_length_samples(payload_proto, params);
    const double usable = double(scene.duration_samples) - frame_len - 2.0;
    if (usable <= 0.0) throw std::domain_error("duration too short for one frame");

    auto rng = make_rng(seed, 0, 0x74726166); // traffic stream
    const double mean = rate_pkt_s * duration_s;
    const std::size_t count = std::poisson_distribution<long>(mean)(rng);
    std::uniform_real_distribution<double> ustart(0.0, usable);
    std::uniform_real_distribution<double> ucfo(-cfo_range_hz, cfo_range_hz);
    for (std::size_t i = 0; i < count; ++i) {
        FrameSpec f;
        f.start = ustart(rng);
        f.cfo_hz = ucfo(rng);
        f.amplitude = std::pow(10.0, snr.sample(rng) / 20.0);
        f.payload = payload_proto;
        if (randomize_payload) {
            std::uniform_int_distribution<int> byte(0, 255);
            for (auto& b : f.payload.bytes) b = static_cast<std::uint8_t>(byte(rng));
        }
        scene.frames.push_back(f);
    }
    std::sort(scene.frames.begin(), scene.frames.end(),
              [](const FrameSpec& a, const FrameSpec& b) { return a.start < b.start; });
    return scene;
}

} // namespace lzn::sim
