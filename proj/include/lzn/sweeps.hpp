#pragma once

// Experiment orchestration: SNR sensitivity, Poisson traffic rate and
// two-user collision-offset sweeps.  Trials are independent scenes with RNG
// streams derived from (seed, axis point, trial), parallelized across
// workers; per-point results carry Wilson 95% intervals.

#include <atomic>
#include <cmath>
#include <vector>

#include "lzn/detector.hpp"
#include "lzn/io.hpp"
#include "lzn/metrics.hpp"
#include "lzn/parallel.hpp"
#include "lzn/simulator.hpp"

namespace lzn::sim {

struct SweepResult {
    double axis = 0.0;
    Interval detection;
    Interval decode;
};

struct SnrSweepConfig {
    std::vector<double> snr_db;
    unsigned trials = 300;
    std::size_t payload_len = 12;
    phy::CodingRate cr = phy::CodingRate::cr48;
    std::uint64_t seed = 1;
};

namespace detail {

inline std::pair<bool, bool> run_single_frame_trial(const LoRaParams& params,
                                                    const GridConfig& grid, double snr_db,
                                                    std::size_t payload_len,
                                                    phy::CodingRate cr,
                                                    std::uint64_t seed) {
    auto rng = make_rng(seed, 0, 0x736e72);
    phy::FramePayload payload;
    payload.coding_rate = cr;
    payload.bytes.resize(payload_len);
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : payload.bytes) b = static_cast<std::uint8_t>(byte(rng));

    const unsigned m = params.symbol_bins();
    TrafficScene scene;
    scene.seed = mix64(seed);
    FrameSpec f;
    f.start = 2.0 * m + std::uniform_real_distribution<double>(0.0, 1.0)(rng) * m;
    f.cfo_hz = std::uniform_real_distribution<double>(-4880.0, 4880.0)(rng);
    f.amplitude = std::pow(10.0, snr_db / 20.0);
    f.payload = payload;
    scene.frames.push_back(f);
    scene.duration_samples =
        std::llround(f.start + frame_length_samples(payload, params)) + 4 * m;

    RenderedScene rendered = render_scene(scene, params);
    FrameDetector detector(params, grid);
    const std::vector<SyncResult> results = detector.detect(rendered.capture);
    Metrics mt = evaluate_scene(detector.engine(), rendered.capture, rendered.truth,
                                results, params);
    return {mt.matched == 1, mt.decoded == 1};
}

} // namespace detail

/// Detection and decode probability versus SNR, one frame per scene.
inline std::vector<SweepResult> snr_sweep(const LoRaParams& params, const GridConfig& grid,
                                          const SnrSweepConfig& cfg) {
    std::vector<SweepResult> out(cfg.snr_db.size());
    for (std::size_t p = 0; p < cfg.snr_db.size(); ++p) {
        std::atomic<unsigned> detected{0}, decoded{0};
        parallel_for(cfg.trials, [&](std::size_t t) {
            const auto [det, dec] = detail::run_single_frame_trial(
                params, grid, cfg.snr_db[p], cfg.payload_len, cfg.cr,
                mix64(cfg.seed + 0x1000 * p) + t);
            if (det) ++detected;
            if (dec) ++decoded;
        });
        out[p].axis = cfg.snr_db[p];
        out[p].detection = wilson(detected, cfg.trials);
        out[p].decode = wilson(decoded, cfg.trials);
    }
    return out;
}

struct RateSweepConfig {
    std::vector<double> rate_pkt_s;
    double duration_s = 2.0;
    unsigned trials = 10; ///< independent scenes per rate
    std::size_t payload_len = 12;
    phy::CodingRate cr = phy::CodingRate::cr48;
    SnrDistribution snr{0.0, 10.0};
    std::uint64_t seed = 1;
};

/// Frame-detection and packet-reception ratio versus Poisson traffic rate.
inline std::vector<SweepResult> rate_sweep(const LoRaParams& params, const GridConfig& grid,
                                           const RateSweepConfig& cfg) {
    std::vector<SweepResult> out(cfg.rate_pkt_s.size());
    phy::FramePayload proto;
    proto.coding_rate = cfg.cr;
    proto.bytes.resize(cfg.payload_len);

    for (std::size_t p = 0; p < cfg.rate_pkt_s.size(); ++p) {
        std::atomic<std::size_t> truth_total{0}, matched{0}, decoded{0};
        parallel_for(cfg.trials, [&](std::size_t t) {
            const std::uint64_t s = mix64(cfg.seed + 0x2000 * p) + t;
            TrafficScene scene =
                poisson_traffic(cfg.rate_pkt_s[p], cfg.duration_s, params, proto, cfg.snr, s);
            RenderedScene rendered = render_scene(scene, params);
            FrameDetector detector(params, grid);
            const std::vector<SyncResult> results = detector.detect(rendered.capture);
            Metrics mt = evaluate_scene(detector.engine(), rendered.capture, rendered.truth,
                                        results, params);
            truth_total += mt.truth_count;
            matched += mt.matched;
            decoded += mt.decoded;
        });
        out[p].axis = cfg.rate_pkt_s[p];
        out[p].detection = wilson(matched, truth_total);
        out[p].decode = wilson(decoded, truth_total);
    }
    return out;
}

struct OffsetSweepConfig {
    std::vector<double> offsets_symbols;
    unsigned trials = 200;
    std::size_t payload_len = 12;
    phy::CodingRate cr = phy::CodingRate::cr48;
    SnrDistribution snr{0.0, 10.0};
    double cfo_range_hz = 4880.0;
    std::uint64_t seed = 1;
};

/// Two-user sweep: frame-detection ratio over both colliding frames versus
/// the interferer's arrival offset.  Positive offsets mean the interferer
/// arrives after the target.  Near zero offset the two frames merge into one
/// hypothesis and at most one of the two can be matched, which is what pulls
/// the ratio toward one half there.
inline std::vector<SweepResult> offset_sweep(const LoRaParams& params, const GridConfig& grid,
                                             const OffsetSweepConfig& cfg) {
    std::vector<SweepResult> out(cfg.offsets_symbols.size());
    const unsigned m = params.symbol_bins();

    for (std::size_t p = 0; p < cfg.offsets_symbols.size(); ++p) {
        std::atomic<unsigned> detected{0}, decoded{0};
        parallel_for(cfg.trials, [&](std::size_t t) {
            const std::uint64_t s = mix64(cfg.seed + 0x3000 * p) + t;
            auto rng = make_rng(s, 0, 0x6f6673);
            std::uniform_int_distribution<int> byte(0, 255);
            std::uniform_real_distribution<double> ufrac(0.0, 1.0);
            std::uniform_real_distribution<double> ucfo(-cfg.cfo_range_hz, cfg.cfo_range_hz);

            auto make_payload = [&] {
                phy::FramePayload pl;
                pl.coding_rate = cfg.cr;
                pl.bytes.resize(cfg.payload_len);
                for (auto& b : pl.bytes) b = static_cast<std::uint8_t>(byte(rng));
                return pl;
            };

            const double offset = cfg.offsets_symbols[p] * m;
            const double margin = 2.0 * m;
            FrameSpec target;
            target.payload = make_payload();
            target.start = margin + std::max(0.0, -offset) + ufrac(rng);
            target.cfo_hz = ucfo(rng);
            target.amplitude = std::pow(10.0, cfg.snr.sample(rng) / 20.0);

            FrameSpec interferer;
            interferer.payload = make_payload();
            interferer.start = target.start + offset;
            interferer.cfo_hz = ucfo(rng);
            interferer.amplitude = std::pow(10.0, cfg.snr.sample(rng) / 20.0);

            const double flen = frame_length_samples(target.payload, params);
            TrafficScene scene;
            scene.seed = mix64(s);
            scene.frames = {target, interferer};
            scene.duration_samples =
                std::llround(std::max(target.start, interferer.start) + flen + margin);

            RenderedScene rendered = render_scene(scene, params);
            FrameDetector detector(params, grid);
            const std::vector<SyncResult> results = detector.detect(rendered.capture);

            // one-to-one matching over both frames with a quarter-symbol
            // tolerance, so a single merged detection can only account for
            // one of the two
            Metrics mt = evaluate_scene(detector.engine(), rendered.capture, rendered.truth,
                                        results, params, m / 4.0);
            detected += unsigned(mt.matched);
            decoded += unsigned(mt.decoded);
        });
        out[p].axis = cfg.offsets_symbols[p];
        out[p].detection = wilson(detected, 2 * cfg.trials);
        out[p].decode = wilson(decoded, 2 * cfg.trials);
    }
    return out;
}

inline io::CsvTable sweep_to_csv(const std::string& axis_name,
                                 const std::vector<SweepResult>& rows) {
    io::CsvTable table({axis_name, "detection", "det_ci_low", "det_ci_high", "decode",
                        "dec_ci_low", "dec_ci_high"});
    for (const auto& r : rows)
        table.add_row({r.axis, r.detection.value, r.detection.lo, r.detection.hi,
                       r.decode.value, r.decode.lo, r.decode.hi});
    return table;
}

} // namespace lzn::sim
