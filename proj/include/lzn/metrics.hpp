#pragma once

// Scoring of detector output against simulator ground truth.  Matching is
// greedy one-to-one by ascending timing error with a half-symbol default
// tolerance; a frame counts as received only when its matched detection
// demodulates to a CRC-clean payload.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "lzn/detector.hpp"
#include "lzn/modem.hpp"
#include "lzn/simulator.hpp"

namespace lzn::sim {

struct Metrics {
    double mfr = 0.0; ///< missed-frame ratio
    double fdr = 0.0; ///< frame-detection ratio (1 - mfr)
    double per = 0.0; ///< packet error ratio over all truth frames
    double prr = 0.0; ///< packet reception ratio (1 - per)
    std::vector<double> timing_errors; ///< signed, matched frames only
    std::vector<double> cfo_errors;    ///< signed bins, matched frames only
    std::size_t matched = 0;
    std::size_t decoded = 0;
    std::size_t false_positives = 0;
    std::size_t truth_count = 0;
};

struct MatchPair {
    std::size_t truth_index;
    std::size_t detection_index;
};

/// Greedy one-to-one assignment by ascending |timing error|; detections
/// farther than tol_samples from every unmatched truth frame become false
/// positives.
inline std::vector<MatchPair> match_pairs(const GroundTruth& truth,
                                          const std::vector<SyncResult>& detections,
                                          double tol_samples) {
    struct Cand {
        double err;
        std::size_t t, d;
    };
    std::vector<Cand> cands;
    for (std::size_t t = 0; t < truth.frames.size(); ++t)
        for (std::size_t d = 0; d < detections.size(); ++d) {
            const double err = std::abs(detections[d].start - truth.frames[t].start);
            if (err <= tol_samples) cands.push_back({err, t, d});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.err != b.err) return a.err < b.err;
        if (a.t != b.t) return a.t < b.t;
        return a.d < b.d;
    });
    std::vector<bool> t_used(truth.frames.size(), false), d_used(detections.size(), false);
    std::vector<MatchPair> out;
    for (const Cand& c : cands) {
        if (t_used[c.t] || d_used[c.d]) continue;
        t_used[c.t] = true;
        d_used[c.d] = true;
        out.push_back({c.t, c.d});
    }
    return out;
}

/// Detection metrics only (no decoding).
inline Metrics match_detections(const GroundTruth& truth,
                                const std::vector<SyncResult>& detections,
                                const LoRaParams& params,
                                std::optional<double> tol_samples = std::nullopt) {
    const double tol = tol_samples.value_or(params.symbol_bins() / 2.0);
    Metrics mt;
    mt.truth_count = truth.frames.size();
    const std::vector<MatchPair> pairs = match_pairs(truth, detections, tol);
    mt.matched = pairs.size();
    for (const MatchPair& p : pairs) {
        const TruthFrame& tf = truth.frames[p.truth_index];
        const SyncResult& det = detections[p.detection_index];
        mt.timing_errors.push_back(det.start - tf.start);
        mt.cfo_errors.push_back(det.cfo_bins -
                                tf.cfo_hz * params.symbol_bins() / params.bandwidth_hz);
    }
    mt.false_positives = detections.size() - pairs.size();
    if (mt.truth_count) {
        mt.fdr = double(mt.matched) / double(mt.truth_count);
        mt.mfr = 1.0 - mt.fdr;
    }
    return mt;
}

/// Detection + decode metrics: demodulates each matched detection and checks
/// the payload CRC against the truth payload path.
inline Metrics evaluate_scene(SpectralEngine& engine, const IqCapture& capture,
                              const GroundTruth& truth,
                              const std::vector<SyncResult>& detections,
                              const LoRaParams& params,
                              std::optional<double> tol_samples = std::nullopt) {
    Metrics mt = match_detections(truth, detections, params, tol_samples);
    const std::vector<MatchPair> pairs =
        match_pairs(truth, detections, tol_samples.value_or(params.symbol_bins() / 2.0));
    for (const MatchPair& p : pairs) {
        const TruthFrame& tf = truth.frames[p.truth_index];
        try {
            const std::vector<unsigned> symbols = phy::demodulate(
                engine, capture, detections[p.detection_index], tf.n_payload_symbols, params);
            phy::PayloadMeta meta{tf.payload.size(), tf.coding_rate, tf.has_crc};
            const phy::DecodeResult dec = phy::decode(symbols, meta, params);
            if (dec.crc_ok && dec.bytes == tf.payload) ++mt.decoded;
        } catch (const std::out_of_range&) {
            // payload windows ran past the capture: counts as an error
        }
    }
    if (mt.truth_count) {
        mt.prr = double(mt.decoded) / double(mt.truth_count);
        mt.per = 1.0 - mt.prr;
    }
    return mt;
}

/// Wilson 95% score interval for k successes out of n.
struct Interval {
    double value = 0.0, lo = 0.0, hi = 0.0;
};

inline Interval wilson(std::size_t k, std::size_t n) {
    Interval iv;
    if (n == 0) return iv;
    const double z = 1.959963984540054;
    const double p = double(k) / double(n);
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    iv.value = p;
    iv.lo = k == 0 ? 0.0 : std::max(0.0, center - half);
    iv.hi = k == n ? 1.0 : std::min(1.0, center + half);
    return iv;
}

} // namespace lzn::sim
