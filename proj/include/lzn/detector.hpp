#pragma once

// End-to-end streaming detector: stride the capture by M Nyquist samples,
// run the cached coarse stage, refine every hypothesis and keep the validated
// results, merging duplicates that refined to the same frame.

#include <algorithm>
#include <vector>

#include "lzn/capture.hpp"
#include "lzn/coarse_sync.hpp"
#include "lzn/fine_sync.hpp"
#include "lzn/params.hpp"
#include "lzn/spectral.hpp"

namespace lzn {

struct DetectorReport {
    std::uint64_t windows_processed = 0; ///< strides (one demodulation window each)
    std::uint64_t hypotheses = 0;        ///< coarse hypotheses refined
    std::uint64_t validated = 0;
    FftCounter coarse;
    FftCounter fine;

    double full_ffts_per_window() const {
        return windows_processed ? double(coarse.full_ffts) / double(windows_processed) : 0.0;
    }
    double fft_equivalents_per_hypothesis(unsigned m) const {
        return hypotheses ? fine.full_fft_equivalents(m) / double(hypotheses) : 0.0;
    }
};

class FrameDetector {
public:
    FrameDetector(const LoRaParams& params, const GridConfig& cfg)
        : params_(params), cfg_(cfg), stream_(engine_, params, cfg) {}

    /// Runs the full pipeline over a capture and returns the validated sync
    /// results in start order.
    std::vector<SyncResult> detect(const IqCapture& capture) {
        const int m = int(params_.symbol_bins());
        stream_.reset();
        report_ = DetectorReport{};

        std::vector<SyncResult> results;
        const std::int64_t end = capture.nyquist_size();
        // start at the first full window so the spectra cache warms up while
        // covering the head of the capture; hypotheses appear once the cache
        // holds N_p-1 windows
        for (std::int64_t j = m; j + 1 <= end; j += m) {
            // the newest window must fit, including the largest grid delta
            if (std::llround((double(j) + 0.5) * capture.oversampling) >
                std::int64_t(capture.raw_size()))
                break;
            const FftCounter before = engine_.counter();
            std::vector<Hypothesis> hyps = stream_.step(capture, j);
            accumulate(report_.coarse, before, engine_.counter());
            ++report_.windows_processed;
            if (hypothesis_log_)
                hypothesis_log_->insert(hypothesis_log_->end(), hyps.begin(), hyps.end());

            for (const Hypothesis& h : hyps) {
                const FftCounter before_fine = engine_.counter();
                SyncResult r = fine_synchronize(engine_, capture, h, params_, cfg_, stream_.bank());
                accumulate(report_.fine, before_fine, engine_.counter());
                ++report_.hypotheses;
                if (r.validated) results.push_back(r);
            }
        }

        std::sort(results.begin(), results.end(),
                  [](const SyncResult& a, const SyncResult& b) { return a.start < b.start; });
        // Adjacent strides of one frame refine to the same start; keep the
        // higher-scoring copy.  One start = one frame: co-located colliding
        // transmissions collapse to a single detection here.
        std::vector<SyncResult> merged;
        for (const SyncResult& r : results) {
            if (!merged.empty() && std::abs(r.start - merged.back().start) <= 2.0) {
                if (r.score > merged.back().score) merged.back() = r;
            } else {
                merged.push_back(r);
            }
        }
        report_.validated = merged.size();
        return merged;
    }

    const DetectorReport& report() const { return report_; }
    SpectralEngine& engine() { return engine_; }
    const LoRaParams& params() const { return params_; }
    const GridConfig& grid() const { return cfg_; }

    /// Optional sink for every coarse hypothesis (debugging aid).
    void log_hypotheses(std::vector<Hypothesis>* sink) { hypothesis_log_ = sink; }

private:
    static void accumulate(FftCounter& dst, const FftCounter& before, const FftCounter& after) {
        dst.full_ffts += after.full_ffts - before.full_ffts;
        dst.sparse_bin_evals += after.sparse_bin_evals - before.sparse_bin_evals;
        dst.zoom_ffts += after.zoom_ffts - before.zoom_ffts;
    }

    SpectralEngine engine_;
    LoRaParams params_;
    GridConfig cfg_;
    CoarseStream stream_;
    DetectorReport report_;
    std::vector<Hypothesis>* hypothesis_log_ = nullptr;
};

} // namespace lzn
