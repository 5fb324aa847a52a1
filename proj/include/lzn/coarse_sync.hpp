#pragma once

// Coarse synchronization: for every fractional (δ, f) grid point, dechirp the
// last N_p-1 windows ending at the current stream index, intersect their
// magnitude spectra, gate by max-to-median ratio, detect prominent peaks,
// consolidate duplicates across the grid, suppress sidelobes and validate the
// surviving peaks against the Dirichlet template bank.
//
// A hypothesis start is emitted as ℓ̂ = δ̃ - p with δ̃ = j + δ* - (N_p-1)·M:
// under this project's sign convention the peak of a window that is τ late
// with residual CFO F sits at (τ + F) mod M, so ℓ̂ lands at T - F and the
// CFO-sample bias is removed by fine sync Step I.

#include <algorithm>
#include <deque>
#include <optional>
#include <vector>

#include "lzn/capture.hpp"
#include "lzn/chirp.hpp"
#include "lzn/params.hpp"
#include "lzn/peaks.hpp"
#include "lzn/spectral.hpp"
#include "lzn/templates.hpp"

namespace lzn {

/// Coarse frame candidate handed to fine synchronization.
struct Hypothesis {
    double start_estimate = 0.0; ///< Nyquist samples, scene time
    double cfo_estimate = 0.0;   ///< bins (fractional grid value)
    double score = 0.0;          ///< template correlation
};

/// One coarse pass at stream index j (requires j >= (N_p-1)·M and the block
/// within the capture).  Stateless; the streaming detector below adds the
/// per-stride spectra cache.
inline std::vector<Hypothesis> coarse_synchronize(SpectralEngine& engine,
                                                  const IqCapture& capture, std::int64_t j,
                                                  const LoRaParams& params,
                                                  const GridConfig& cfg,
                                                  const TemplateBank& bank) {
    const int m = int(params.symbol_bins());
    const unsigned L = params.n_preamble - 1;
    if (j < std::int64_t(L) * m) throw std::invalid_argument("stream index before first block");

    struct GridPoint {
        double delta, freq;
        std::vector<double> z;
    };
    std::vector<GridPoint> points;
    std::vector<Peak> candidates;
    for (double d : cfg.delta_grid()) {
        for (double f : cfg.freq_grid()) {
            const double block_start = double(j) + d - double(L) * m;
            // Windows are extracted one at a time, exactly as the streaming
            // cache does, so cached and naive runs match bit for bit.
            std::vector<std::vector<double>> mags;
            mags.reserve(L);
            for (unsigned i = 0; i < L; ++i) {
                WindowMatrix w = dechirp_block(capture, block_start + double(i) * m, f, 1,
                                               params, ChirpDir::up);
                mags.push_back(magnitudes(engine.dft_full(w.rows[0])));
            }
            std::vector<double> z = spectral_intersection(mags);
            for (Peak p : detect_peaks(z, cfg, d, f)) candidates.push_back(p);
            points.push_back({d, f, std::move(z)});
        }
    }

    std::vector<Peak> peaks = nms(consolidate(candidates), m);
    std::vector<Hypothesis> hyps;
    for (const Peak& p : peaks) {
        const GridPoint* gp = nullptr;
        for (const auto& q : points)
            if (q.delta == p.delta && q.freq == p.freq) gp = &q;
        const double score = correlate_segment(gp->z, p.bin, bank);
        if (score < cfg.corr_threshold) continue;
        const double block_start = double(j) + p.delta - double(L) * m;
        hyps.push_back({block_start - p.bin, p.freq, score});
    }
    return hyps;
}

/// Streaming coarse stage: advances M samples per stride and reuses the
/// previous strides' window spectra, so each stride costs exactly
/// n_delta x n_freq full FFTs.  Produces the identical hypothesis stream as
/// re-running coarse_synchronize at every stride.
class CoarseStream {
public:
    CoarseStream(SpectralEngine& engine, const LoRaParams& params, const GridConfig& cfg)
        : engine_(engine), params_(params), cfg_(cfg),
          bank_(params.symbol_bins(), std::max(cfg.n_delta, cfg.n_freq),
                cfg.template_half_width) {
        cfg_.validate();
        params_.validate();
        for (double d : cfg_.delta_grid())
            for (double f : cfg_.freq_grid()) slots_.push_back({d, f, {}, {}});
    }

    const TemplateBank& bank() const { return bank_; }

    /// Feeds the stride whose newest window is [j-M+δ, j+δ); returns the
    /// hypotheses detected at stream index j.
    std::vector<Hypothesis> step(const IqCapture& capture, std::int64_t j) {
        const int m = int(params_.symbol_bins());
        const unsigned L = params_.n_preamble - 1;
        std::vector<Peak> candidates;
        std::vector<const Slot*> ready;
        for (auto& slot : slots_) {
            const double newest = double(j) + slot.delta - m;
            WindowMatrix w = dechirp_block(capture, newest, slot.freq, 1, params_, ChirpDir::up);
            slot.mags.push_back(magnitudes(engine_.dft_full(w.rows[0])));
            if (slot.mags.size() > L) slot.mags.pop_front();
            if (slot.mags.size() < L) continue;
            slot.z = spectral_intersection({slot.mags.begin(), slot.mags.end()});
            for (Peak p : detect_peaks(slot.z, cfg_, slot.delta, slot.freq))
                candidates.push_back(p);
            ready.push_back(&slot);
        }
        if (ready.empty()) return {};

        std::vector<Hypothesis> hyps;
        for (const Peak& p : nms(consolidate(candidates), m)) {
            const Slot* gp = nullptr;
            for (const Slot* q : ready)
                if (q->delta == p.delta && q->freq == p.freq) gp = q;
            const double score = correlate_segment(gp->z, p.bin, bank_);
            if (score < cfg_.corr_threshold) continue;
            const double block_start = double(j) + p.delta - double(L) * m;
            hyps.push_back({block_start - p.bin, p.freq, score});
        }
        return hyps;
    }

    void reset() {
        for (auto& s : slots_) {
            s.mags.clear();
            s.z.clear();
        }
    }

private:
    struct Slot {
        double delta, freq;
        std::deque<std::vector<double>> mags;
        std::vector<double> z;
    };

    SpectralEngine& engine_;
    LoRaParams params_;
    GridConfig cfg_;
    TemplateBank bank_;
    std::vector<Slot> slots_;
};

} // namespace lzn
