#pragma once

// Shared result/report types for the refinement stage.

#include <cmath>
#include <vector>

#include "lzn/params.hpp"

namespace lzn {

/// Refined frame estimate.  `start` is a (possibly fractional) Nyquist-rate
/// sample index, `cfo_bins` the full CFO in DFT bins.
struct SyncResult {
    double start = 0.0;
    double cfo_bins = 0.0;
    bool validated = false;
    double score = 0.0;

    /// Per-step diagnostics.
    struct Debug {
        int s_down_coarse = 0;     ///< Step I downchirp peak
        int s_up_mid = 0;          ///< Step II intersected argmax in K0
        double frac_cfo = 0.0;     ///< Step II estimate, bins
        bool frac_cfo_skipped = false;
        double frac_sto = 0.0;     ///< Step III zoomed argmax, bins
        int s_up_final = 0;        ///< Step IV peaks
        int s_down_final = 0;
        bool range_error = false;  ///< a window left the capture
    } debug;
};

/// Restricted search regions of the refinement, derived from the PHY
/// parameters.  The downchirp region is centered at +M/8 under this
/// project's chirp sign convention (window early by M/8 puts the
/// downchirp-induced peak at +M/8).
struct SearchRegions {
    std::vector<int> downchirp; ///< M/8 ± 2 f_max, integer bins
    std::vector<int> origin;    ///< {-2..2}
    double zoom_half_span = 2.0;
    unsigned zoom_resolution = 8; ///< 1/8-bin grid, 33 points
    int corr_half_width = 7;      ///< K = 15 segment

    static SearchRegions from_params(const LoRaParams& params) {
        SearchRegions r;
        const int m = int(params.symbol_bins());
        const int center = m / 8;
        const int span = int(std::ceil(2.0 * params.max_cfo_bins()));
        for (int k = center - span; k <= center + span; ++k) r.downchirp.push_back(k);
        for (int k = -2; k <= 2; ++k) r.origin.push_back(k);
        return r;
    }
};

} // namespace lzn
