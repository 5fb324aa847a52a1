#pragma once

// Peak machinery for the coarse stage: prominence gating by max-to-median
// ratio, Modified Z-score outlier selection, circular peak detection with
// valley-based prominences, per-bin consolidation across the (δ, f) grid and
// 3-bin non-maximum suppression.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lzn {

/// Median with the even-length case resolved as the mean of the central pair.
inline double median(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median of empty vector");
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (v.size() % 2 == 1) return hi;
    double lo = *std::max_element(v.begin(), v.begin() + mid);
    return 0.5 * (lo + hi);
}

/// Cheap gate applied before peak detection: a window is worth searching only
/// if its max-to-median ratio clears rho.  All-zero spectra are never
/// prominent.
inline bool is_prominent(const std::vector<double>& z, double rho) {
    if (z.empty()) throw std::invalid_argument("is_prominent on empty spectrum");
    const double mx = *std::max_element(z.begin(), z.end());
    if (mx <= 0.0) return false;
    const double med = median(z);
    if (med <= 0.0) return true; // max > 0 with zero median: infinite ratio
    return mx / med > rho;
}

/// Mask of entries with 0.6745·|x − median|/MAD above sigma.  Falls back to
/// the mean absolute deviation when the MAD is zero; a fully constant vector
/// has no outliers.
inline std::vector<bool> modified_zscore_outliers(const std::vector<double>& values,
                                                  double sigma) {
    if (values.size() < 3)
        throw std::invalid_argument("modified z-score needs at least 3 samples");
    const double med = median(std::vector<double>(values));
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - med);
    double norm = 0.6745 / median(std::vector<double>(dev));
    if (!std::isfinite(norm)) {
        // MAD = 0: fall back to the mean absolute deviation with its own
        // consistency constant (1/1.2533)
        double mean_ad = 0.0;
        for (double d : dev) mean_ad += d;
        mean_ad /= double(dev.size());
        if (mean_ad == 0.0) return std::vector<bool>(values.size(), false);
        norm = 1.0 / (1.253314 * mean_ad);
    }
    std::vector<bool> mask(values.size(), false);
    for (std::size_t i = 0; i < values.size(); ++i) mask[i] = dev[i] * norm > sigma;
    return mask;
}

/// Candidate preamble peak with the grid coordinates it was observed at.
struct Peak {
    int bin = 0;
    double magnitude = 0.0;
    double delta = 0.0;
    double freq = 0.0;
};

namespace detail {

inline bool is_local_max(const std::vector<double>& z, std::size_t i) {
    const std::size_t n = z.size();
    const double prev = z[(i + n - 1) % n];
    const double next = z[(i + 1) % n];
    return z[i] > prev && z[i] >= next; // plateau: keep its left edge
}

inline bool is_local_min(const std::vector<double>& z, std::size_t i) {
    const std::size_t n = z.size();
    const double prev = z[(i + n - 1) % n];
    const double next = z[(i + 1) % n];
    return z[i] < prev && z[i] <= next;
}

/// Height of the peak above the higher of its two adjacent valleys.  Each
/// valley is the minimum over the circular stretch from the peak to the
/// nearest strictly higher sample, so a one-bin dimple inside a wide main
/// lobe cannot truncate the prominence.
inline double prominence(const std::vector<double>& z, std::size_t peak) {
    const std::size_t n = z.size();
    double left = z[peak], right = z[peak];
    for (std::size_t step = 1; step < n; ++step) {
        const std::size_t i = (peak + n - step) % n;
        if (z[i] > z[peak]) break;
        left = std::min(left, z[i]);
    }
    for (std::size_t step = 1; step < n; ++step) {
        const std::size_t i = (peak + step) % n;
        if (z[i] > z[peak]) break;
        right = std::min(right, z[i]);
    }
    return z[peak] - std::max(left, right);
}

} // namespace detail

struct GridConfig {
    unsigned n_delta = 2;          ///< fractional-delay hypotheses
    unsigned n_freq = 2;           ///< fractional-CFO hypotheses
    double rho = 5.0;              ///< max-to-median prominence gate
    double mad_sigma = 3.5;        ///< Modified Z-score threshold
    double corr_threshold = 0.7;   ///< template correlation acceptance
    unsigned template_half_width = 7; ///< K = 15 taps

    void validate() const {
        if (n_delta < 1 || n_freq < 1)
            throw std::invalid_argument("grid sizes must be >= 1");
        if (rho <= 1.0) throw std::invalid_argument("rho must exceed 1");
        if (corr_threshold <= 0.0 || corr_threshold >= 1.0)
            throw std::invalid_argument("correlation threshold must be in (0,1)");
    }

    std::vector<double> delta_grid() const {
        std::vector<double> g(n_delta);
        for (unsigned k = 0; k < n_delta; ++k) g[k] = double(k) / (2.0 * n_delta);
        return g;
    }
    std::vector<double> freq_grid() const {
        std::vector<double> g(n_freq);
        for (unsigned k = 0; k < n_freq; ++k) g[k] = double(k) / (2.0 * n_freq);
        return g;
    }
};

/// Circular local maxima whose prominences are Modified Z-score outliers.
/// Returns nothing when the whole window fails the rho gate.
inline std::vector<Peak> detect_peaks(const std::vector<double>& z, const GridConfig& cfg,
                                      double delta = 0.0, double freq = 0.0) {
    std::vector<Peak> out;
    if (!is_prominent(z, cfg.rho)) return out;

    // floating-point floor so an (almost) noise-free spectrum does not grow
    // maxima out of rounding residue
    const double floor = *std::max_element(z.begin(), z.end()) * 1e-9;
    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i] > floor && detail::is_local_max(z, i)) maxima.push_back(i);
    if (maxima.size() < 3) {
        // Degenerate landscape (e.g. one clean tone): too few prominences for
        // an outlier statistic, so apply the gate per maximum instead.
        const double med = median(std::vector<double>(z));
        for (std::size_t i : maxima)
            if (med <= 0.0 || z[i] / med > cfg.rho)
                out.push_back({int(i), z[i], delta, freq});
        return out;
    }

    std::vector<double> proms(maxima.size());
    for (std::size_t p = 0; p < maxima.size(); ++p)
        proms[p] = detail::prominence(z, maxima[p]);
    const std::vector<bool> flagged = modified_zscore_outliers(proms, cfg.mad_sigma);
    for (std::size_t p = 0; p < maxima.size(); ++p)
        if (flagged[p]) out.push_back({int(maxima[p]), z[maxima[p]], delta, freq});
    return out;
}

/// One peak per unique bin, keeping the grid point of maximum magnitude.
/// Ties break deterministically towards the smallest (δ, f).
inline std::vector<Peak> consolidate(const std::vector<Peak>& candidates) {
    std::vector<Peak> out;
    for (const Peak& c : candidates) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const Peak& p) { return p.bin == c.bin; });
        if (it == out.end()) {
            out.push_back(c);
            continue;
        }
        const bool better =
            c.magnitude > it->magnitude ||
            (c.magnitude == it->magnitude &&
             (c.delta < it->delta || (c.delta == it->delta && c.freq < it->freq)));
        if (better) *it = c;
    }
    std::sort(out.begin(), out.end(), [](const Peak& a, const Peak& b) { return a.bin < b.bin; });
    return out;
}

/// Circular non-maximum suppression: drops peaks with a strictly larger peak
/// within ±width/2 bins; equal-magnitude neighbors keep the lower bin.
inline std::vector<Peak> nms(const std::vector<Peak>& peaks, int m, int width = 3) {
    if (width % 2 == 0) throw std::invalid_argument("NMS width must be odd");
    const int half = width / 2;
    std::vector<Peak> out;
    for (const Peak& p : peaks) {
        bool suppressed = false;
        for (const Peak& q : peaks) {
            if (&q == &p) continue;
            int d = std::abs(p.bin - q.bin);
            d = std::min(d, m - d);
            if (d > half) continue;
            if (q.magnitude > p.magnitude ||
                (q.magnitude == p.magnitude && q.bin < p.bin)) {
                suppressed = true;
                break;
            }
        }
        if (!suppressed) out.push_back(p);
    }
    return out;
}

} // namespace lzn
