#pragma once

// Spectral primitives used across the receiver: full M-point DFT (FFTW
// backend), Goertzel evaluation of selected integer bins, zoomed evaluation on
// a fractional-bin grid, and frequency shifting.  Every transform is charged
// to an FftCounter so per-window / per-hypothesis budgets can be audited.

#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace lzn {

using cplx = std::complex<double>;

/// Transform-work accounting.  One full_fft per M-point transform, one
/// zoom_fft per zoomed evaluation, one sparse_bin_eval per Goertzel bin.
/// Mergeable so parallel workers can sum their tallies.
struct FftCounter {
    std::uint64_t full_ffts = 0;
    std::uint64_t sparse_bin_evals = 0;
    std::uint64_t zoom_ffts = 0;

    void merge(const FftCounter& o) {
        full_ffts += o.full_ffts;
        sparse_bin_evals += o.sparse_bin_evals;
        zoom_ffts += o.zoom_ffts;
    }
    /// Full-FFT equivalents with a zoom charged as one full transform and
    /// sparse bins charged fractionally.
    double full_fft_equivalents(unsigned m) const {
        return double(full_ffts) + double(zoom_ffts) +
               double(sparse_bin_evals) / double(m);
    }
};

/// One fractional-bin sample of a zoomed spectrum.
struct ZoomPoint {
    double bin = 0.0;
    cplx value{0.0, 0.0};
};

namespace detail {
/// FFTW's planner (including plan destruction) mutates global state and is
/// not thread-safe; every planner call goes through this lock.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Owns FFTW plans (cached per size) and the run's FftCounter.  Not copyable;
/// use one engine per worker thread and merge counters afterwards.
class SpectralEngine {
public:
    SpectralEngine() = default;
    ~SpectralEngine() {
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
    }
    SpectralEngine(const SpectralEngine&) = delete;
    SpectralEngine& operator=(const SpectralEngine&) = delete;

    FftCounter& counter() { return counter_; }
    const FftCounter& counter() const { return counter_; }

    /// Complex M-point DFT, X[k] = sum_n x[n] e^{-j2πkn/M}.
    std::vector<cplx> dft_full(const std::vector<cplx>& window) {
        const std::size_t n = window.size();
        std::vector<cplx> out(n);
        fftw_plan plan = plan_for(n);
        fftw_execute_dft(plan,
                         reinterpret_cast<fftw_complex*>(const_cast<cplx*>(window.data())),
                         reinterpret_cast<fftw_complex*>(out.data()));
        ++counter_.full_ffts;
        return out;
    }

    /// DFT restricted to the given integer bins (Goertzel recurrence).
    /// Bins may be negative; they are taken modulo the window length.
    std::vector<cplx> dft_bins(const std::vector<cplx>& window,
                               const std::vector<int>& bins) {
        const int n = static_cast<int>(window.size());
        std::vector<cplx> out;
        out.reserve(bins.size());
        for (int k : bins) {
            int kk = ((k % n) + n) % n;
            const double w = 2.0 * M_PI * kk / n;
            const double c = 2.0 * std::cos(w);
            cplx s1{0.0, 0.0}, s2{0.0, 0.0};
            for (int i = 0; i < n; ++i) {
                cplx s = window[i] + c * s1 - s2;
                s2 = s1;
                s1 = s;
            }
            // X[k] = s1·e^{jw} − s2 for integer bins.
            out.push_back(s1 * std::polar(1.0, w) - s2);
        }
        counter_.sparse_bin_evals += bins.size();
        return out;
    }

    /// Spectrum sampled on the fractional grid {center + i/resolution,
    /// |i| <= half_span_bins*resolution}.  Direct evaluation with a recursive
    /// phasor; one zoom_fft is charged per call.
    std::vector<ZoomPoint> zoom_dft(const std::vector<cplx>& window,
                                    double center_bin, double half_span_bins,
                                    unsigned resolution) {
        if (resolution < 1)
            throw std::invalid_argument("zoom resolution must be >= 1");
        const int n = static_cast<int>(window.size());
        const int steps = static_cast<int>(std::lround(half_span_bins * resolution));
        std::vector<ZoomPoint> out;
        out.reserve(2 * steps + 1);
        for (int i = -steps; i <= steps; ++i) {
            const double f = center_bin + double(i) / resolution;
            const cplx w = std::polar(1.0, -2.0 * M_PI * f / n);
            cplx t{1.0, 0.0};
            cplx acc{0.0, 0.0};
            for (int v = 0; v < n; ++v) {
                acc += window[v] * t;
                t *= w;
            }
            out.push_back({f, acc});
        }
        ++counter_.zoom_ffts;
        return out;
    }

private:
    fftw_plan plan_for(std::size_t n) {
        auto it = plans_.find(n);
        if (it != plans_.end()) return it->second;
        std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
        std::vector<cplx> a(n), b(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n),
                                          reinterpret_cast<fftw_complex*>(a.data()),
                                          reinterpret_cast<fftw_complex*>(b.data()),
                                          FFTW_FORWARD,
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(n, plan);
        return plan;
    }

    std::map<std::size_t, fftw_plan> plans_;
    FftCounter counter_;
};

/// Multiplies element n by e^{-j2π f_bins n / M}; a tone at bin m moves to
/// bin m - f_bins.  Energy preserving.
inline std::vector<cplx> freq_shift(const std::vector<cplx>& window, double f_bins) {
    const std::size_t n = window.size();
    std::vector<cplx> out(n);
    const cplx w = std::polar(1.0, -2.0 * M_PI * f_bins / double(n));
    cplx t{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = window[i] * t;
        t *= w;
    }
    return out;
}

inline std::vector<double> magnitudes(const std::vector<cplx>& spectrum) {
    std::vector<double> out(spectrum.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i) out[i] = std::abs(spectrum[i]);
    return out;
}

/// Element-wise minimum of L magnitude spectra; the persistence filter that
/// keeps peaks present in every window and crushes one-off artifacts.
inline std::vector<double> spectral_intersection(const std::vector<std::vector<double>>& rows) {
    if (rows.empty())
        throw std::invalid_argument("spectral_intersection needs at least one row");
    std::vector<double> out = rows.front();
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != out.size())
            throw std::invalid_argument("spectral rows differ in length");
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = std::min(out[k], rows[r][k]);
    }
    return out;
}

} // namespace lzn
