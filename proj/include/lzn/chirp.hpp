#pragma once

// Chirp generation and dechirped-window extraction.
//
// Conventions (locked by the exhaustive demodulation tests):
//  - reference upchirp u[n] = exp(jπ(n²/M − n)), n in Nyquist samples; it is
//    exactly M-periodic, so a dechirped symbol is a pure tone.
//  - symbol m cyclically advances the upchirp; dechirping symbol m against
//    conj(u) peaks at bin +m.
//  - consequently a demodulation window that starts τ samples late peaks at
//    +τ for upchirps and −τ for downchirps, and a CFO of F bins adds +F to
//    both.  Downchirp windows are dechirped by the conjugate reference
//    downchirp, i.e. multiplied by u itself.

#include <complex>
#include <stdexcept>
#include <vector>

#include "lzn/capture.hpp"
#include "lzn/params.hpp"
#include "lzn/spectral.hpp"

namespace lzn {

enum class ChirpDir { up, down };

/// L dechirped demodulation windows of M samples each, extracted at a common
/// fractional start and CFO compensation.  The compensation phasor is
/// anchored at the block start (element n of row i is rotated by
/// exp(−j2π f (iM+n)/M)) so rows stay phase-coherent for summation and the
/// inter-row phase step equals the residual CFO.
struct WindowMatrix {
    std::vector<std::vector<cplx>> rows;
    double delta = 0.0; ///< fractional part of the requested start
    double freq = 0.0;  ///< compensated CFO, bins
};

/// Baseband CSS symbol at the capture rate (length M * oversampling).
inline std::vector<cplx> make_chirp(const LoRaParams& params, unsigned symbol,
                                    ChirpDir direction) {
    const unsigned m = params.symbol_bins();
    if (symbol >= m) throw std::domain_error("symbol value out of range");
    const unsigned os = params.oversampling;
    const std::size_t n = std::size_t(m) * os;
    std::vector<cplx> out(n);
    for (std::size_t q = 0; q < n; ++q) {
        const double t = double((q + std::size_t(symbol) * os) % n) / os;
        double phase = M_PI * (t * t / m - t);
        if (direction == ChirpDir::down) phase = -phase;
        out[q] = std::polar(1.0, phase);
    }
    return out;
}

/// Reference chirp at Nyquist rate (length M), used for dechirping.
inline std::vector<cplx> reference_chirp(unsigned m, ChirpDir direction) {
    std::vector<cplx> out(m);
    for (unsigned n = 0; n < m; ++n) {
        double phase = M_PI * (double(n) * n / m - n);
        if (direction == ChirpDir::down) phase = -phase;
        out[n] = std::polar(1.0, phase);
    }
    return out;
}

namespace detail {
inline const std::vector<cplx>& dechirp_reference(unsigned m, ChirpDir dir) {
    // Dechirping multiplies by the conjugate reference of the window's
    // direction; cache per (m, dir) since these are hot.
    thread_local std::vector<cplx> up_ref, down_ref;
    thread_local unsigned cached_m = 0;
    if (cached_m != m) {
        up_ref = reference_chirp(m, ChirpDir::up);
        down_ref = reference_chirp(m, ChirpDir::down);
        for (auto& v : up_ref) v = std::conj(v);
        for (auto& v : down_ref) v = std::conj(v);
        cached_m = m;
    }
    return dir == ChirpDir::up ? up_ref : down_ref;
}
} // namespace detail

/// Extracts L consecutive dechirped windows starting at a fractional
/// Nyquist-rate index.  Fractional starts are realized by decimation-phase
/// selection in the oversampled stream; at oversampling 1 the residual
/// fraction is applied as a post-dechirp frequency ramp.
/// Throws std::out_of_range when the span exceeds the capture.
inline WindowMatrix dechirp_block(const IqCapture& capture, double start,
                                  double cfo_bins, unsigned L,
                                  const LoRaParams& params, ChirpDir direction) {
    if (L < 1) throw std::invalid_argument("dechirp_block needs L >= 1");
    const unsigned m = params.symbol_bins();
    const unsigned os = capture.oversampling;
    const std::int64_t raw0 = std::llround(start * os) - capture.origin_offset;
    const std::int64_t raw_needed = raw0 + std::int64_t(L) * m * os;
    if (raw0 < 0 || raw_needed > std::int64_t(capture.samples.size()))
        throw std::out_of_range("demodulation window exceeds capture bounds");

    const auto& ref = detail::dechirp_reference(m, direction);
    double ramp = 0.0;
    if (os == 1) {
        // residual fraction not realizable by decimation phase
        ramp = start * os - double(std::llround(start * os));
    }

    WindowMatrix block;
    block.delta = start - std::floor(start);
    block.freq = cfo_bins;
    block.rows.assign(L, std::vector<cplx>(m));
    const cplx wshift = std::polar(1.0, -2.0 * M_PI * cfo_bins / m);
    cplx comp{1.0, 0.0};
    const cplx wramp = std::polar(1.0, 2.0 * M_PI * ramp / m);
    for (unsigned i = 0; i < L; ++i) {
        auto& row = block.rows[i];
        cplx rampph{1.0, 0.0};
        for (unsigned n = 0; n < m; ++n) {
            cplx v = capture.samples[std::size_t(raw0 + (std::int64_t(i) * m + n) * os)];
            v *= comp;
            if (ramp != 0.0) {
                v *= rampph;
                rampph *= wramp;
            }
            row[n] = v * ref[n];
            comp *= wshift;
        }
    }
    return block;
}

/// Per-row magnitude spectra of a dechirped block.
inline std::vector<std::vector<double>> block_magnitudes(SpectralEngine& engine,
                                                         const WindowMatrix& block) {
    std::vector<std::vector<double>> mags;
    mags.reserve(block.rows.size());
    for (const auto& row : block.rows) mags.push_back(magnitudes(engine.dft_full(row)));
    return mags;
}

} // namespace lzn
