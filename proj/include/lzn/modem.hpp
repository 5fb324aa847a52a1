#pragma once

// Frame-level modulation (preamble, sync word, 2.25 downchirps, payload
// upchirps) and argmax demodulation of a synchronized capture.

#include <complex>
#include <vector>

#include "lzn/capture.hpp"
#include "lzn/chirp.hpp"
#include "lzn/codec.hpp"
#include "lzn/fine_sync_types.hpp"
#include "lzn/params.hpp"
#include "lzn/spectral.hpp"

namespace lzn::phy {

/// Modulated frame at the capture rate: N_p upchirps, two sync-word symbols,
/// two downchirps plus a quarter, then the payload symbols.  CFO and initial
/// phase are applied continuously across the whole frame.
inline std::vector<cplx> modulate_frame(const std::vector<unsigned>& payload_symbols,
                                        const LoRaParams& params, double cfo_hz = 0.0,
                                        double amplitude = 1.0, double phase0 = 0.0) {
    const unsigned m = params.symbol_bins();
    const unsigned os = params.oversampling;
    const std::size_t sym_raw = std::size_t(m) * os;
    const std::size_t total =
        sym_raw * (params.n_preamble + 2 + 2) + sym_raw / 4 + sym_raw * payload_symbols.size();

    const std::vector<cplx> up0 = make_chirp(params, 0, ChirpDir::up);
    const std::vector<cplx> down0 = make_chirp(params, 0, ChirpDir::down);
    const std::vector<cplx> sync1 = make_chirp(params, params.sync_word.first, ChirpDir::up);
    const std::vector<cplx> sync2 = make_chirp(params, params.sync_word.second, ChirpDir::up);

    std::vector<cplx> frame;
    frame.reserve(total);
    auto append = [&](const std::vector<cplx>& sym, std::size_t count) {
        frame.insert(frame.end(), sym.begin(), sym.begin() + count);
    };
    for (unsigned i = 0; i < params.n_preamble; ++i) append(up0, sym_raw);
    append(sync1, sym_raw);
    append(sync2, sym_raw);
    append(down0, sym_raw);
    append(down0, sym_raw);
    append(down0, sym_raw / 4);
    for (unsigned s : payload_symbols) append(make_chirp(params, s, ChirpDir::up), sym_raw);

    const double cfo_bins = cfo_hz * m / params.bandwidth_hz;
    const cplx w = std::polar(1.0, 2.0 * M_PI * cfo_bins / (double(m) * os));
    cplx rot = std::polar(amplitude, phase0);
    for (auto& v : frame) {
        v *= rot;
        rot *= w;
    }
    return frame;
}

/// Nyquist-rate offset from frame start to the first payload symbol.
inline double payload_offset_symbols(const LoRaParams& params) {
    return params.n_preamble + 2 + 2.25;
}

/// Dechirp + full DFT + argmax for n_symbols payload windows aligned by a
/// sync result.  Pure non-coherent demodulation; FFTs are charged to the
/// engine's counter.
inline std::vector<unsigned> demodulate(SpectralEngine& engine, const IqCapture& capture,
                                        const SyncResult& sync, unsigned n_symbols,
                                        const LoRaParams& params) {
    const unsigned m = params.symbol_bins();
    const double base = sync.start + payload_offset_symbols(params) * m;
    WindowMatrix block =
        dechirp_block(capture, base, sync.cfo_bins, n_symbols, params, ChirpDir::up);
    std::vector<unsigned> symbols;
    symbols.reserve(n_symbols);
    for (const auto& row : block.rows) {
        const std::vector<double> mag = magnitudes(engine.dft_full(row));
        std::size_t best = 0;
        for (std::size_t k = 1; k < mag.size(); ++k)
            if (mag[k] > mag[best]) best = k;
        symbols.push_back(static_cast<unsigned>(best));
    }
    return symbols;
}

} // namespace lzn::phy
