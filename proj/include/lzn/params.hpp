#pragma once

// Static PHY configuration shared by the modulator, the synchronizer and the
// analytical models.  All timing is expressed in Nyquist-rate samples (one
// sample per chip, M = 2^sf per symbol); captures carry an integer
// oversampling factor on top of that.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace lzn {

struct LoRaParams {
    unsigned sf = 8;                  ///< spreading factor, 7..12
    double bandwidth_hz = 125000.0;   ///< chirp bandwidth B
    unsigned oversampling = 4;        ///< capture rate = oversampling * B
    unsigned n_preamble = 8;          ///< number of reference upchirps
    std::pair<unsigned, unsigned> sync_word{8, 16}; ///< two sync symbols
    double max_cfo_hz = 8680.0;       ///< worst-case oscillator offset

    unsigned symbol_bins() const { return 1u << sf; }
    double symbol_duration_s() const { return symbol_bins() / bandwidth_hz; }
    double sample_rate_hz() const { return bandwidth_hz * oversampling; }

    /// Worst-case CFO expressed in DFT bins (1 bin = B/M Hz).
    double max_cfo_bins() const {
        return symbol_bins() * max_cfo_hz / bandwidth_hz;
    }

    /// Frame layout: preamble, two sync symbols, 2.25 downchirps.
    double header_symbols() const { return n_preamble + 2 + 2.25; }

    void validate() const {
        if (sf < 7 || sf > 12)
            throw std::invalid_argument("spreading factor out of range (7-12)");
        if (bandwidth_hz <= 0)
            throw std::invalid_argument("bandwidth must be positive");
        if (oversampling < 1)
            throw std::invalid_argument("oversampling must be >= 1");
        if (n_preamble < 2)
            throw std::invalid_argument("preamble too short");
        const unsigned m = symbol_bins();
        if (sync_word.first >= m || sync_word.second >= m)
            throw std::invalid_argument("sync word symbol out of range");
        if (!(max_cfo_hz >= 0) || !std::isfinite(max_cfo_bins()))
            throw std::invalid_argument("bad max_cfo_hz");
        if (max_cfo_bins() >= m / 4.0)
            throw std::invalid_argument("max CFO must stay below M/4 bins");
    }
};

} // namespace lzn
