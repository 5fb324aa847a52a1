#pragma once

// Baseline LoRa payload bit chain: CRC-16, whitening, nibble splitting,
// per-rate punctured Hamming(8,4), diagonal interleaving and Gray mapping.
// The exact bit conventions are documented in README.md and frozen by golden
// vectors; decode(encode(x)) is the contract, together with ±1-bin symbol
// error tolerance through the Gray/interleave/Hamming path.
//
// Layout: the first interleaver block always runs reduced-rate (SF-2 bits per
// symbol, rate 4/8, 8 symbols); subsequent blocks carry SF bits per symbol at
// the configured coding rate.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lzn/params.hpp"

namespace lzn::phy {

/// Coding rate 4/(4+value).
enum class CodingRate : unsigned { cr45 = 1, cr46 = 2, cr47 = 3, cr48 = 4 };

inline unsigned cr_parity_bits(CodingRate cr) { return static_cast<unsigned>(cr); }

struct FramePayload {
    std::vector<std::uint8_t> bytes;
    CodingRate coding_rate = CodingRate::cr48;
    bool has_crc = true;
    bool low_data_rate_opt = false; // reserved, unimplemented
};

/// CRC-16 (poly 0x1021, init 0, no reflection) over the raw payload bytes.
inline std::uint16_t crc16(const std::vector<std::uint8_t>& data) {
    std::uint16_t crc = 0x0000;
    for (std::uint8_t b : data) {
        crc ^= static_cast<std::uint16_t>(b) << 8;
        for (int i = 0; i < 8; ++i)
            crc = (crc & 0x8000) ? static_cast<std::uint16_t>((crc << 1) ^ 0x1021)
                                 : static_cast<std::uint16_t>(crc << 1);
    }
    return crc;
}

/// Byte-wise whitening sequence from an 8-bit LFSR (x^8+x^6+x^5+x^4+1,
/// seed 0xFF); applied symmetrically on encode and decode.
inline void whiten(std::vector<std::uint8_t>& bytes) {
    std::uint8_t s = 0xFF;
    for (auto& b : bytes) {
        b ^= s;
        for (int i = 0; i < 8; ++i) {
            const std::uint8_t fb = ((s >> 7) ^ (s >> 5) ^ (s >> 4) ^ (s >> 3)) & 1u;
            s = static_cast<std::uint8_t>((s << 1) | fb);
        }
    }
}

inline unsigned binary_to_gray(unsigned v) { return v ^ (v >> 1); }

inline unsigned gray_to_binary(unsigned v) {
    v ^= v >> 8;
    v ^= v >> 4;
    v ^= v >> 2;
    v ^= v >> 1;
    return v;
}

namespace detail {

/// Hamming(8,4) in the sx1272 bit order, punctured to 4+parity bits.
inline std::uint8_t hamming_encode(unsigned nibble, unsigned parity) {
    const unsigned d0 = nibble & 1, d1 = (nibble >> 1) & 1, d2 = (nibble >> 2) & 1,
                   d3 = (nibble >> 3) & 1;
    unsigned c = nibble & 0xF;
    c |= (d0 ^ d1 ^ d2) << 4;
    c |= (d1 ^ d2 ^ d3) << 5;
    c |= (d0 ^ d1 ^ d3) << 6;
    c |= (d0 ^ d2 ^ d3) << 7;
    return static_cast<std::uint8_t>(c & ((1u << (4 + parity)) - 1u));
}

inline int popcount8(unsigned v) { return __builtin_popcount(v & 0xFFu); }

/// Nearest-codeword decode; single-error correcting for 4/7 and 4/8,
/// best-effort for the detection-only rates.  `clean` reports an exact match.
inline unsigned hamming_decode(unsigned codeword, unsigned parity, bool* clean = nullptr) {
    unsigned best = 0;
    int best_dist = 99;
    for (unsigned nib = 0; nib < 16; ++nib) {
        const int d = popcount8(codeword ^ hamming_encode(nib, parity));
        if (d < best_dist) {
            best_dist = d;
            best = nib;
        }
    }
    if (clean) *clean = (best_dist == 0);
    return best;
}

/// Diagonal interleaver: symbol j bit b comes from codeword (b+j) mod sf_app
/// bit j.  Returns one sf_app-bit value per symbol.
inline std::vector<unsigned> interleave(const std::vector<std::uint8_t>& codewords,
                                        unsigned sf_app, unsigned n_sym) {
    std::vector<unsigned> symbols(n_sym, 0);
    for (unsigned j = 0; j < n_sym; ++j)
        for (unsigned b = 0; b < sf_app; ++b)
            if ((codewords[(b + j) % sf_app] >> j) & 1u) symbols[j] |= 1u << b;
    return symbols;
}

inline std::vector<std::uint8_t> deinterleave(const std::vector<unsigned>& symbols,
                                              unsigned sf_app, unsigned n_sym) {
    std::vector<std::uint8_t> codewords(sf_app, 0);
    for (unsigned j = 0; j < n_sym; ++j)
        for (unsigned b = 0; b < sf_app; ++b)
            if ((symbols[j] >> b) & 1u)
                codewords[(b + j) % sf_app] |= std::uint8_t(1u << j);
    return codewords;
}

} // namespace detail

/// Nibble stream (low nibble first) after CRC append and whitening.
inline std::vector<std::uint8_t> payload_nibbles(const FramePayload& payload) {
    std::vector<std::uint8_t> bytes = payload.bytes;
    if (payload.has_crc) {
        const std::uint16_t c = crc16(payload.bytes);
        bytes.push_back(static_cast<std::uint8_t>(c & 0xFF));
        bytes.push_back(static_cast<std::uint8_t>(c >> 8));
    }
    whiten(bytes);
    std::vector<std::uint8_t> nibbles;
    nibbles.reserve(2 * bytes.size());
    for (std::uint8_t b : bytes) {
        nibbles.push_back(b & 0xF);
        nibbles.push_back(b >> 4);
    }
    return nibbles;
}

/// Number of payload symbols for a given payload length (bytes).
inline unsigned payload_symbol_count(std::size_t payload_len, CodingRate cr, bool has_crc,
                                     unsigned sf) {
    const unsigned nibbles = 2 * static_cast<unsigned>(payload_len) + (has_crc ? 4u : 0u);
    const unsigned first_cap = sf - 2;
    unsigned n = 8;
    if (nibbles > first_cap) {
        const unsigned rest = nibbles - first_cap;
        const unsigned blocks = (rest + sf - 1) / sf;
        n += blocks * (4 + cr_parity_bits(cr));
    }
    return n;
}

/// Whitening -> Hamming -> diagonal interleave -> Gray mapping -> symbols.
inline std::vector<unsigned> encode(const FramePayload& payload, const LoRaParams& params) {
    if (payload.bytes.size() > 255) throw std::domain_error("payload exceeds 255 bytes");
    if (payload.low_data_rate_opt)
        throw std::invalid_argument("low data rate optimization is not implemented");
    params.validate();

    std::vector<std::uint8_t> nibbles = payload_nibbles(payload);
    const unsigned sf = params.sf;
    std::vector<unsigned> symbols;
    symbols.reserve(payload_symbol_count(payload.bytes.size(), payload.coding_rate,
                                         payload.has_crc, sf));

    std::size_t pos = 0;
    bool first = true;
    while (first || pos < nibbles.size()) {
        const unsigned sf_app = first ? sf - 2 : sf;
        const unsigned parity = first ? 4 : cr_parity_bits(payload.coding_rate);
        const unsigned n_sym = 4 + parity;
        std::vector<std::uint8_t> codewords(sf_app);
        for (unsigned i = 0; i < sf_app; ++i) {
            const unsigned nib = pos < nibbles.size() ? nibbles[pos] : 0u;
            ++pos;
            codewords[i] = detail::hamming_encode(nib, parity);
        }
        for (unsigned v : detail::interleave(codewords, sf_app, n_sym)) {
            unsigned m = gray_to_binary(v);
            if (first) m <<= 2;
            symbols.push_back(m);
        }
        first = false;
    }
    return symbols;
}

struct PayloadMeta {
    std::size_t payload_len = 0;
    CodingRate coding_rate = CodingRate::cr48;
    bool has_crc = true;
};

struct DecodeResult {
    std::vector<std::uint8_t> bytes;
    bool crc_ok = false;
};

/// Inverse chain; crc_ok reflects the CRC-16 check (false when has_crc is
/// unset).  Throws std::invalid_argument on a truncated symbol stream.
inline DecodeResult decode(const std::vector<unsigned>& symbols, const PayloadMeta& meta,
                           const LoRaParams& params) {
    const unsigned sf = params.sf;
    const unsigned m = params.symbol_bins();
    const unsigned expect =
        payload_symbol_count(meta.payload_len, meta.coding_rate, meta.has_crc, sf);
    if (symbols.size() < expect)
        throw std::invalid_argument("truncated symbol stream: have " +
                                    std::to_string(symbols.size()) + ", need " +
                                    std::to_string(expect));

    const unsigned nibble_count =
        2 * static_cast<unsigned>(meta.payload_len) + (meta.has_crc ? 4u : 0u);
    std::vector<std::uint8_t> nibbles;
    nibbles.reserve(nibble_count + sf);

    std::size_t sym_pos = 0;
    bool first = true;
    while (first || nibbles.size() < nibble_count) {
        const unsigned sf_app = first ? sf - 2 : sf;
        const unsigned parity = first ? 4 : cr_parity_bits(meta.coding_rate);
        const unsigned n_sym = 4 + parity;
        std::vector<unsigned> gray_vals(n_sym);
        for (unsigned j = 0; j < n_sym; ++j) {
            unsigned raw = symbols[sym_pos++] % m;
            unsigned g = first ? (((raw + 2) % m) >> 2) : raw;
            gray_vals[j] = binary_to_gray(g) & ((1u << sf_app) - 1u);
        }
        for (std::uint8_t cw : detail::deinterleave(gray_vals, sf_app, n_sym))
            nibbles.push_back(static_cast<std::uint8_t>(detail::hamming_decode(cw, parity)));
        first = false;
    }

    nibbles.resize(nibble_count);
    std::vector<std::uint8_t> bytes(nibble_count / 2);
    for (std::size_t i = 0; i < bytes.size(); ++i)
        bytes[i] = static_cast<std::uint8_t>(nibbles[2 * i] | (nibbles[2 * i + 1] << 4));
    whiten(bytes); // self-inverse

    DecodeResult res;
    if (meta.has_crc) {
        if (bytes.size() < 2) throw std::invalid_argument("stream too short for CRC");
        const std::uint16_t rx = static_cast<std::uint16_t>(
            bytes[bytes.size() - 2] | (bytes[bytes.size() - 1] << 8));
        bytes.resize(bytes.size() - 2);
        res.crc_ok = (crc16(bytes) == rx);
    }
    res.bytes = std::move(bytes);
    return res;
}

} // namespace lzn::phy
