#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rcsim/qam.hpp"

namespace rcsim::ofdm {

using numerics::CMatrix;
using numerics::Complex;

struct SubframeConfig {
    int nt = 2;
    int nsc = 64;
    int ncp = 16;
    int np = 4;
    int nd = 16;
    int mod_order = 16;
};

/// One subframe in the frequency domain: Np pilot symbols followed by Nd data
/// symbols, each an Nt x Nsc grid of constellation points. Immutable after
/// construction.
struct SubframeGrid {
    SubframeConfig cfg;
    std::vector<CMatrix> symbols;         // N = np + nd entries, each nt x nsc
    std::vector<std::uint8_t> data_bits;  // [data symbol][stream][subcarrier][bit]

    int n_symbols() const { return cfg.np + cfg.nd; }
    bool is_pilot(int n) const { return n < cfg.np; }
    int bits_per_stream_symbol() const;

    /// Source bits of one (data symbol, stream) row, Nsc * log2(M) of them.
    std::span<const std::uint8_t> data_bits_for(int data_symbol, int stream) const;

    /// Condition number of the stacked Nt x Np pilot matrix at subcarrier k
    /// (diagnostic; random pilots can be ill-conditioned for small Np).
    double pilot_condition(int subcarrier) const;
};

/// Time-domain signal: one row per antenna/stream, (Nsc + Ncp) samples per
/// OFDM symbol, CP prepended.
struct TimeSignal {
    CMatrix samples;
    int nsc = 0;
    int ncp = 0;

    int span() const { return nsc + ncp; }
    int n_symbols() const {
        return span() == 0 ? 0 : static_cast<int>(samples.cols()) / span();
    }
};

/// IFFT per stream and symbol with cyclic-prefix insertion.
TimeSignal ofdm_modulate(const SubframeGrid& grid);

/// Core of ofdm_modulate for a raw list of frequency-domain symbols.
TimeSignal ofdm_modulate_symbols(const std::vector<CMatrix>& symbols, int nsc, int ncp);

/// CP removal and FFT per stream and symbol.
std::vector<CMatrix> ofdm_demodulate(const TimeSignal& sig);

/// Builds a subframe with uniformly random pilot constellation points and
/// uniformly random data bits. Deterministic for a fixed seed.
SubframeGrid build_subframe(const SubframeConfig& cfg, std::uint64_t seed);

/// Debug serialization of a frequency grid (complex entries as [re, im]).
nlohmann::json grid_to_json(const SubframeGrid& grid);

}  // namespace rcsim::ofdm
