#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rcsim/numerics.hpp"

namespace rcsim::qam {

using numerics::Complex;

/// Square Gray-coded QAM alphabet with unit average symbol energy.
///
/// Bit convention: with m = log2(M) bits per symbol, even-indexed bits select
/// the I amplitude and odd-indexed bits the Q amplitude, each axis using a
/// reflected Gray code whose all-zero pattern maps to the most positive
/// amplitude. Points are indexed by the integer value of their bit pattern
/// (bit 0 is the most significant); this ordering defines the nearest-neighbor
/// tie rule.
struct QamConstellation {
    int order = 0;            // M in {4, 16, 64}
    int bits_per_symbol = 0;  // log2 M
    int bits_per_axis = 0;
    double scale = 1.0;       // 1 / sqrt(2 (M - 1) / 3)
    std::vector<Complex> points;

    static QamConstellation make(int order);

    int axis_levels() const { return 1 << bits_per_axis; }

    /// Odd-integer amplitude for an axis bit pattern (pattern 0 -> most
    /// positive).
    int amplitude_from_axis_bits(unsigned pattern) const;

    /// Inverse of amplitude_from_axis_bits.
    unsigned axis_bits_from_amplitude(int amplitude) const;

    /// Normalized constellation point for a pair of odd-integer amplitudes.
    Complex point_from_amplitudes(int re_amp, int im_amp) const;

    /// Point index (== bit pattern value) for a pair of amplitudes.
    unsigned index_from_amplitudes(int re_amp, int im_amp) const;
};

/// Gray-maps a bit sequence; the bit count must divide log2(M).
std::vector<Complex> qam_modulate(std::span<const std::uint8_t> bits,
                                  const QamConstellation& c);

/// Minimum-distance slicing; ties resolve to the lower point index.
std::vector<std::uint8_t> qam_demodulate_nearest(std::span<const Complex> symbols,
                                                 const QamConstellation& c);

}  // namespace rcsim::qam
