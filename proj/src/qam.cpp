#include "rcsim/qam.hpp"

#include <cmath>

namespace rcsim::qam {

namespace {

unsigned gray_encode(unsigned v) { return v ^ (v >> 1); }

unsigned gray_decode(unsigned g) {
    unsigned v = 0;
    for (; g != 0; g >>= 1) v ^= g;
    return v;
}

}  // namespace

QamConstellation QamConstellation::make(int order) {
    if (order != 4 && order != 16 && order != 64) {
        throw ConfigError("qam: unsupported modulation order " + std::to_string(order));
    }
    QamConstellation c;
    c.order = order;
    c.bits_per_symbol = static_cast<int>(std::lround(std::log2(order)));
    c.bits_per_axis = c.bits_per_symbol / 2;
    // Mean energy of the odd-integer grid is 2 (M - 1) / 3.
    c.scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    c.points.resize(order);
    for (unsigned idx = 0; idx < static_cast<unsigned>(order); ++idx) {
        unsigned i_pattern = 0;
        unsigned q_pattern = 0;
        for (int b = 0; b < c.bits_per_symbol; ++b) {
            const unsigned bit = (idx >> (c.bits_per_symbol - 1 - b)) & 1u;
            if (b % 2 == 0) {
                i_pattern = (i_pattern << 1) | bit;
            } else {
                q_pattern = (q_pattern << 1) | bit;
            }
        }
        c.points[idx] = c.point_from_amplitudes(c.amplitude_from_axis_bits(i_pattern),
                                                c.amplitude_from_axis_bits(q_pattern));
    }
    return c;
}

int QamConstellation::amplitude_from_axis_bits(unsigned pattern) const {
    const int v = static_cast<int>(gray_decode(pattern));
    return (axis_levels() - 1) - 2 * v;
}

unsigned QamConstellation::axis_bits_from_amplitude(int amplitude) const {
    const int v = ((axis_levels() - 1) - amplitude) / 2;
    if (v < 0 || v >= axis_levels() || std::abs(amplitude) % 2 != 1) {
        throw InputError("qam: amplitude outside the constellation grid");
    }
    return gray_encode(static_cast<unsigned>(v));
}

Complex QamConstellation::point_from_amplitudes(int re_amp, int im_amp) const {
    return scale * Complex(static_cast<double>(re_amp), static_cast<double>(im_amp));
}

unsigned QamConstellation::index_from_amplitudes(int re_amp, int im_amp) const {
    const unsigned i_pattern = axis_bits_from_amplitude(re_amp);
    const unsigned q_pattern = axis_bits_from_amplitude(im_amp);
    unsigned idx = 0;
    for (int b = 0; b < bits_per_symbol; ++b) {
        const int axis_bit = bits_per_axis - 1 - b / 2;
        const unsigned bit = (b % 2 == 0 ? i_pattern : q_pattern) >> axis_bit & 1u;
        idx = (idx << 1) | bit;
    }
    return idx;
}

std::vector<Complex> qam_modulate(std::span<const std::uint8_t> bits,
                                  const QamConstellation& c) {
    if (bits.size() % c.bits_per_symbol != 0) {
        throw DimensionError("qam_modulate: bit count not divisible by log2(M)");
    }
    std::vector<Complex> out;
    out.reserve(bits.size() / c.bits_per_symbol);
    for (std::size_t i = 0; i < bits.size(); i += c.bits_per_symbol) {
        unsigned idx = 0;
        for (int b = 0; b < c.bits_per_symbol; ++b) {
            idx = (idx << 1) | (bits[i + b] & 1u);
        }
        out.push_back(c.points[idx]);
    }
    return out;
}

std::vector<std::uint8_t> qam_demodulate_nearest(std::span<const Complex> symbols,
                                                 const QamConstellation& c) {
    std::vector<std::uint8_t> bits;
    bits.reserve(symbols.size() * c.bits_per_symbol);
    for (const Complex& s : symbols) {
        unsigned best = 0;
        double best_d2 = std::norm(s - c.points[0]);
        for (unsigned idx = 1; idx < c.points.size(); ++idx) {
            const double d2 = std::norm(s - c.points[idx]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = idx;
            }
        }
        for (int b = c.bits_per_symbol - 1; b >= 0; --b) {
            bits.push_back(static_cast<std::uint8_t>((best >> b) & 1u));
        }
    }
    return bits;
}

}  // namespace rcsim::qam
