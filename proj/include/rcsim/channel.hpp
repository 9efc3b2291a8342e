#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rcsim/ofdm.hpp"

namespace rcsim::channel {

using numerics::CMatrix;
using numerics::Complex;
using numerics::CVector;

/// Quasi-static multipath MIMO channel: one set of taps per (rx, tx) pair,
/// exponential power-delay profile normalized to unit total power.
struct ChannelRealization {
    int nt = 0;
    int nr = 0;
    int lc = 0;
    double decay = 1.0;
    std::vector<CMatrix> taps;  // lc entries, each nr x nt

    CVector tap_vector(int rx, int tx) const;
};

/// Memoryless saturating amplifier. The response is
///   phi(x) = x / (1 + (|x|/x_sat)^(2 rho))^(0.5 rho)
/// with the exponent 0.5*rho kept as printed (this deviates from the common
/// Rapp convention of 1/(2 rho), where the curve would saturate at x_sat;
/// here the response peaks below x_sat and then rolls off). `ibo_db` is the
/// input back-off: the drive level is chosen so the mean input power equals
/// x_sat^2 / 10^(ibo_db/10), and the output is scaled back by the same
/// factor so the linear region is transparent.
struct PaModel {
    bool enabled = false;
    double x_sat = 1.0;
    double rho = 3.0;
    double ibo_db = 6.0;
};

struct NoiseSpec {
    double sigma2 = 0.0;  // variance per complex sample
};

/// Saturating response applied to a single sample; the phase is preserved.
Complex rapp_pa(Complex x, const PaModel& pa);

/// Amplitude |phi(r)| of the saturating response (test/diagnostic helper).
double rapp_pa_magnitude(double r, const PaModel& pa);

/// i.i.d. CN(0, p_l) taps with p_l proportional to exp(-l / decay) and
/// sum_l p_l == 1 per antenna pair. `ncp` bounds the delay spread:
/// lc > ncp is a ConfigError (inter-symbol interference after CP removal).
ChannelRealization generate_channel(int lc, double decay, int nt, int nr,
                                    std::uint64_t seed, int ncp);

/// Per-symbol circular convolution with the channel taps, optional PA
/// nonlinearity on the transmit signal, and additive CN(0, sigma2) noise.
ofdm::TimeSignal apply_channel(const ofdm::TimeSignal& tx,
                               const ChannelRealization& ch,
                               const NoiseSpec& noise, const PaModel& pa,
                               std::uint64_t seed);

/// Noise variance for an Eb/N0 point:
///   sigma2 = Nt * Es / (bits_per_symbol * 10^(ebn0_db / 10)),  Es = 1.
/// The convention is per complex receive sample with the unit-energy
/// constellation; curves are reproducible bit-exactly given this formula.
double ebn0_to_sigma2(double ebn0_db, int bits_per_symbol, int nt, int nr);

nlohmann::json channel_to_json(const ChannelRealization& ch);
ChannelRealization channel_from_json(const nlohmann::json& j);

}  // namespace rcsim::channel
