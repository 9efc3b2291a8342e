#pragma once

#include <cstdint>
#include <vector>

#include "rcsim/esn.hpp"
#include "rcsim/ofdm.hpp"

namespace rcsim::baselines {

using numerics::CMatrix;
using numerics::CVector;

/// Per-subcarrier channel estimate used by the linear detector.
struct CsiEstimate {
    std::vector<CMatrix> h;  // one nr x nt matrix per subcarrier
    double sigma2 = 0.0;
    bool underdetermined = false;  // fewer pilots than streams
};

/// Per-subcarrier regularized least-squares channel estimate from the pilot
/// observations.
CsiEstimate estimate_csi(const std::vector<CMatrix>& y_pilots,
                         const std::vector<CMatrix>& x_pilots, double sigma2);

/// MMSE equalizer x_hat = H^H (H H^H + sigma2 I)^-1 y; falls back to the
/// pseudo-inverse when the regularized matrix is singular (sigma2 == 0 with a
/// rank-deficient H).
CVector lmmse_equalize(const CVector& y, const CMatrix& h, double sigma2);

/// Linear detection of the data symbols: per-subcarrier MMSE equalization
/// followed by nearest-neighbor slicing. Returns bits in the
/// SubframeGrid::data_bits layout.
std::vector<std::uint8_t> lmmse_detect(const std::vector<CMatrix>& y_data,
                                       const CsiEstimate& csi,
                                       const qam::QamConstellation& constellation);

/// Reservoir pipeline with plain slicing: equalize in the time domain,
/// demodulate, then slice each data symbol to the nearest constellation
/// point.
std::vector<std::uint8_t> rcnet_detect(const std::vector<esn::TrainedEsn>& cascade,
                                       const ofdm::TimeSignal& rx, int np,
                                       const qam::QamConstellation& constellation);

/// Slices a list of frequency-domain data symbols (shared by the baselines).
std::vector<std::uint8_t> slice_symbols(const std::vector<CMatrix>& data_symbols,
                                        const qam::QamConstellation& constellation);

}  // namespace rcsim::baselines
