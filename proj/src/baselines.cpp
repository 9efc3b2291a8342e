#include "rcsim/baselines.hpp"

namespace rcsim::baselines {

CsiEstimate estimate_csi(const std::vector<CMatrix>& y_pilots,
                         const std::vector<CMatrix>& x_pilots, double sigma2) {
    if (y_pilots.empty() || y_pilots.size() != x_pilots.size()) {
        throw DimensionError("estimate_csi: pilot grids do not align");
    }
    const Eigen::Index np = static_cast<Eigen::Index>(y_pilots.size());
    const Eigen::Index nr = y_pilots[0].rows();
    const Eigen::Index nt = x_pilots[0].rows();
    const Eigen::Index nsc = y_pilots[0].cols();

    CsiEstimate csi;
    csi.sigma2 = sigma2;
    csi.underdetermined = np < nt;
    csi.h.resize(nsc);
    CMatrix y(nr, np);
    CMatrix x(nt, np);
    for (Eigen::Index k = 0; k < nsc; ++k) {
        for (Eigen::Index p = 0; p < np; ++p) {
            y.col(p) = y_pilots[p].col(k);
            x.col(p) = x_pilots[p].col(k);
        }
        csi.h[k] = numerics::lmmse_estimate(y, x, sigma2);
    }
    return csi;
}

CVector lmmse_equalize(const CVector& y, const CMatrix& h, double sigma2) {
    if (y.size() != h.rows()) throw DimensionError("lmmse_equalize: dimension mismatch");
    const CMatrix gram =
        h * h.adjoint() + sigma2 * CMatrix::Identity(h.rows(), h.rows());
    if (sigma2 > 0.0) {
        Eigen::LLT<CMatrix> llt(gram);
        if (llt.info() == Eigen::Success) return h.adjoint() * llt.solve(y);
    } else {
        Eigen::FullPivLU<CMatrix> lu(gram);
        if (lu.isInvertible()) return h.adjoint() * lu.solve(y);
    }
    return h.adjoint() * numerics::pseudo_inverse(gram) * y;
}

std::vector<std::uint8_t> slice_symbols(const std::vector<CMatrix>& data_symbols,
                                        const qam::QamConstellation& constellation) {
    std::vector<std::uint8_t> bits;
    if (data_symbols.empty()) return bits;
    const Eigen::Index nt = data_symbols[0].rows();
    const Eigen::Index nsc = data_symbols[0].cols();
    bits.reserve(data_symbols.size() * nt * nsc * constellation.bits_per_symbol);
    std::vector<numerics::Complex> row(nsc);
    for (const CMatrix& sym : data_symbols) {
        for (Eigen::Index t = 0; t < nt; ++t) {
            for (Eigen::Index k = 0; k < nsc; ++k) row[k] = sym(t, k);
            const auto sliced = qam::qam_demodulate_nearest(row, constellation);
            bits.insert(bits.end(), sliced.begin(), sliced.end());
        }
    }
    return bits;
}

std::vector<std::uint8_t> lmmse_detect(const std::vector<CMatrix>& y_data,
                                       const CsiEstimate& csi,
                                       const qam::QamConstellation& constellation) {
    if (y_data.empty()) return {};
    const Eigen::Index nsc = y_data[0].cols();
    if (static_cast<std::size_t>(nsc) != csi.h.size()) {
        throw DimensionError("lmmse_detect: CSI does not cover every subcarrier");
    }
    const Eigen::Index nt = csi.h[0].cols();
    std::vector<CMatrix> equalized(y_data.size(), CMatrix(nt, nsc));
    for (std::size_t n = 0; n < y_data.size(); ++n) {
        for (Eigen::Index k = 0; k < nsc; ++k) {
            equalized[n].col(k) = lmmse_equalize(y_data[n].col(k), csi.h[k], csi.sigma2);
        }
    }
    return slice_symbols(equalized, constellation);
}

std::vector<std::uint8_t> rcnet_detect(const std::vector<esn::TrainedEsn>& cascade,
                                       const ofdm::TimeSignal& rx, int np,
                                       const qam::QamConstellation& constellation) {
    ofdm::TimeSignal equalized;
    equalized.nsc = rx.nsc;
    equalized.ncp = rx.ncp;
    equalized.samples = esn::cascade_equalize(cascade, rx.samples);
    const std::vector<CMatrix> grid = ofdm::ofdm_demodulate(equalized);
    const std::vector<CMatrix> data(grid.begin() + np, grid.end());
    return slice_symbols(data, constellation);
}

}  // namespace rcsim::baselines
