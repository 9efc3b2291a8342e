#include "rcsim/ofdm.hpp"

#include <nlohmann/json.hpp>

#include "rcsim/rng.hpp"

namespace rcsim::ofdm {

int SubframeGrid::bits_per_stream_symbol() const {
    return cfg.nsc * qam::QamConstellation::make(cfg.mod_order).bits_per_symbol;
}

std::span<const std::uint8_t> SubframeGrid::data_bits_for(int data_symbol,
                                                          int stream) const {
    const int row = bits_per_stream_symbol();
    const std::size_t offset =
        (static_cast<std::size_t>(data_symbol) * cfg.nt + stream) * row;
    return {data_bits.data() + offset, static_cast<std::size_t>(row)};
}

double SubframeGrid::pilot_condition(int subcarrier) const {
    CMatrix p(cfg.nt, cfg.np);
    for (int n = 0; n < cfg.np; ++n) p.col(n) = symbols[n].col(subcarrier);
    const auto sv = numerics::svd(p).sigma;
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

TimeSignal ofdm_modulate_symbols(const std::vector<CMatrix>& symbols, int nsc,
                                 int ncp) {
    if (ncp >= nsc) throw ConfigError("ofdm: cyclic prefix must be shorter than Nsc");
    if (ncp < 0) throw ConfigError("ofdm: negative cyclic prefix");
    const int n = static_cast<int>(symbols.size());
    const int rows = n > 0 ? static_cast<int>(symbols[0].rows()) : 0;
    TimeSignal sig;
    sig.nsc = nsc;
    sig.ncp = ncp;
    sig.samples.resize(rows, static_cast<Eigen::Index>(n) * (nsc + ncp));
    for (int s = 0; s < n; ++s) {
        if (symbols[s].cols() != nsc || symbols[s].rows() != rows) {
            throw DimensionError("ofdm_modulate: inconsistent grid dimensions");
        }
        for (int r = 0; r < rows; ++r) {
            const numerics::CVector body =
                numerics::ifft(symbols[s].row(r).transpose(), nsc);
            const Eigen::Index base = static_cast<Eigen::Index>(s) * (nsc + ncp);
            sig.samples.row(r).segment(base, ncp) =
                body.tail(ncp).transpose();
            sig.samples.row(r).segment(base + ncp, nsc) = body.transpose();
        }
    }
    return sig;
}

TimeSignal ofdm_modulate(const SubframeGrid& grid) {
    return ofdm_modulate_symbols(grid.symbols, grid.cfg.nsc, grid.cfg.ncp);
}

std::vector<CMatrix> ofdm_demodulate(const TimeSignal& sig) {
    const int span = sig.span();
    if (span <= 0 || sig.samples.cols() % span != 0) {
        throw DimensionError("ofdm_demodulate: sample count is not a multiple of Nsc + Ncp");
    }
    const int n = static_cast<int>(sig.samples.cols()) / span;
    std::vector<CMatrix> out(n);
    for (int s = 0; s < n; ++s) {
        out[s].resize(sig.samples.rows(), sig.nsc);
        for (Eigen::Index r = 0; r < sig.samples.rows(); ++r) {
            const numerics::CVector body =
                sig.samples.row(r)
                    .segment(static_cast<Eigen::Index>(s) * span + sig.ncp, sig.nsc)
                    .transpose();
            out[s].row(r) = numerics::fft(body, sig.nsc).transpose();
        }
    }
    return out;
}

SubframeGrid build_subframe(const SubframeConfig& cfg, std::uint64_t seed) {
    if (cfg.np < 1) throw ConfigError("build_subframe: at least one pilot symbol required");
    if (cfg.nd < 0) throw ConfigError("build_subframe: negative data symbol count");
    if (cfg.nt < 1) throw ConfigError("build_subframe: at least one stream required");
    const auto constellation = qam::QamConstellation::make(cfg.mod_order);

    SubframeGrid grid;
    grid.cfg = cfg;
    grid.symbols.assign(cfg.np + cfg.nd, CMatrix(cfg.nt, cfg.nsc));

    Rng rng(seed);
    std::uniform_int_distribution<int> point(0, cfg.mod_order - 1);
    for (int n = 0; n < cfg.np; ++n) {
        for (int t = 0; t < cfg.nt; ++t) {
            for (int k = 0; k < cfg.nsc; ++k) {
                grid.symbols[n](t, k) = constellation.points[point(rng)];
            }
        }
    }

    std::uniform_int_distribution<int> bit(0, 1);
    const int m = constellation.bits_per_symbol;
    grid.data_bits.resize(static_cast<std::size_t>(cfg.nd) * cfg.nt * cfg.nsc * m);
    for (auto& b : grid.data_bits) b = static_cast<std::uint8_t>(bit(rng));
    for (int d = 0; d < cfg.nd; ++d) {
        for (int t = 0; t < cfg.nt; ++t) {
            const auto row = grid.data_bits_for(d, t);
            const auto syms = qam::qam_modulate(row, constellation);
            for (int k = 0; k < cfg.nsc; ++k) grid.symbols[cfg.np + d](t, k) = syms[k];
        }
    }
    return grid;
}

nlohmann::json grid_to_json(const SubframeGrid& grid) {
    nlohmann::json j;
    j["nt"] = grid.cfg.nt;
    j["nsc"] = grid.cfg.nsc;
    j["np"] = grid.cfg.np;
    j["nd"] = grid.cfg.nd;
    j["mod_order"] = grid.cfg.mod_order;
    nlohmann::json syms = nlohmann::json::array();
    for (const auto& sym : grid.symbols) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < sym.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < sym.cols(); ++c) {
                row.push_back({sym(r, c).real(), sym(r, c).imag()});
            }
            rows.push_back(std::move(row));
        }
        syms.push_back(std::move(rows));
    }
    j["symbols"] = std::move(syms);
    return j;
}

}  // namespace rcsim::ofdm
