#include "rcsim/adaptation.hpp"

#include <cmath>
#include <fstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

namespace rcsim::adaptation {

CqiTable CqiTable::defaults() {
    CqiTable t;
    t.rows = {
        {-std::numeric_limits<double>::infinity(), 4, 1.49},
        {10.0, 16, 5.01},
        {18.0, 64, 10.0},
    };
    return t;
}

CqiTable CqiTable::from_json(const nlohmann::json& j) {
    CqiTable t;
    for (const auto& row : j) {
        CqiRow r;
        const auto& thr = row.at("min_sinr_db");
        if (thr.is_string()) {
            const std::string s = thr.get<std::string>();
            if (s == "-inf") {
                r.min_sinr_db = -std::numeric_limits<double>::infinity();
            } else {
                throw ConfigError("cqi table: bad threshold '" + s + "'");
            }
        } else {
            r.min_sinr_db = thr.get<double>();
        }
        r.modulation = row.at("modulation").get<int>();
        r.beta = row.at("beta").get<double>();
        t.rows.push_back(r);
    }
    t.validate();
    return t;
}

CqiTable CqiTable::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cqi table: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return from_json(j);
}

void CqiTable::validate() const {
    if (rows.empty()) throw ConfigError("cqi table: empty");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].beta <= 0.0) throw ConfigError("cqi table: beta must be positive");
        if (rows[i].modulation != 4 && rows[i].modulation != 16 &&
            rows[i].modulation != 64) {
            throw ConfigError("cqi table: unsupported modulation order");
        }
        if (i > 0 && rows[i].min_sinr_db < rows[i - 1].min_sinr_db) {
            throw ConfigError("cqi table: rows must be sorted by threshold");
        }
    }
}

const CMatrix& RankDecision::precoder_for(int subcarrier) const {
    return precoders.at(static_cast<std::size_t>(subcarrier) / subband_size);
}

RankDecision rank_adapt(const std::vector<CMatrix>& h_per_subcarrier, double pt,
                        double sigma2, int subband_size) {
    if (h_per_subcarrier.empty()) throw InputError("rank_adapt: no channel estimates");
    if (pt <= 0.0 || sigma2 <= 0.0) {
        throw InputError("rank_adapt: Pt and sigma2 must be positive");
    }
    if (subband_size < 1) throw ConfigError("rank_adapt: subband size must be >= 1");
    const Eigen::Index nt = h_per_subcarrier[0].cols();
    const Eigen::Index nr = h_per_subcarrier[0].rows();
    const Eigen::Index nsc = static_cast<Eigen::Index>(h_per_subcarrier.size());

    RankDecision rd;
    rd.subband_size = subband_size;

    CMatrix gram = CMatrix::Zero(nt, nt);
    for (const CMatrix& h : h_per_subcarrier) gram += h.adjoint() * h;
    gram /= static_cast<double>(nsc);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    // Eigenvalues come out ascending; we want descending singular values.
    for (Eigen::Index i = eig.eigenvalues().size() - 1; i >= 0; --i) {
        rd.wideband_sv.push_back(std::sqrt(std::max(0.0, eig.eigenvalues()(i))));
    }

    double best = -std::numeric_limits<double>::infinity();
    for (int rank = 1; rank <= nt; ++rank) {
        double c = 0.0;
        for (int l = 0; l < rank && l < static_cast<int>(rd.wideband_sv.size()); ++l) {
            const double lambda2 = rd.wideband_sv[l] * rd.wideband_sv[l];
            c += std::log2(1.0 + pt / (rank * sigma2) * lambda2);
        }
        rd.capacities.push_back(c);
        if (c > best) {
            best = c;
            rd.rank = rank;
        }
    }

    const int subbands = static_cast<int>((nsc + subband_size - 1) / subband_size);
    for (int s = 0; s < subbands; ++s) {
        const Eigen::Index k0 = static_cast<Eigen::Index>(s) * subband_size;
        const Eigen::Index k1 = std::min(nsc, k0 + subband_size);
        CMatrix mean = CMatrix::Zero(nr, nt);
        for (Eigen::Index k = k0; k < k1; ++k) mean += h_per_subcarrier[k];
        mean /= static_cast<double>(k1 - k0);
        Eigen::JacobiSVD<CMatrix> dec(mean, Eigen::ComputeThinV);
        rd.precoders.push_back(dec.matrixV().leftCols(rd.rank));
    }

    rd.subcarrier_sv.resize(std::min(nr, nt), nsc);
    for (Eigen::Index k = 0; k < nsc; ++k) {
        Eigen::JacobiSVD<CMatrix> dec(h_per_subcarrier[k]);
        rd.subcarrier_sv.col(k) = dec.singularValues();
    }
    return rd;
}

CVector precode(const CVector& s, const CMatrix& q) {
    if (s.size() != q.cols()) throw DimensionError("precode: dimension mismatch");
    return q * s;
}

double eesm(const std::vector<double>& sinrs, double beta) {
    if (sinrs.empty()) throw InputError("eesm: empty SINR list");
    if (beta <= 0.0) throw InputError("eesm: beta must be positive");
    double acc = 0.0;
    for (const double s : sinrs) acc += std::exp(-s / beta);
    return -beta * std::log(acc / static_cast<double>(sinrs.size()));
}

McsDecision link_adapt(double eff_sinr_linear, const CqiTable& table) {
    table.validate();
    const double eff_db = 10.0 * std::log10(eff_sinr_linear);
    McsDecision mcs;
    mcs.eff_sinr_linear = eff_sinr_linear;
    mcs.cqi = 0;
    mcs.modulation = 4;  // most robust fallback below every threshold
    mcs.beta = table.rows.front().beta;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].min_sinr_db <= eff_db) {
            mcs.cqi = static_cast<int>(i);
            mcs.modulation = table.rows[i].modulation;
            mcs.beta = table.rows[i].beta;
        }
    }
    return mcs;
}

Eigen::MatrixXd per_stream_sinr(const RankDecision& rd, double pt, double sigma2) {
    const Eigen::Index nsc = rd.subcarrier_sv.cols();
    Eigen::MatrixXd sinr(rd.rank, nsc);
    for (Eigen::Index k = 0; k < nsc; ++k) {
        for (int l = 0; l < rd.rank; ++l) {
            const double lambda = rd.subcarrier_sv(l, k);
            sinr(l, k) = pt / (rd.rank * sigma2) * lambda * lambda;
        }
    }
    return sinr;
}

McsDecision select_mcs(const std::vector<double>& sinrs, const CqiTable& table) {
    table.validate();
    McsDecision best;
    best.cqi = 0;
    best.modulation = 4;
    best.beta = table.rows.front().beta;
    best.eff_sinr_linear = eesm(sinrs, best.beta);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const double eff = eesm(sinrs, table.rows[i].beta);
        if (table.rows[i].min_sinr_db <= 10.0 * std::log10(eff)) {
            best.cqi = static_cast<int>(i);
            best.modulation = table.rows[i].modulation;
            best.beta = table.rows[i].beta;
            best.eff_sinr_linear = eff;
        }
    }
    return best;
}

}  // namespace rcsim::adaptation
