#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rcsim/numerics.hpp"

namespace rcsim::adaptation {

using numerics::CMatrix;
using numerics::CVector;

struct CqiRow {
    double min_sinr_db = -std::numeric_limits<double>::infinity();
    int modulation = 4;
    double beta = 1.0;  // exponential-mapping calibration for this MCS
};

/// Modulation lookup table, rows sorted by ascending SINR threshold. The
/// defaults are placeholders exposed as configuration, not calibrated values.
struct CqiTable {
    std::vector<CqiRow> rows;

    static CqiTable defaults();
    static CqiTable from_json(const nlohmann::json& j);
    static CqiTable load(const std::string& path);

    void validate() const;
};

struct RankDecision {
    int rank = 1;                         // selected L
    std::vector<double> capacities;       // C_1 .. C_Nt
    std::vector<double> wideband_sv;      // singular values of the averaged channel
    std::vector<CMatrix> precoders;       // one Nt x L matrix per subband
    Eigen::MatrixXd subcarrier_sv;        // min(Nr,Nt) x Nsc per-subcarrier singular values
    int subband_size = 0;

    const CMatrix& precoder_for(int subcarrier) const;
};

/// Capacity-based rank selection: the wideband singular values come from the
/// subcarrier-averaged Gram matrix, C_L = sum_l log2(1 + Pt/(L sigma2)
/// lambda_l^2), and the largest C_L wins (ties to the smaller rank). The
/// per-subband precoder is the first L right-singular vectors of that
/// subband's averaged channel.
RankDecision rank_adapt(const std::vector<CMatrix>& h_per_subcarrier, double pt,
                        double sigma2, int subband_size);

/// X = Q S. Q must have orthonormal columns, so the symbol energy is
/// preserved.
CVector precode(const CVector& s, const CMatrix& q);

/// Effective SINR: -beta ln( mean(exp(-SINR_n / beta)) ).
double eesm(const std::vector<double>& sinrs, double beta);

struct McsDecision {
    double eff_sinr_linear = 0.0;
    int cqi = 0;  // row index in the table
    int modulation = 4;
    double beta = 1.0;
};

/// Highest table row whose threshold is <= the effective SINR (closed lower
/// bound); below every threshold the most robust row (QPSK) applies.
McsDecision link_adapt(double eff_sinr_linear, const CqiTable& table);

/// Per-subcarrier, per-stream SINR under ideal SVD precoding:
///   SINR_l(k) = Pt / (L sigma2) * lambda_l(k)^2.
Eigen::MatrixXd per_stream_sinr(const RankDecision& rd, double pt, double sigma2);

/// Wideband MCS selection: evaluates the exponential mapping with each row's
/// own beta and picks the highest row whose threshold is met.
McsDecision select_mcs(const std::vector<double>& sinrs, const CqiTable& table);

}  // namespace rcsim::adaptation
