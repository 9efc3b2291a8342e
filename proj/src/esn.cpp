#include "rcsim/esn.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "rcsim/rng.hpp"

namespace rcsim::esn {

namespace {

Complex split_tanh(Complex x) {
    return Complex(std::tanh(x.real()), std::tanh(x.imag()));
}

nlohmann::json matrix_to_json(const CMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

CMatrix matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.size();
    const auto cols = rows > 0 ? j.at(0).size() : 0;
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(r, c) = Complex(j.at(r).at(c).at(0).get<double>(),
                              j.at(r).at(c).at(1).get<double>());
        }
    }
    return m;
}

}  // namespace

double spectral_radius(const CMatrix& m) {
    Eigen::ComplexEigenSolver<CMatrix> eig(m, /*computeEigenvectors=*/false);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

TrainedEsn init_reservoir(const EsnConfig& cfg, int input_streams,
                          int output_streams, std::uint64_t seed) {
    if (cfg.spectral_radius >= 1.0 || cfg.spectral_radius <= 0.0) {
        throw ConfigError("init_reservoir: spectral radius must lie in (0, 1)");
    }
    if (cfg.neurons < 1 || cfg.window < 1 || cfg.cascade_depth < 1) {
        throw ConfigError("init_reservoir: neurons, window and cascade depth must be >= 1");
    }
    if (input_streams < 1 || output_streams < 1) {
        throw ConfigError("init_reservoir: stream counts must be >= 1");
    }

    TrainedEsn esn;
    esn.config = cfg;
    esn.input_streams = input_streams;
    esn.output_streams = output_streams;

    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    esn.w.resize(cfg.neurons, cfg.neurons);
    for (Eigen::Index r = 0; r < esn.w.rows(); ++r) {
        for (Eigen::Index c = 0; c < esn.w.cols(); ++c) {
            esn.w(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    const double radius = spectral_radius(esn.w);
    if (radius > 0.0) esn.w *= cfg.spectral_radius / radius;

    std::uniform_real_distribution<double> uni(-cfg.input_scale, cfg.input_scale);
    esn.w_in.resize(cfg.neurons, static_cast<Eigen::Index>(input_streams) * cfg.window);
    for (Eigen::Index r = 0; r < esn.w_in.rows(); ++r) {
        for (Eigen::Index c = 0; c < esn.w_in.cols(); ++c) {
            esn.w_in(r, c) = Complex(uni(rng), uni(rng));
        }
    }

    esn.w_out = CMatrix::Zero(output_streams, esn.state_dim());
    return esn;
}

CMatrix apply_window(const CMatrix& input, int nw) {
    if (nw < 1) throw ConfigError("apply_window: window length must be >= 1");
    const Eigen::Index rows = input.rows();
    const Eigen::Index t_count = input.cols();
    CMatrix out = CMatrix::Zero(rows * nw, t_count);
    for (Eigen::Index t = 0; t < t_count; ++t) {
        for (int lag = 0; lag < nw; ++lag) {
            // Oldest lag first: block `lag` holds the sample at t - nw + 1 + lag.
            const Eigen::Index src = t - (nw - 1) + lag;
            if (src >= 0) out.block(lag * rows, t, rows, 1) = input.col(src);
        }
    }
    return out;
}

StateRecord run_states_from(const TrainedEsn& esn, const CMatrix& windowed,
                            const CVector& initial_state) {
    if (windowed.rows() != esn.w_in.cols()) {
        throw DimensionError("run_states: windowed input does not match W_in");
    }
    const Eigen::Index t_count = windowed.cols();
    StateRecord rec;
    rec.z.resize(esn.state_dim(), t_count);
    CVector s = initial_state;
    CVector pre(esn.config.neurons);
    for (Eigen::Index t = 0; t < t_count; ++t) {
        pre.noalias() = esn.w * s;
        pre.noalias() += esn.w_in * windowed.col(t);
        s = pre.unaryExpr([](Complex x) { return split_tanh(x); });
        rec.z.col(t).head(esn.config.neurons) = s;
        rec.z.col(t).tail(windowed.rows()) = windowed.col(t);
    }
    return rec;
}

StateRecord run_states(const TrainedEsn& esn, const CMatrix& windowed) {
    return run_states_from(esn, windowed, CVector::Zero(esn.config.neurons));
}

CMatrix train_readout(const CMatrix& z, const CMatrix& targets, double ridge) {
    if (z.cols() == 0 || z.rows() == 0) throw InputError("train_readout: empty state record");
    if (targets.cols() != z.cols()) {
        throw DimensionError("train_readout: target column count does not match states");
    }
    if (ridge > 0.0) {
        const CMatrix gram = z * z.adjoint() +
                             ridge * CMatrix::Identity(z.rows(), z.rows());
        return gram.llt().solve(z * targets.adjoint()).adjoint().eval();
    }
    // Minimum-norm least squares: W^H solves Z^H A = X^H, which equals
    // targets * pinv(z).
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(z.adjoint());
    return cod.solve(targets.adjoint()).adjoint().eval();
}

DelayFit learn_delay(const TrainedEsn& esn, const CMatrix& pilot_input,
                     const CMatrix& pilot_target) {
    if (pilot_input.cols() != pilot_target.cols()) {
        throw DimensionError("learn_delay: input/target length mismatch");
    }
    const int d_max = std::max(0, esn.config.delay_max);
    const int step = std::max(1, esn.config.delay_step);
    const Eigen::Index t_count = pilot_input.cols();

    CMatrix padded = CMatrix::Zero(pilot_input.rows(), t_count + d_max);
    padded.leftCols(t_count) = pilot_input;
    const CMatrix windowed = apply_window(padded, esn.config.window);
    const StateRecord rec = run_states(esn, windowed);

    DelayFit fit;
    double best = std::numeric_limits<double>::infinity();
    std::vector<CMatrix> readouts;
    for (int d = 0; d <= d_max; d += step) {
        CMatrix target_d = CMatrix::Zero(pilot_target.rows(), t_count + d);
        target_d.rightCols(t_count) = pilot_target;
        const auto z_d = rec.z.leftCols(t_count + d);
        CMatrix w_out = train_readout(z_d, target_d, esn.config.ridge);
        const double residual2 = (w_out * z_d - target_d).squaredNorm();
        fit.grid.push_back(d);
        fit.grid_residual2.push_back(residual2);
        readouts.push_back(std::move(w_out));
        best = std::min(best, residual2);
    }
    // Smallest delay within tolerance of the minimum wins the tie.
    const double tol = 1e-9 * (1.0 + pilot_target.squaredNorm());
    for (std::size_t i = 0; i < fit.grid.size(); ++i) {
        if (fit.grid_residual2[i] <= best + tol) {
            fit.d_hat = fit.grid[i];
            fit.w_out = readouts[i];
            fit.residual2 = fit.grid_residual2[i];
            break;
        }
    }
    return fit;
}

void train(TrainedEsn& esn, const CMatrix& pilot_input, const CMatrix& pilot_target) {
    if (pilot_input.rows() != esn.input_streams) {
        throw DimensionError("train: input stream count does not match the reservoir");
    }
    if (pilot_target.rows() != esn.output_streams) {
        throw DimensionError("train: target stream count does not match the reservoir");
    }
    DelayFit fit = learn_delay(esn, pilot_input, pilot_target);
    esn.w_out = std::move(fit.w_out);
    esn.d_hat = fit.d_hat;
    esn.training_residual2 = fit.residual2;
    esn.trained = true;
}

CMatrix esn_equalize(const TrainedEsn& esn, const CMatrix& rx) {
    if (!esn.trained) throw StateError("esn_equalize: readout has not been trained");
    if (rx.rows() != esn.input_streams) {
        throw DimensionError("esn_equalize: stream count does not match the reservoir");
    }
    const Eigen::Index t_count = rx.cols();
    CMatrix padded = CMatrix::Zero(rx.rows(), t_count + esn.d_hat);
    padded.leftCols(t_count) = rx;
    const StateRecord rec = run_states(esn, apply_window(padded, esn.config.window));
    const CMatrix out = esn.w_out * rec.z;
    return out.rightCols(t_count);
}

std::vector<TrainedEsn> train_cascade(const EsnConfig& cfg, const CMatrix& rx_pilots,
                                      const CMatrix& tx_pilots, std::uint64_t seed) {
    std::vector<TrainedEsn> stages;
    stages.reserve(cfg.cascade_depth);
    CMatrix input = rx_pilots;
    for (int v = 0; v < cfg.cascade_depth; ++v) {
        TrainedEsn stage =
            init_reservoir(cfg, static_cast<int>(input.rows()),
                           static_cast<int>(tx_pilots.rows()), derive_seed(seed, v));
        train(stage, input, tx_pilots);
        input = esn_equalize(stage, input);
        stages.push_back(std::move(stage));
    }
    return stages;
}

CMatrix cascade_equalize(const std::vector<TrainedEsn>& stages, const CMatrix& rx) {
    if (stages.empty()) throw StateError("cascade_equalize: no trained stages");
    CMatrix signal = rx;
    for (const TrainedEsn& stage : stages) signal = esn_equalize(stage, signal);
    return signal;
}

nlohmann::json esn_to_json(const TrainedEsn& esn) {
    nlohmann::json j;
    j["neurons"] = esn.config.neurons;
    j["window"] = esn.config.window;
    j["spectral_radius"] = esn.config.spectral_radius;
    j["input_scale"] = esn.config.input_scale;
    j["delay_step"] = esn.config.delay_step;
    j["delay_max"] = esn.config.delay_max;
    j["cascade_depth"] = esn.config.cascade_depth;
    j["ridge"] = esn.config.ridge;
    j["input_streams"] = esn.input_streams;
    j["output_streams"] = esn.output_streams;
    j["d_hat"] = esn.d_hat;
    j["trained"] = esn.trained;
    j["training_residual2"] = esn.training_residual2;
    j["w_in"] = matrix_to_json(esn.w_in);
    j["w"] = matrix_to_json(esn.w);
    j["w_out"] = matrix_to_json(esn.w_out);
    return j;
}

TrainedEsn esn_from_json(const nlohmann::json& j) {
    TrainedEsn esn;
    esn.config.neurons = j.at("neurons").get<int>();
    esn.config.window = j.at("window").get<int>();
    esn.config.spectral_radius = j.at("spectral_radius").get<double>();
    esn.config.input_scale = j.at("input_scale").get<double>();
    esn.config.delay_step = j.at("delay_step").get<int>();
    esn.config.delay_max = j.at("delay_max").get<int>();
    esn.config.cascade_depth = j.at("cascade_depth").get<int>();
    esn.config.ridge = j.at("ridge").get<double>();
    esn.input_streams = j.at("input_streams").get<int>();
    esn.output_streams = j.at("output_streams").get<int>();
    esn.d_hat = j.at("d_hat").get<int>();
    esn.trained = j.at("trained").get<bool>();
    esn.training_residual2 = j.at("training_residual2").get<double>();
    esn.w_in = matrix_from_json(j.at("w_in"));
    esn.w = matrix_from_json(j.at("w"));
    esn.w_out = matrix_from_json(j.at("w_out"));
    return esn;
}

}  // namespace rcsim::esn
