#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rcsim/numerics.hpp"

namespace rcsim::esn {

using numerics::CMatrix;
using numerics::Complex;
using numerics::CVector;

struct EsnConfig {
    int neurons = 16;              // reservoir size Nn
    int window = 16;               // sliding-window length Nw
    double spectral_radius = 0.9;  // must stay below 1 (echo state property)
    double input_scale = 0.05;
    int delay_step = 5;            // grid step for the delay search
    int delay_max = 16;            // search range [0, delay_max], usually Ncp
    int cascade_depth = 2;         // number of cascaded stages V
    double ridge = 0.0;            // optional readout regularization
};

/// Echo-state network with fixed random input/reservoir weights and a
/// least-squares readout. Immutable after training.
struct TrainedEsn {
    EsnConfig config;
    int input_streams = 0;   // rows of the raw input signal
    int output_streams = 0;
    CMatrix w_in;            // neurons x (input_streams * window)
    CMatrix w;               // neurons x neurons, spectral radius == target
    CMatrix w_out;           // output_streams x (neurons + input_streams * window)
    int d_hat = 0;           // learned delay, samples
    bool trained = false;
    double training_residual2 = std::numeric_limits<double>::infinity();

    int state_dim() const { return config.neurons + input_streams * config.window; }
};

/// Concatenated states [s(t); u(t)] recorded over a run.
struct StateRecord {
    CMatrix z;  // state_dim x T
};

/// Random reservoir: w ~ complex Gaussian rescaled to the target spectral
/// radius, w_in uniform on [-input_scale, input_scale] per real/imag part.
/// The readout starts at zero; deterministic per seed.
TrainedEsn init_reservoir(const EsnConfig& cfg, int input_streams,
                          int output_streams, std::uint64_t seed);

/// Spectral radius by dense eigendecomposition (also the test oracle target).
double spectral_radius(const CMatrix& m);

/// Stacks a sliding window of `nw` past samples per time step, oldest lag
/// first, zero-padded before t = 0. nw == 1 is the identity.
CMatrix apply_window(const CMatrix& input, int nw);

/// State recursion s(t) = tanh(W s(t-1) + W_in u(t)) from s(-1) = 0, with
/// tanh applied to real and imaginary parts separately.
StateRecord run_states(const TrainedEsn& esn, const CMatrix& windowed);

/// Same recursion from an explicit initial state (echo-state tests).
StateRecord run_states_from(const TrainedEsn& esn, const CMatrix& windowed,
                            const CVector& initial_state);

/// Least-squares readout W_out = targets * pinv(Z) (minimum-norm solution);
/// ridge > 0 switches to the regularized normal equations.
CMatrix train_readout(const CMatrix& z, const CMatrix& targets, double ridge = 0.0);

struct DelayFit {
    int d_hat = 0;
    CMatrix w_out;
    double residual2 = 0.0;
    std::vector<double> grid_residual2;  // residual per candidate, in grid order
    std::vector<int> grid;               // the candidate delays
};

/// Delay search: for each d in {0, p, 2p, ... <= delay_max} the input gets d
/// zero samples appended and the target d zero samples prepended before the
/// readout fit. Returns the delay with the smallest residual; candidates
/// within 1e-9 * (1 + ||target||_F^2) of the minimum count as ties and the
/// smallest such delay wins (exact ties never happen in floating point).
DelayFit learn_delay(const TrainedEsn& esn, const CMatrix& pilot_input,
                     const CMatrix& pilot_target);

/// learn_delay + stores the winning readout/delay into the network.
void train(TrainedEsn& esn, const CMatrix& pilot_input, const CMatrix& pilot_target);

/// Runs the trained network over an input signal and advances the output by
/// d_hat samples to undo the training delay. Output length equals the input
/// length.
CMatrix esn_equalize(const TrainedEsn& esn, const CMatrix& rx);

/// Trains `cfg.cascade_depth` stages: stage 1 on (rx pilots -> tx pilots),
/// every later stage on the previous stage's equalized output against the
/// same targets.
std::vector<TrainedEsn> train_cascade(const EsnConfig& cfg, const CMatrix& rx_pilots,
                                      const CMatrix& tx_pilots, std::uint64_t seed);

/// Chains the stages over an input signal.
CMatrix cascade_equalize(const std::vector<TrainedEsn>& stages, const CMatrix& rx);

nlohmann::json esn_to_json(const TrainedEsn& esn);
TrainedEsn esn_from_json(const nlohmann::json& j);

}  // namespace rcsim::esn
