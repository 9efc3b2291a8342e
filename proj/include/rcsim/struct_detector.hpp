#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rcsim/qam.hpp"

namespace rcsim::structdet {

using numerics::CMatrix;
using numerics::Complex;

enum class Axis { real, imag };

/// Per-axis class and shift sets induced by the square-QAM grid:
///   K = (sqrt(M) - 2) / 2,
///   C = {-2K-1, -2K+1, ..., +2K+1} (odd amplitudes),
///   S = {-2K, -2K+2, ..., +2K}     (even shifts; S = {0} for QPSK).
struct ShiftSet {
    int mod_order = 0;
    int k_max = 0;                // K
    std::vector<int> class_set;   // ascending, size sqrt(M)
    std::vector<int> shift_set;   // ascending, size sqrt(M) - 1 (or {0} for QPSK)
};

ShiftSet make_shift_set(int mod_order);

/// [Re x; Im x].
Eigen::Vector2d decompose(Complex x);

/// Rotates an imaginary-axis observation into the real-axis geometry
/// (the decomposition of -j times the symbol). Detecting the imaginary
/// amplitude of x from x_hat is the same problem as detecting the real
/// amplitude of -j x from -j x_hat under the same effective channel, so one
/// binary classifier can serve both axes once imaginary-axis samples are
/// rotated. Pooling the raw samples instead would assign conflicting labels
/// to identical inputs.
Eigen::Vector2d canonical_point(const Eigen::Vector2d& p, Axis axis);

/// Scalar effective channel per (stream, subcarrier) between the equalized
/// and the transmitted frequency-domain symbols.
struct EffectiveChannel {
    CMatrix h;  // nt x nsc

    /// h_r = [Re h; Im h] for the real axis, h_im = [-Im h; Re h] for the
    /// imaginary axis (h_r rotated by 90 degrees).
    Eigen::Vector2d axis_vector(int stream, int subcarrier, Axis axis) const;
};

/// Per-entry regularized least-squares fit of x_hat ~= h x over the pilot
/// symbols (the 1x1 case of numerics::lmmse_estimate).
EffectiveChannel estimate_effective_channel(const std::vector<CMatrix>& xhat_pilots,
                                            const std::vector<CMatrix>& x_pilots,
                                            double noise_var);

/// One binary training sample: the shifted observation, its +-1 label, and
/// which axis produced it.
struct BinarySample {
    Eigen::Vector2d input;  // i + s * h_axis, on the odd-integer grid scale
    int label = 0;          // +1 or -1
    Axis axis = Axis::real;
    int stream = 0;
    int subcarrier = 0;
};

struct TrainingSet {
    std::vector<BinarySample> samples;

    std::size_t count(Axis axis) const;
};

/// Builds, per pilot entry and axis, the pair of samples with shifts
/// -o + 1 (label +1) and -o - 1 (label -1). Each axis contributes
/// 2 * Nt * Nsc * Np samples. Observations and the odd-integer targets o are
/// obtained by dividing the unit-power normalization out of the symbols.
TrainingSet build_training_set(const std::vector<CMatrix>& xhat_pilots,
                               const std::vector<CMatrix>& x_pilots,
                               const EffectiveChannel& eff, const ShiftSet& ss);

/// Two affine layers with a tanh in between; outputs one logit per binary
/// class (+1 first). Trained with per-sample SGD with momentum on the
/// softmax cross-entropy.
class BinaryClassifier {
public:
    BinaryClassifier() = default;

    /// Xavier-uniform initialization, deterministic per seed.
    static BinaryClassifier xavier(int hidden, std::uint64_t seed);

    int hidden() const { return static_cast<int>(b1_.size()); }

    Eigen::Vector2d logits(const Eigen::Vector2d& x) const;

    /// log L_{+-} = logit(+1) - logit(-1) (equals the log softmax ratio).
    double logit_diff(const Eigen::Vector2d& x) const;

    struct Gradients {
        Eigen::MatrixXd w1, w2;
        Eigen::VectorXd b1, b2;
    };

    /// Mean cross-entropy over a batch (labels are +-1).
    double loss(std::span<const Eigen::Vector2d> xs, std::span<const int> labels) const;

    /// Mean loss and its analytic gradient (finite-difference oracle target).
    std::pair<double, Gradients> loss_and_gradients(std::span<const Eigen::Vector2d> xs,
                                                    std::span<const int> labels) const;

    /// Per-sample SGD with momentum over `epochs` passes; the sample order is
    /// reshuffled each epoch with a seeded permutation.
    void fit(std::span<const Eigen::Vector2d> xs, std::span<const int> labels,
             int epochs, double lr, double momentum, std::uint64_t seed);

    nlohmann::json to_json() const;
    static BinaryClassifier from_json(const nlohmann::json& j);

    const Eigen::MatrixXd& w1() const { return w1_; }
    const Eigen::MatrixXd& w2() const { return w2_; }
    const Eigen::VectorXd& b1() const { return b1_; }
    const Eigen::VectorXd& b2() const { return b2_; }

private:
    Eigen::MatrixXd w1_;  // hidden x 2
    Eigen::VectorXd b1_;  // hidden
    Eigen::MatrixXd w2_;  // 2 x hidden
    Eigen::VectorXd b2_;  // 2
};

/// Canonicalizes the samples (imaginary axis rotated) and trains a
/// classifier on the pooled set.
BinaryClassifier train_classifier(std::span<const BinarySample> samples, int hidden,
                                  int epochs, double lr, double momentum,
                                  std::uint64_t seed);

/// Pairwise log likelihood-ratio source for classification. Implementations
/// receive the raw evaluation point i + 2k h_axis and the axis.
class BinaryScorer {
public:
    virtual ~BinaryScorer() = default;
    virtual double logit_diff(const Eigen::Vector2d& point, Axis axis) const = 0;
};

/// Scorer backed by a trained classifier; imaginary-axis points are rotated
/// into the canonical real-axis geometry before evaluation.
class MlpScorer : public BinaryScorer {
public:
    explicit MlpScorer(const BinaryClassifier& clf) : clf_(&clf) {}
    double logit_diff(const Eigen::Vector2d& point, Axis axis) const override {
        return clf_->logit_diff(canonical_point(point, axis));
    }

private:
    const BinaryClassifier* clf_;
};

/// Cumulative log-likelihood scores per class, aligned with
/// ShiftSet::class_set. `logit_diffs[k + K]` is the log ratio at shift 2k;
/// the bottom class gets score 0 and class -2k+1 accumulates the ratios for
/// k' = k .. K.
std::vector<double> class_log_scores(std::span<const double> logit_diffs);

/// Argmax over the class set; ties prefer the smaller magnitude, then the
/// negative class.
int argmax_class(const ShiftSet& ss, std::span<const double> scores);

/// Classifies one axis of one observation: evaluates the scorer at
/// i + 2k h_axis for every k in [-K, K] and picks the class with the largest
/// cumulative score.
int classify_symbol(const Eigen::Vector2d& i, const Eigen::Vector2d& h_axis,
                    const ShiftSet& ss, const BinaryScorer& scorer, Axis axis);

struct DetectedSymbols {
    std::vector<CMatrix> symbols;        // recombined constellation points
    std::vector<std::uint8_t> bits;      // same layout as SubframeGrid::data_bits
};

struct StructDetectorConfig {
    int hidden = 128;
    int epochs = 800;
    double lr = 0.01;
    double momentum = 0.001;
    int group_size = 84;      // subcarriers per classifier group
    bool pool_streams = true; // one classifier per group shared by all streams
};

/// Trained frequency-domain detector: shift set, per-entry effective channel,
/// and one classifier per subcarrier group (per stream when stream pooling is
/// off).
struct StructDetector {
    ShiftSet shifts;
    EffectiveChannel eff;
    qam::QamConstellation constellation;
    StructDetectorConfig cfg;
    int nt = 0;
    int nsc = 0;
    std::vector<BinaryClassifier> classifiers;

    static StructDetector train(const std::vector<CMatrix>& xhat_pilots,
                                const std::vector<CMatrix>& x_pilots, int mod_order,
                                double noise_var, const StructDetectorConfig& cfg,
                                std::uint64_t seed);

    int group_count() const;
    const BinaryClassifier& classifier_for(int stream, int subcarrier) const;

    /// Classifies both axes of every data-symbol entry and recombines the
    /// amplitudes into constellation points and Gray-decoded bits.
    DetectedSymbols detect(const std::vector<CMatrix>& data_symbols) const;
};

}  // namespace rcsim::structdet
