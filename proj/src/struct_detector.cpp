#include "rcsim/struct_detector.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "rcsim/rng.hpp"

namespace rcsim::structdet {

ShiftSet make_shift_set(int mod_order) {
    if (mod_order != 4 && mod_order != 16 && mod_order != 64) {
        throw ConfigError("make_shift_set: unsupported modulation order " +
                          std::to_string(mod_order));
    }
    ShiftSet ss;
    ss.mod_order = mod_order;
    const int root = static_cast<int>(std::lround(std::sqrt(mod_order)));
    ss.k_max = (root - 2) / 2;
    for (int c = -2 * ss.k_max - 1; c <= 2 * ss.k_max + 1; c += 2) {
        ss.class_set.push_back(c);
    }
    for (int s = -2 * ss.k_max; s <= 2 * ss.k_max; s += 2) {
        ss.shift_set.push_back(s);
    }
    return ss;
}

Eigen::Vector2d decompose(Complex x) { return {x.real(), x.imag()}; }

Eigen::Vector2d canonical_point(const Eigen::Vector2d& p, Axis axis) {
    if (axis == Axis::real) return p;
    return {p.y(), -p.x()};
}

Eigen::Vector2d EffectiveChannel::axis_vector(int stream, int subcarrier,
                                              Axis axis) const {
    const Complex c = h(stream, subcarrier);
    if (axis == Axis::real) return {c.real(), c.imag()};
    return {-c.imag(), c.real()};
}

EffectiveChannel estimate_effective_channel(const std::vector<CMatrix>& xhat_pilots,
                                            const std::vector<CMatrix>& x_pilots,
                                            double noise_var) {
    if (xhat_pilots.empty() || xhat_pilots.size() != x_pilots.size()) {
        throw DimensionError("estimate_effective_channel: pilot grids do not align");
    }
    const Eigen::Index nt = xhat_pilots[0].rows();
    const Eigen::Index nsc = xhat_pilots[0].cols();
    EffectiveChannel eff;
    eff.h.resize(nt, nsc);
    for (Eigen::Index t = 0; t < nt; ++t) {
        for (Eigen::Index k = 0; k < nsc; ++k) {
            Complex num(0.0, 0.0);
            double den = noise_var;
            for (std::size_t p = 0; p < x_pilots.size(); ++p) {
                num += xhat_pilots[p](t, k) * std::conj(x_pilots[p](t, k));
                den += std::norm(x_pilots[p](t, k));
            }
            if (den == 0.0) {
                throw InputError("estimate_effective_channel: degenerate pilots");
            }
            eff.h(t, k) = num / den;
        }
    }
    return eff;
}

std::size_t TrainingSet::count(Axis axis) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(),
                      [axis](const BinarySample& s) { return s.axis == axis; }));
}

TrainingSet build_training_set(const std::vector<CMatrix>& xhat_pilots,
                               const std::vector<CMatrix>& x_pilots,
                               const EffectiveChannel& eff, const ShiftSet& ss) {
    if (xhat_pilots.size() != x_pilots.size()) {
        throw DimensionError("build_training_set: pilot grids do not align");
    }
    const double grid_scale = std::sqrt(2.0 * (ss.mod_order - 1) / 3.0);
    TrainingSet set;
    set.samples.reserve(4 * xhat_pilots.size() *
                        (xhat_pilots.empty() ? 0 : xhat_pilots[0].size()));
    for (std::size_t p = 0; p < xhat_pilots.size(); ++p) {
        const CMatrix& xhat = xhat_pilots[p];
        const CMatrix& x = x_pilots[p];
        for (Eigen::Index t = 0; t < xhat.rows(); ++t) {
            for (Eigen::Index k = 0; k < xhat.cols(); ++k) {
                const Eigen::Vector2d i =
                    grid_scale * decompose(xhat(t, k));
                const int o_r =
                    static_cast<int>(std::lround(grid_scale * x(t, k).real()));
                const int o_im =
                    static_cast<int>(std::lround(grid_scale * x(t, k).imag()));
                for (Axis axis : {Axis::real, Axis::imag}) {
                    const int o = axis == Axis::real ? o_r : o_im;
                    const Eigen::Vector2d h = eff.axis_vector(
                        static_cast<int>(t), static_cast<int>(k), axis);
                    set.samples.push_back({i + (-o + 1) * h, +1, axis,
                                           static_cast<int>(t), static_cast<int>(k)});
                    set.samples.push_back({i + (-o - 1) * h, -1, axis,
                                           static_cast<int>(t), static_cast<int>(k)});
                }
            }
        }
    }
    return set;
}

BinaryClassifier BinaryClassifier::xavier(int hidden, std::uint64_t seed) {
    if (hidden < 1) throw ConfigError("BinaryClassifier: hidden width must be >= 1");
    BinaryClassifier clf;
    Rng rng(seed);
    const double limit1 = std::sqrt(6.0 / (2 + hidden));
    const double limit2 = std::sqrt(6.0 / (hidden + 2));
    std::uniform_real_distribution<double> u1(-limit1, limit1);
    std::uniform_real_distribution<double> u2(-limit2, limit2);
    clf.w1_.resize(hidden, 2);
    for (Eigen::Index r = 0; r < hidden; ++r) {
        for (Eigen::Index c = 0; c < 2; ++c) clf.w1_(r, c) = u1(rng);
    }
    clf.b1_ = Eigen::VectorXd::Zero(hidden);
    clf.w2_.resize(2, hidden);
    for (Eigen::Index r = 0; r < 2; ++r) {
        for (Eigen::Index c = 0; c < hidden; ++c) clf.w2_(r, c) = u2(rng);
    }
    clf.b2_ = Eigen::VectorXd::Zero(2);
    return clf;
}

Eigen::Vector2d BinaryClassifier::logits(const Eigen::Vector2d& x) const {
    const Eigen::VectorXd h = (w1_ * x + b1_).array().tanh();
    return w2_ * h + b2_;
}

double BinaryClassifier::logit_diff(const Eigen::Vector2d& x) const {
    const Eigen::Vector2d z = logits(x);
    return z(0) - z(1);
}

namespace {

// log(exp(z0) + exp(z1)) without overflow.
double log_sum_exp(double z0, double z1) {
    const double m = std::max(z0, z1);
    return m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
}

int class_index(int label) { return label > 0 ? 0 : 1; }

}  // namespace

double BinaryClassifier::loss(std::span<const Eigen::Vector2d> xs,
                              std::span<const int> labels) const {
    double total = 0.0;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        const Eigen::Vector2d z = logits(xs[n]);
        total += log_sum_exp(z(0), z(1)) - z(class_index(labels[n]));
    }
    return total / static_cast<double>(xs.size());
}

std::pair<double, BinaryClassifier::Gradients> BinaryClassifier::loss_and_gradients(
    std::span<const Eigen::Vector2d> xs, std::span<const int> labels) const {
    Gradients g;
    g.w1 = Eigen::MatrixXd::Zero(w1_.rows(), w1_.cols());
    g.b1 = Eigen::VectorXd::Zero(b1_.size());
    g.w2 = Eigen::MatrixXd::Zero(w2_.rows(), w2_.cols());
    g.b2 = Eigen::VectorXd::Zero(b2_.size());
    double total = 0.0;
    const double inv_n = 1.0 / static_cast<double>(xs.size());
    Eigen::VectorXd h, dh, da;
    for (std::size_t n = 0; n < xs.size(); ++n) {
        h = (w1_ * xs[n] + b1_).array().tanh();
        const Eigen::Vector2d z = w2_ * h + b2_;
        const int cls = class_index(labels[n]);
        total += log_sum_exp(z(0), z(1)) - z(cls);

        Eigen::Vector2d dz;
        const double m = std::max(z(0), z(1));
        const double e0 = std::exp(z(0) - m);
        const double e1 = std::exp(z(1) - m);
        dz(0) = e0 / (e0 + e1);
        dz(1) = e1 / (e0 + e1);
        dz(cls) -= 1.0;

        g.w2.noalias() += inv_n * dz * h.transpose();
        g.b2 += inv_n * dz;
        dh.noalias() = w2_.transpose() * dz;
        da = dh.array() * (1.0 - h.array().square());
        g.w1.noalias() += inv_n * da * xs[n].transpose();
        g.b1 += inv_n * da;
    }
    return {total * inv_n, std::move(g)};
}

void BinaryClassifier::fit(std::span<const Eigen::Vector2d> xs,
                           std::span<const int> labels, int epochs, double lr,
                           double momentum, std::uint64_t seed) {
    if (xs.empty()) throw InputError("BinaryClassifier::fit: empty sample set");
    if (xs.size() != labels.size()) {
        throw DimensionError("BinaryClassifier::fit: label count mismatch");
    }
    const Eigen::Index nh = b1_.size();
    Eigen::MatrixXd v_w1 = Eigen::MatrixXd::Zero(nh, 2);
    Eigen::VectorXd v_b1 = Eigen::VectorXd::Zero(nh);
    Eigen::MatrixXd v_w2 = Eigen::MatrixXd::Zero(2, nh);
    Eigen::VectorXd v_b2 = Eigen::VectorXd::Zero(2);

    std::vector<std::uint32_t> order(xs.size());
    for (std::size_t n = 0; n < order.size(); ++n) order[n] = static_cast<std::uint32_t>(n);
    Rng rng(seed);

    Eigen::VectorXd a(nh), h(nh), dh(nh), da(nh);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (const std::uint32_t n : order) {
            const Eigen::Vector2d& x = xs[n];
            a.noalias() = w1_ * x;
            a += b1_;
            h = a.array().tanh();
            Eigen::Vector2d z = w2_ * h + b2_;
            const int cls = class_index(labels[n]);

            Eigen::Vector2d dz;
            const double m = std::max(z(0), z(1));
            const double e0 = std::exp(z(0) - m);
            const double e1 = std::exp(z(1) - m);
            const double inv = 1.0 / (e0 + e1);
            dz(0) = e0 * inv;
            dz(1) = e1 * inv;
            dz(cls) -= 1.0;

            dh.noalias() = w2_.transpose() * dz;
            da = dh.array() * (1.0 - h.array().square());

            // momentum buffer: v = mu v + g;  p -= lr v
            v_w2 *= momentum;
            v_w2.noalias() += dz * h.transpose();
            w2_.noalias() -= lr * v_w2;
            v_b2 = momentum * v_b2 + dz;
            b2_ -= lr * v_b2;

            v_w1 *= momentum;
            v_w1.noalias() += da * x.transpose();
            w1_.noalias() -= lr * v_w1;
            v_b1 = momentum * v_b1 + da;
            b1_ -= lr * v_b1;
        }
    }
}

BinaryClassifier train_classifier(std::span<const BinarySample> samples, int hidden,
                                  int epochs, double lr, double momentum,
                                  std::uint64_t seed) {
    if (samples.empty()) throw InputError("train_classifier: empty sample set");
    std::vector<Eigen::Vector2d> xs;
    std::vector<int> labels;
    xs.reserve(samples.size());
    labels.reserve(samples.size());
    for (const BinarySample& s : samples) {
        xs.push_back(canonical_point(s.input, s.axis));
        labels.push_back(s.label);
    }
    BinaryClassifier clf = BinaryClassifier::xavier(hidden, derive_seed(seed, 0));
    if (epochs > 0) clf.fit(xs, labels, epochs, lr, momentum, derive_seed(seed, 1));
    return clf;
}

std::vector<double> class_log_scores(std::span<const double> logit_diffs) {
    std::vector<double> scores(logit_diffs.size() + 1);
    scores[0] = 0.0;  // bottom class -2K-1
    for (std::size_t j = 1; j < scores.size(); ++j) {
        scores[j] = scores[j - 1] + logit_diffs[logit_diffs.size() - j];
    }
    return scores;
}

int argmax_class(const ShiftSet& ss, std::span<const double> scores) {
    if (scores.size() != ss.class_set.size()) {
        throw DimensionError("argmax_class: score count does not match the class set");
    }
    std::size_t best = 0;
    for (std::size_t j = 1; j < scores.size(); ++j) {
        const int c = ss.class_set[j];
        const int cb = ss.class_set[best];
        const bool wins =
            scores[j] > scores[best] ||
            (scores[j] == scores[best] &&
             (std::abs(c) < std::abs(cb) || (std::abs(c) == std::abs(cb) && c < cb)));
        if (wins) best = j;
    }
    return ss.class_set[best];
}

int classify_symbol(const Eigen::Vector2d& i, const Eigen::Vector2d& h_axis,
                    const ShiftSet& ss, const BinaryScorer& scorer, Axis axis) {
    std::vector<double> diffs;
    diffs.reserve(2 * ss.k_max + 1);
    for (int k = -ss.k_max; k <= ss.k_max; ++k) {
        const Eigen::Vector2d point = i + 2.0 * k * h_axis;
        diffs.push_back(scorer.logit_diff(point, axis));
    }
    const std::vector<double> scores = class_log_scores(diffs);
    return argmax_class(ss, scores);
}

StructDetector StructDetector::train(const std::vector<CMatrix>& xhat_pilots,
                                     const std::vector<CMatrix>& x_pilots,
                                     int mod_order, double noise_var,
                                     const StructDetectorConfig& cfg,
                                     std::uint64_t seed) {
    StructDetector det;
    det.shifts = make_shift_set(mod_order);
    det.constellation = qam::QamConstellation::make(mod_order);
    det.cfg = cfg;
    det.eff = estimate_effective_channel(xhat_pilots, x_pilots, noise_var);
    det.nt = static_cast<int>(det.eff.h.rows());
    det.nsc = static_cast<int>(det.eff.h.cols());

    const TrainingSet set = build_training_set(xhat_pilots, x_pilots, det.eff, det.shifts);

    const int groups = det.group_count();
    const int per_group = cfg.pool_streams ? 1 : det.nt;
    det.classifiers.resize(static_cast<std::size_t>(groups) * per_group);
    std::vector<std::vector<BinarySample>> buckets(det.classifiers.size());
    for (const BinarySample& s : set.samples) {
        const int g = s.subcarrier / cfg.group_size;
        const std::size_t slot = cfg.pool_streams
                                     ? static_cast<std::size_t>(g)
                                     : static_cast<std::size_t>(g) * det.nt + s.stream;
        buckets[slot].push_back(s);
    }
    for (std::size_t slot = 0; slot < buckets.size(); ++slot) {
        det.classifiers[slot] =
            train_classifier(buckets[slot], cfg.hidden, cfg.epochs, cfg.lr,
                             cfg.momentum, derive_seed(seed, slot));
    }
    return det;
}

int StructDetector::group_count() const {
    return (nsc + cfg.group_size - 1) / cfg.group_size;
}

const BinaryClassifier& StructDetector::classifier_for(int stream,
                                                       int subcarrier) const {
    const int g = subcarrier / cfg.group_size;
    const std::size_t slot = cfg.pool_streams
                                 ? static_cast<std::size_t>(g)
                                 : static_cast<std::size_t>(g) * nt + stream;
    if (slot >= classifiers.size()) {
        throw StateError("StructDetector: no classifier trained for this group");
    }
    return classifiers[slot];
}

DetectedSymbols StructDetector::detect(const std::vector<CMatrix>& data_symbols) const {
    const double grid_scale = 1.0 / constellation.scale;
    DetectedSymbols out;
    out.symbols.assign(data_symbols.size(), CMatrix(nt, nsc));
    out.bits.reserve(data_symbols.size() * nt * nsc * constellation.bits_per_symbol);
    for (std::size_t n = 0; n < data_symbols.size(); ++n) {
        if (data_symbols[n].rows() != nt || data_symbols[n].cols() != nsc) {
            throw DimensionError("StructDetector::detect: grid dimension mismatch");
        }
        for (int t = 0; t < nt; ++t) {
            std::vector<unsigned> indices(nsc);
            for (int k = 0; k < nsc; ++k) {
                const MlpScorer scorer(classifier_for(t, k));
                const Eigen::Vector2d i =
                    grid_scale * decompose(data_symbols[n](t, k));
                const int o_r = classify_symbol(i, eff.axis_vector(t, k, Axis::real),
                                                shifts, scorer, Axis::real);
                const int o_im = classify_symbol(i, eff.axis_vector(t, k, Axis::imag),
                                                 shifts, scorer, Axis::imag);
                out.symbols[n](t, k) = constellation.point_from_amplitudes(o_r, o_im);
                indices[k] = constellation.index_from_amplitudes(o_r, o_im);
            }
            for (int k = 0; k < nsc; ++k) {
                for (int b = constellation.bits_per_symbol - 1; b >= 0; --b) {
                    out.bits.push_back(static_cast<std::uint8_t>((indices[k] >> b) & 1u));
                }
            }
        }
    }
    return out;
}

nlohmann::json BinaryClassifier::to_json() const {
    nlohmann::json j;
    j["hidden"] = hidden();
    j["w1"] = std::vector<std::vector<double>>();
    for (Eigen::Index r = 0; r < w1_.rows(); ++r) {
        j["w1"].push_back(std::vector<double>{w1_(r, 0), w1_(r, 1)});
    }
    j["b1"] = std::vector<double>(b1_.data(), b1_.data() + b1_.size());
    nlohmann::json w2 = nlohmann::json::array();
    for (Eigen::Index r = 0; r < 2; ++r) {
        std::vector<double> row(w2_.cols());
        for (Eigen::Index c = 0; c < w2_.cols(); ++c) row[c] = w2_(r, c);
        w2.push_back(std::move(row));
    }
    j["w2"] = std::move(w2);
    j["b2"] = std::vector<double>{b2_(0), b2_(1)};
    return j;
}

BinaryClassifier BinaryClassifier::from_json(const nlohmann::json& j) {
    BinaryClassifier clf;
    const int hidden = j.at("hidden").get<int>();
    clf.w1_.resize(hidden, 2);
    for (int r = 0; r < hidden; ++r) {
        clf.w1_(r, 0) = j.at("w1").at(r).at(0).get<double>();
        clf.w1_(r, 1) = j.at("w1").at(r).at(1).get<double>();
    }
    const auto b1 = j.at("b1").get<std::vector<double>>();
    clf.b1_ = Eigen::Map<const Eigen::VectorXd>(b1.data(), b1.size());
    clf.w2_.resize(2, hidden);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < hidden; ++c) {
            clf.w2_(r, c) = j.at("w2").at(r).at(c).get<double>();
        }
    }
    clf.b2_.resize(2);
    clf.b2_(0) = j.at("b2").at(0).get<double>();
    clf.b2_(1) = j.at("b2").at(1).get<double>();
    return clf;
}

}  // namespace rcsim::structdet
