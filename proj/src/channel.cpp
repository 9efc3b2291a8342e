#include "rcsim/channel.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "rcsim/rng.hpp"

namespace rcsim::channel {

CVector ChannelRealization::tap_vector(int rx, int tx) const {
    CVector v(lc);
    for (int l = 0; l < lc; ++l) v(l) = taps[l](rx, tx);
    return v;
}

Complex rapp_pa(Complex x, const PaModel& pa) {
    const double r = std::abs(x);
    if (r == 0.0) return Complex(0.0, 0.0);
    const double ratio = r / pa.x_sat;
    const double denom = std::pow(1.0 + std::pow(ratio, 2.0 * pa.rho), 0.5 * pa.rho);
    return x / denom;
}

double rapp_pa_magnitude(double r, const PaModel& pa) {
    return std::abs(rapp_pa(Complex(r, 0.0), pa));
}

ChannelRealization generate_channel(int lc, double decay, int nt, int nr,
                                    std::uint64_t seed, int ncp) {
    if (lc < 1) throw ConfigError("generate_channel: need at least one tap");
    if (lc > ncp) {
        throw ConfigError("generate_channel: delay spread exceeds the cyclic prefix");
    }
    if (decay <= 0.0) throw ConfigError("generate_channel: decay must be positive");

    ChannelRealization ch;
    ch.nt = nt;
    ch.nr = nr;
    ch.lc = lc;
    ch.decay = decay;
    ch.taps.assign(lc, CMatrix(nr, nt));

    std::vector<double> power(lc);
    double total = 0.0;
    for (int l = 0; l < lc; ++l) {
        power[l] = std::exp(-static_cast<double>(l) / decay);
        total += power[l];
    }
    for (double& p : power) p /= total;

    Rng rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int l = 0; l < lc; ++l) {
        const double s = std::sqrt(power[l] / 2.0);
        for (int j = 0; j < nr; ++j) {
            for (int i = 0; i < nt; ++i) {
                ch.taps[l](j, i) = Complex(s * gauss(rng), s * gauss(rng));
            }
        }
    }
    return ch;
}

ofdm::TimeSignal apply_channel(const ofdm::TimeSignal& tx,
                               const ChannelRealization& ch,
                               const NoiseSpec& noise, const PaModel& pa,
                               std::uint64_t seed) {
    if (tx.samples.rows() != ch.nt) {
        throw DimensionError("apply_channel: stream count does not match the channel");
    }
    if (noise.sigma2 < 0.0) throw InputError("apply_channel: negative noise variance");

    const int span = tx.span();
    const int n_sym = tx.n_symbols();

    CMatrix driven = tx.samples;
    if (pa.enabled) {
        const double mean_power = driven.squaredNorm() / static_cast<double>(driven.size());
        const double target = pa.x_sat * pa.x_sat * std::pow(10.0, -pa.ibo_db / 10.0);
        const double gain = mean_power > 0.0 ? std::sqrt(target / mean_power) : 1.0;
        for (Eigen::Index idx = 0; idx < driven.size(); ++idx) {
            driven(idx) = rapp_pa(gain * driven(idx), pa) / gain;
        }
    }

    ofdm::TimeSignal rx;
    rx.nsc = tx.nsc;
    rx.ncp = tx.ncp;
    rx.samples = CMatrix::Zero(ch.nr, tx.samples.cols());
    for (int s = 0; s < n_sym; ++s) {
        const Eigen::Index base = static_cast<Eigen::Index>(s) * span;
        for (int t = 0; t < span; ++t) {
            for (int l = 0; l < ch.lc; ++l) {
                const int src = (t - l + span) % span;
                rx.samples.col(base + t).noalias() +=
                    ch.taps[l] * driven.col(base + src);
            }
        }
    }

    if (noise.sigma2 > 0.0) {
        Rng rng(seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(noise.sigma2 / 2.0));
        for (Eigen::Index c = 0; c < rx.samples.cols(); ++c) {
            for (Eigen::Index r = 0; r < rx.samples.rows(); ++r) {
                rx.samples(r, c) += Complex(gauss(rng), gauss(rng));
            }
        }
    }
    return rx;
}

double ebn0_to_sigma2(double ebn0_db, int bits_per_symbol, int nt, int /*nr*/) {
    if (bits_per_symbol < 1) throw ConfigError("ebn0_to_sigma2: bits_per_symbol must be >= 1");
    return static_cast<double>(nt) /
           (static_cast<double>(bits_per_symbol) * std::pow(10.0, ebn0_db / 10.0));
}

nlohmann::json channel_to_json(const ChannelRealization& ch) {
    nlohmann::json j;
    j["nt"] = ch.nt;
    j["nr"] = ch.nr;
    j["lc"] = ch.lc;
    j["decay"] = ch.decay;
    nlohmann::json taps = nlohmann::json::array();
    for (int r = 0; r < ch.nr; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int t = 0; t < ch.nt; ++t) {
            nlohmann::json lags = nlohmann::json::array();
            for (int l = 0; l < ch.lc; ++l) {
                lags.push_back({ch.taps[l](r, t).real(), ch.taps[l](r, t).imag()});
            }
            row.push_back(std::move(lags));
        }
        taps.push_back(std::move(row));
    }
    j["taps"] = std::move(taps);
    return j;
}

ChannelRealization channel_from_json(const nlohmann::json& j) {
    ChannelRealization ch;
    ch.nt = j.at("nt").get<int>();
    ch.nr = j.at("nr").get<int>();
    ch.lc = j.at("lc").get<int>();
    ch.decay = j.value("decay", 1.0);
    ch.taps.assign(ch.lc, CMatrix(ch.nr, ch.nt));
    const auto& taps = j.at("taps");
    for (int r = 0; r < ch.nr; ++r) {
        for (int t = 0; t < ch.nt; ++t) {
            const auto& lags = taps.at(r).at(t);
            for (int l = 0; l < ch.lc; ++l) {
                ch.taps[l](r, t) = Complex(lags.at(l).at(0).get<double>(),
                                           lags.at(l).at(1).get<double>());
            }
        }
    }
    return ch;
}

}  // namespace rcsim::channel
