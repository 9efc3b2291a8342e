#include "rcsim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

#include <nlohmann/json.hpp>

#include "rcsim/rng.hpp"

namespace rcsim::harness {

namespace {

// Sub-stream indices for seed derivation within one subframe trial.
enum SeedStream : std::uint64_t {
    kChannel = 0,
    kFrame = 1,
    kNoise = 2,
    kSoundingNoise = 3,
    kEsn = 4,
    kClassifier = 5,
    kSoundingFrame = 6,
};

int bits_per_symbol(int mod_order) {
    return static_cast<int>(std::lround(std::log2(mod_order)));
}

void require_keys(const nlohmann::json& j, const std::vector<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("config: unknown key '" + key + "' in " + where);
        }
    }
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::string to_string(Detector d) {
    switch (d) {
        case Detector::rcstruct: return "rcstruct";
        case Detector::rcnet: return "rcnet";
        case Detector::lmmse: return "lmmse";
    }
    throw InputError("unknown detector");
}

std::string to_string(AdaptMode m) {
    switch (m) {
        case AdaptMode::none: return "none";
        case AdaptMode::rank: return "rank";
        case AdaptMode::link: return "link";
        case AdaptMode::both: return "both";
    }
    throw InputError("unknown adaptation mode");
}

Detector detector_from_string(const std::string& s) {
    if (s == "rcstruct") return Detector::rcstruct;
    if (s == "rcnet") return Detector::rcnet;
    if (s == "lmmse") return Detector::lmmse;
    throw ConfigError("config: unknown detector '" + s + "'");
}

AdaptMode adapt_from_string(const std::string& s) {
    if (s == "none") return AdaptMode::none;
    if (s == "rank") return AdaptMode::rank;
    if (s == "link") return AdaptMode::link;
    if (s == "both") return AdaptMode::both;
    throw ConfigError("config: unknown adaptation mode '" + s + "'");
}

void SimConfig::validate() const {
    if (nt < 1 || nr < 1) throw ConfigError("config: antenna counts must be positive");
    if (nsc < 2 || (nsc & (nsc - 1)) != 0) {
        throw ConfigError("config: nsc must be a power of two");
    }
    if (ncp < 1 || ncp >= nsc) throw ConfigError("config: need 1 <= ncp < nsc");
    if (np < 1) throw ConfigError("config: at least one pilot symbol required");
    if (nd < 1) throw ConfigError("config: at least one data symbol required");
    if (mod_order != 4 && mod_order != 16 && mod_order != 64) {
        throw ConfigError("config: mod_order must be 4, 16 or 64");
    }
    if (lc < 1 || lc > ncp) throw ConfigError("config: need 1 <= lc <= ncp");
    if (decay <= 0.0) throw ConfigError("config: decay must be positive");
    if (ebn0_db.empty()) throw ConfigError("config: ebn0_db must not be empty");
    if (detectors.empty()) throw ConfigError("config: detectors must not be empty");
    if (subframes_per_point < 1) {
        throw ConfigError("config: subframes_per_point must be positive");
    }
    if (esn.spectral_radius <= 0.0 || esn.spectral_radius >= 1.0) {
        throw ConfigError("config: esn spectral radius must lie in (0, 1)");
    }
    if (esn.neurons < 1 || esn.window < 1 || esn.cascade_depth < 1) {
        throw ConfigError("config: esn sizes must be positive");
    }
    if (esn.delay_max < 0 || esn.delay_max > ncp) {
        throw ConfigError("config: esn delay_max must lie in [0, ncp]");
    }
    if (esn.delay_step < 1) throw ConfigError("config: esn delay_step must be >= 1");
    if (classifier.hidden < 1 || classifier.epochs < 0 || classifier.group_size < 1) {
        throw ConfigError("config: bad classifier settings");
    }
    if (subband_size < 1) throw ConfigError("config: subband_size must be positive");
    if (pa.enabled && (pa.x_sat <= 0.0 || pa.rho <= 0.0)) {
        throw ConfigError("config: pa x_sat and rho must be positive");
    }
    cqi.validate();
}

SimConfig SimConfig::desk() {
    SimConfig cfg;
    cfg.nt = cfg.nr = 2;
    cfg.nsc = 64;
    cfg.ncp = 16;
    cfg.np = 4;
    cfg.nd = 16;
    cfg.mod_order = 16;
    cfg.lc = 4;
    cfg.decay = 1.0;
    cfg.ebn0_db = {0, 5, 10, 15, 20};
    cfg.subframes_per_point = 100;
    cfg.esn.neurons = 16;
    cfg.esn.window = 16;
    cfg.esn.delay_step = 5;
    cfg.esn.delay_max = 16;
    cfg.esn.cascade_depth = 2;
    cfg.classifier.hidden = 64;
    cfg.classifier.epochs = 200;
    cfg.classifier.group_size = 84;
    return cfg;
}

SimConfig SimConfig::paper_scale() {
    SimConfig cfg;
    cfg.nt = cfg.nr = 4;
    cfg.nsc = 1024;
    cfg.ncp = 160;
    cfg.np = 4;
    cfg.nd = 16;
    cfg.mod_order = 16;
    cfg.lc = 16;
    cfg.decay = 3.0;
    cfg.ebn0_db = {0, 3, 6, 9, 12, 15, 18};
    cfg.subframes_per_point = 100;
    cfg.esn.neurons = 16;
    cfg.esn.window = 128;
    cfg.esn.delay_step = 5;
    cfg.esn.delay_max = 160;
    cfg.esn.cascade_depth = 2;
    cfg.classifier.hidden = 128;
    cfg.classifier.epochs = 800;
    cfg.classifier.group_size = 84;
    return cfg;
}

SimConfig SimConfig::from_json(const nlohmann::json& j) {
    require_keys(j,
                 {"nt", "nr", "nsc", "ncp", "np", "nd", "mod_order", "lc", "decay",
                  "ebn0_db", "detectors", "pa", "adapt", "subframes_per_point",
                  "seed", "esn", "classifier", "cqi_table", "pt", "subband_size"},
                 "top level");
    SimConfig cfg;
    cfg.nt = j.value("nt", cfg.nt);
    cfg.nr = j.value("nr", cfg.nr);
    cfg.nsc = j.value("nsc", cfg.nsc);
    cfg.ncp = j.value("ncp", cfg.ncp);
    cfg.np = j.value("np", cfg.np);
    cfg.nd = j.value("nd", cfg.nd);
    cfg.mod_order = j.value("mod_order", cfg.mod_order);
    cfg.lc = j.value("lc", cfg.lc);
    cfg.decay = j.value("decay", cfg.decay);
    if (j.contains("ebn0_db")) cfg.ebn0_db = j.at("ebn0_db").get<std::vector<double>>();
    if (j.contains("detectors")) {
        cfg.detectors.clear();
        for (const auto& d : j.at("detectors")) {
            cfg.detectors.push_back(detector_from_string(d.get<std::string>()));
        }
    }
    if (j.contains("pa")) {
        const auto& p = j.at("pa");
        require_keys(p, {"enabled", "x_sat", "rho", "ibo_db"}, "pa");
        cfg.pa.enabled = p.value("enabled", cfg.pa.enabled);
        cfg.pa.x_sat = p.value("x_sat", cfg.pa.x_sat);
        cfg.pa.rho = p.value("rho", cfg.pa.rho);
        cfg.pa.ibo_db = p.value("ibo_db", cfg.pa.ibo_db);
    }
    if (j.contains("adapt")) cfg.adapt = adapt_from_string(j.at("adapt").get<std::string>());
    cfg.subframes_per_point = j.value("subframes_per_point", cfg.subframes_per_point);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("esn")) {
        const auto& e = j.at("esn");
        require_keys(e,
                     {"neurons", "window", "spectral_radius", "input_scale",
                      "delay_step", "delay_max", "cascade", "ridge"},
                     "esn");
        cfg.esn.neurons = e.value("neurons", cfg.esn.neurons);
        cfg.esn.window = e.value("window", cfg.esn.window);
        cfg.esn.spectral_radius = e.value("spectral_radius", cfg.esn.spectral_radius);
        cfg.esn.input_scale = e.value("input_scale", cfg.esn.input_scale);
        cfg.esn.delay_step = e.value("delay_step", cfg.esn.delay_step);
        cfg.esn.delay_max = e.value("delay_max", cfg.ncp);
        cfg.esn.cascade_depth = e.value("cascade", cfg.esn.cascade_depth);
        cfg.esn.ridge = e.value("ridge", cfg.esn.ridge);
    } else {
        cfg.esn.delay_max = cfg.ncp;
    }
    if (j.contains("classifier")) {
        const auto& c = j.at("classifier");
        require_keys(c, {"hidden", "epochs", "lr", "momentum", "group_size",
                         "pool_streams"},
                     "classifier");
        cfg.classifier.hidden = c.value("hidden", cfg.classifier.hidden);
        cfg.classifier.epochs = c.value("epochs", cfg.classifier.epochs);
        cfg.classifier.lr = c.value("lr", cfg.classifier.lr);
        cfg.classifier.momentum = c.value("momentum", cfg.classifier.momentum);
        cfg.classifier.group_size = c.value("group_size", cfg.classifier.group_size);
        cfg.classifier.pool_streams = c.value("pool_streams", cfg.classifier.pool_streams);
    }
    if (j.contains("cqi_table")) {
        cfg.cqi_table_path = j.at("cqi_table").get<std::string>();
        cfg.cqi = adaptation::CqiTable::load(cfg.cqi_table_path);
    }
    cfg.pt = j.value("pt", cfg.pt);
    cfg.subband_size = j.value("subband_size", cfg.subband_size);
    cfg.validate();
    return cfg;
}

SimConfig SimConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    return from_json(j);
}

nlohmann::json SimConfig::to_json() const {
    nlohmann::json j;
    j["nt"] = nt;
    j["nr"] = nr;
    j["nsc"] = nsc;
    j["ncp"] = ncp;
    j["np"] = np;
    j["nd"] = nd;
    j["mod_order"] = mod_order;
    j["lc"] = lc;
    j["decay"] = decay;
    j["ebn0_db"] = ebn0_db;
    std::vector<std::string> dets;
    for (const Detector d : detectors) dets.push_back(to_string(d));
    j["detectors"] = dets;
    j["pa"] = {{"enabled", pa.enabled},
               {"x_sat", pa.x_sat},
               {"rho", pa.rho},
               {"ibo_db", pa.ibo_db}};
    j["adapt"] = to_string(adapt);
    j["subframes_per_point"] = subframes_per_point;
    j["seed"] = seed;
    j["esn"] = {{"neurons", esn.neurons},
                {"window", esn.window},
                {"spectral_radius", esn.spectral_radius},
                {"input_scale", esn.input_scale},
                {"delay_step", esn.delay_step},
                {"delay_max", esn.delay_max},
                {"cascade", esn.cascade_depth},
                {"ridge", esn.ridge}};
    j["classifier"] = {{"hidden", classifier.hidden},
                       {"epochs", classifier.epochs},
                       {"lr", classifier.lr},
                       {"momentum", classifier.momentum},
                       {"group_size", classifier.group_size},
                       {"pool_streams", classifier.pool_streams}};
    if (!cqi_table_path.empty()) j["cqi_table"] = cqi_table_path;
    j["pt"] = pt;
    j["subband_size"] = subband_size;
    return j;
}

double compute_ber(std::span<const std::uint8_t> tx_bits,
                   std::span<const std::uint8_t> rx_bits) {
    if (tx_bits.size() != rx_bits.size()) {
        throw DimensionError("compute_ber: length mismatch");
    }
    if (tx_bits.empty()) throw InputError("compute_ber: empty bit sequences");
    std::uint64_t errors = 0;
    for (std::size_t i = 0; i < tx_bits.size(); ++i) {
        errors += (tx_bits[i] ^ rx_bits[i]) & 1u;
    }
    return static_cast<double>(errors) / static_cast<double>(tx_bits.size());
}

double compute_raw_ber(std::span<const double> stream_bers,
                       std::span<const int> bits_per_symbol) {
    if (stream_bers.empty() || stream_bers.size() != bits_per_symbol.size()) {
        throw InputError("compute_raw_ber: empty or mismatched stream lists");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < stream_bers.size(); ++j) {
        num += bits_per_symbol[j] * stream_bers[j];
        den += bits_per_symbol[j];
    }
    return num / den;
}

std::uint64_t SubframeStats::bits() const {
    std::uint64_t total = 0;
    for (const auto& s : streams) total += s.bits;
    return total;
}

std::uint64_t SubframeStats::errors() const {
    std::uint64_t total = 0;
    for (const auto& s : streams) total += s.errors;
    return total;
}

SubframeContext make_subframe_context(const SimConfig& cfg, double ebn0_db,
                                      std::uint64_t subframe_seed) {
    cfg.validate();
    SubframeContext ctx;
    ctx.seed = subframe_seed;
    // The noise level is fixed by the configured stream count and modulation
    // order; adaptation changes the transmitted rate, not the noise.
    ctx.sigma2 = channel::ebn0_to_sigma2(ebn0_db, bits_per_symbol(cfg.mod_order),
                                         cfg.nt, cfg.nr);
    ctx.ch = channel::generate_channel(cfg.lc, cfg.decay, cfg.nt, cfg.nr,
                                       derive_seed(subframe_seed, kChannel), cfg.ncp);
    ctx.rank = cfg.nt;
    ctx.modulation = cfg.mod_order;

    std::vector<numerics::CMatrix> precoders;
    if (cfg.adapt != AdaptMode::none) {
        // Sounding pass: a pilot-only transmission through the same channel
        // provides the CSI that drives the rank/MCS feedback.
        ofdm::SubframeConfig scfg{cfg.nt, cfg.nsc, cfg.ncp, cfg.np, 0, cfg.mod_order};
        const auto sounding =
            ofdm::build_subframe(scfg, derive_seed(subframe_seed, kSoundingFrame));
        const auto sounding_rx = channel::apply_channel(
            ofdm::ofdm_modulate(sounding), ctx.ch, {ctx.sigma2}, cfg.pa,
            derive_seed(subframe_seed, kSoundingNoise));
        const auto y = ofdm::ofdm_demodulate(sounding_rx);
        const auto csi = baselines::estimate_csi(y, sounding.symbols, ctx.sigma2);

        const double pt = cfg.power_budget();
        auto rd = adaptation::rank_adapt(csi.h, pt, ctx.sigma2, cfg.subband_size);
        if (cfg.adapt == AdaptMode::rank || cfg.adapt == AdaptMode::both) {
            ctx.rank = rd.rank;
            precoders = rd.precoders;
        } else {
            rd.rank = cfg.nt;  // link-only: all streams active, no precoding
        }
        if (cfg.adapt == AdaptMode::link || cfg.adapt == AdaptMode::both) {
            const Eigen::MatrixXd sinr = adaptation::per_stream_sinr(rd, pt, ctx.sigma2);
            const std::vector<double> flat(sinr.data(), sinr.data() + sinr.size());
            ctx.modulation = adaptation::select_mcs(flat, cfg.cqi).modulation;
        }
    }

    ofdm::SubframeConfig fcfg{ctx.rank, cfg.nsc, cfg.ncp, cfg.np, cfg.nd,
                              ctx.modulation};
    ctx.grid = ofdm::build_subframe(fcfg, derive_seed(subframe_seed, kFrame));
    ctx.stream_time = ofdm::ofdm_modulate(ctx.grid);

    if (!precoders.empty() && ctx.rank < cfg.nt) {
        ctx.precoded.assign(ctx.grid.n_symbols(),
                            numerics::CMatrix(cfg.nt, cfg.nsc));
        for (int n = 0; n < ctx.grid.n_symbols(); ++n) {
            for (int k = 0; k < cfg.nsc; ++k) {
                const auto& q = precoders[static_cast<std::size_t>(k) / cfg.subband_size];
                ctx.precoded[n].col(k) =
                    adaptation::precode(ctx.grid.symbols[n].col(k), q);
            }
        }
        ctx.tx = ofdm::ofdm_modulate_symbols(ctx.precoded, cfg.nsc, cfg.ncp);
    } else {
        ctx.precoded = ctx.grid.symbols;
        ctx.tx = ctx.stream_time;
    }

    ctx.rx = channel::apply_channel(ctx.tx, ctx.ch, {ctx.sigma2}, cfg.pa,
                                    derive_seed(subframe_seed, kNoise));
    return ctx;
}

namespace {

// Trains the reservoir cascade on the pilots and caches the equalized,
// demodulated grid. rcstruct and rcnet share this stage.
void ensure_esn_cache(const SimConfig& cfg, SubframeContext& ctx) {
    if (ctx.esn_cache.ready) return;
    const int span = ctx.rx.span();
    const Eigen::Index pilot_cols = static_cast<Eigen::Index>(cfg.np) * span;
    esn::EsnConfig esn_cfg = cfg.esn;
    const auto rx_pilots = ctx.rx.samples.leftCols(pilot_cols);
    const auto tx_pilots = ctx.stream_time.samples.leftCols(pilot_cols);
    ctx.esn_cache.cascade = esn::train_cascade(esn_cfg, rx_pilots, tx_pilots,
                                               derive_seed(ctx.seed, kEsn));
    ofdm::TimeSignal equalized;
    equalized.nsc = ctx.rx.nsc;
    equalized.ncp = ctx.rx.ncp;
    equalized.samples = esn::cascade_equalize(ctx.esn_cache.cascade, ctx.rx.samples);
    ctx.esn_cache.equalized = ofdm::ofdm_demodulate(equalized);
    ctx.esn_cache.ready = true;
}

SubframeStats count_errors(const SubframeContext& ctx,
                           const std::vector<std::uint8_t>& detected) {
    const int m = bits_per_symbol(ctx.modulation);
    const int row = ctx.grid.cfg.nsc * m;
    SubframeStats stats;
    stats.rank = ctx.rank;
    stats.modulation = ctx.modulation;
    stats.streams.assign(ctx.rank, StreamStats{});
    const std::size_t expected = static_cast<std::size_t>(ctx.grid.cfg.nd) *
                                 ctx.rank * row;
    if (detected.size() != expected) {
        throw DimensionError("detected bit count does not match the data grid");
    }
    for (int d = 0; d < ctx.grid.cfg.nd; ++d) {
        for (int t = 0; t < ctx.rank; ++t) {
            const auto tx = ctx.grid.data_bits_for(d, t);
            const std::size_t offset =
                (static_cast<std::size_t>(d) * ctx.rank + t) * row;
            auto& s = stats.streams[t];
            s.bits_per_symbol = m;
            s.bits += row;
            for (int b = 0; b < row; ++b) {
                s.errors += (tx[b] ^ detected[offset + b]) & 1u;
            }
        }
    }
    return stats;
}

}  // namespace

SubframeStats detect_in_context(const SimConfig& cfg, SubframeContext& ctx,
                                Detector detector) {
    const auto constellation = qam::QamConstellation::make(ctx.modulation);
    const std::vector<numerics::CMatrix> pilots(
        ctx.grid.symbols.begin(), ctx.grid.symbols.begin() + cfg.np);
    std::vector<std::uint8_t> detected;

    switch (detector) {
        case Detector::rcnet: {
            ensure_esn_cache(cfg, ctx);
            const std::vector<numerics::CMatrix> data(
                ctx.esn_cache.equalized.begin() + cfg.np, ctx.esn_cache.equalized.end());
            detected = baselines::slice_symbols(data, constellation);
            break;
        }
        case Detector::rcstruct: {
            ensure_esn_cache(cfg, ctx);
            const std::vector<numerics::CMatrix> xhat_pilots(
                ctx.esn_cache.equalized.begin(),
                ctx.esn_cache.equalized.begin() + cfg.np);
            const std::vector<numerics::CMatrix> data(
                ctx.esn_cache.equalized.begin() + cfg.np, ctx.esn_cache.equalized.end());
            const auto det = structdet::StructDetector::train(
                xhat_pilots, pilots, ctx.modulation, ctx.sigma2, cfg.classifier,
                derive_seed(ctx.seed, kClassifier));
            detected = det.detect(data).bits;
            break;
        }
        case Detector::lmmse: {
            const auto y = ofdm::ofdm_demodulate(ctx.rx);
            const std::vector<numerics::CMatrix> y_pilots(y.begin(), y.begin() + cfg.np);
            const std::vector<numerics::CMatrix> y_data(y.begin() + cfg.np, y.end());
            const auto csi = baselines::estimate_csi(y_pilots, pilots, ctx.sigma2);
            detected = baselines::lmmse_detect(y_data, csi, constellation);
            break;
        }
    }
    return count_errors(ctx, detected);
}

SubframeStats run_subframe(const SimConfig& cfg, double ebn0_db, Detector detector,
                           std::uint64_t subframe_seed) {
    SubframeContext ctx = make_subframe_context(cfg, ebn0_db, subframe_seed);
    return detect_in_context(cfg, ctx, detector);
}

SweepResult run_ber_sweep(const SimConfig& cfg, int threads,
                          const std::function<void(const SweepRow&)>& on_row) {
    cfg.validate();
    SweepResult result;
    const int n_det = static_cast<int>(cfg.detectors.size());

    for (std::size_t point = 0; point < cfg.ebn0_db.size(); ++point) {
        const double ebn0 = cfg.ebn0_db[point];
        const int n_sub = cfg.subframes_per_point;
        // stats[subframe][detector], filled independently of worker order.
        std::vector<std::vector<SubframeStats>> stats(
            n_sub, std::vector<SubframeStats>(n_det));
        std::vector<double> det_seconds(n_det, 0.0);

        auto run_one = [&](int s, std::vector<double>& seconds_acc) {
            const std::uint64_t seed = subframe_seed(cfg.seed, point, s);
            const auto t0 = std::chrono::steady_clock::now();
            SubframeContext ctx = make_subframe_context(cfg, ebn0, seed);
            const auto t1 = std::chrono::steady_clock::now();
            const double shared =
                std::chrono::duration<double>(t1 - t0).count() / n_det;
            for (int d = 0; d < n_det; ++d) {
                const auto d0 = std::chrono::steady_clock::now();
                stats[s][d] = detect_in_context(cfg, ctx, cfg.detectors[d]);
                const auto d1 = std::chrono::steady_clock::now();
                seconds_acc[d] +=
                    shared + std::chrono::duration<double>(d1 - d0).count();
            }
        };

        if (threads <= 1) {
            for (int s = 0; s < n_sub; ++s) run_one(s, det_seconds);
        } else {
            std::atomic<int> next{0};
            std::vector<std::thread> pool;
            std::vector<std::vector<double>> seconds_per_thread(
                threads, std::vector<double>(n_det, 0.0));
            for (int w = 0; w < threads; ++w) {
                pool.emplace_back([&, w] {
                    for (int s = next.fetch_add(1); s < n_sub; s = next.fetch_add(1)) {
                        run_one(s, seconds_per_thread[w]);
                    }
                });
            }
            for (auto& t : pool) t.join();
            for (const auto& acc : seconds_per_thread) {
                for (int d = 0; d < n_det; ++d) det_seconds[d] += acc[d];
            }
        }

        for (int d = 0; d < n_det; ++d) {
            SweepRow row;
            row.ebn0_db = ebn0;
            row.detector = cfg.detectors[d];
            row.adapt = cfg.adapt;
            row.subframes = n_sub;
            row.seconds = det_seconds[d];
            std::vector<double> bers;
            std::vector<int> bps;
            std::map<int, int> rank_hist;
            std::map<int, int> mod_hist;
            for (int s = 0; s < n_sub; ++s) {
                const SubframeStats& st = stats[s][d];
                row.bits += st.bits();
                row.errors += st.errors();
                for (const auto& stream : st.streams) {
                    bers.push_back(static_cast<double>(stream.errors) /
                                   static_cast<double>(stream.bits));
                    bps.push_back(stream.bits_per_symbol);
                }
                ++rank_hist[st.rank];
                ++mod_hist[st.modulation];
            }
            row.ber = static_cast<double>(row.errors) / static_cast<double>(row.bits);
            row.raw_ber = compute_raw_ber(bers, bps);
            auto mode_of = [](const std::map<int, int>& hist) {
                int best_key = 0;
                int best_count = -1;
                for (const auto& [key, count] : hist) {
                    if (count > best_count) {  // ties resolve to the smaller key
                        best_count = count;
                        best_key = key;
                    }
                }
                return best_key;
            };
            row.rank_mode = mode_of(rank_hist);
            row.mod_mode = mode_of(mod_hist);
            result.rows.push_back(row);
            if (on_row) on_row(row);
        }
    }
    return result;
}

std::string csv_header() {
    return
        "# link-level detector sweep\n"
        "# noise convention: sigma2 = Nt*Es/(log2(M)*10^(EbN0_dB/10)) with Es=1,\n"
        "# fixed by the configured Nt and modulation order; rank/link adaptation\n"
        "# changes the transmitted rate, never the noise level.\n"
        "ebn0_db,detector,adapt_mode,ber,raw_ber,bits,errors,rank_mode,mod_mode,"
        "subframes,seconds\n";
}

std::string csv_row(const SweepRow& row) {
    char seconds[32];
    std::snprintf(seconds, sizeof(seconds), "%.3f", row.seconds);
    std::string line;
    line += format_double(row.ebn0_db);
    line += ',' + to_string(row.detector);
    line += ',' + to_string(row.adapt);
    line += ',' + format_double(row.ber);
    line += ',' + format_double(row.raw_ber);
    line += ',' + std::to_string(row.bits);
    line += ',' + std::to_string(row.errors);
    line += ',' + std::to_string(row.rank_mode);
    line += ',' + std::to_string(row.mod_mode);
    line += ',' + std::to_string(row.subframes);
    line += ',';
    line += seconds;
    line += '\n';
    return line;
}

std::string to_csv(const SweepResult& result) {
    std::string csv = csv_header();
    for (const SweepRow& row : result.rows) csv += csv_row(row);
    return csv;
}

}  // namespace rcsim::harness
