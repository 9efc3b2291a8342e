#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rcsim/adaptation.hpp"
#include "rcsim/baselines.hpp"
#include "rcsim/channel.hpp"
#include "rcsim/esn.hpp"
#include "rcsim/struct_detector.hpp"

namespace rcsim::harness {

enum class Detector { rcstruct, rcnet, lmmse };
enum class AdaptMode { none, rank, link, both };

std::string to_string(Detector d);
std::string to_string(AdaptMode m);
Detector detector_from_string(const std::string& s);
AdaptMode adapt_from_string(const std::string& s);

struct SimConfig {
    int nt = 2;
    int nr = 2;
    int nsc = 64;
    int ncp = 16;
    int np = 4;
    int nd = 16;
    int mod_order = 16;
    int lc = 4;
    double decay = 1.0;
    std::vector<double> ebn0_db{0, 5, 10, 15, 20};
    std::vector<Detector> detectors{Detector::rcstruct, Detector::rcnet,
                                    Detector::lmmse};
    channel::PaModel pa{};
    AdaptMode adapt = AdaptMode::none;
    int subframes_per_point = 100;
    std::uint64_t seed = 1;
    esn::EsnConfig esn{};
    structdet::StructDetectorConfig classifier{};
    std::string cqi_table_path;
    adaptation::CqiTable cqi = adaptation::CqiTable::defaults();
    double pt = 0.0;          // transmit power budget for adaptation; 0 -> Nt
    int subband_size = 84;    // precoder granularity in subcarriers

    void validate() const;
    double power_budget() const { return pt > 0.0 ? pt : static_cast<double>(nt); }

    /// Small configuration used by CI and the acceptance suite: 2x2, Nsc=64,
    /// Ncp=16, Np=4, Nd=16, Lc=4, 16-QAM, 100 subframes per point.
    static SimConfig desk();

    /// Full-scale configuration (4x4, Nsc=1024, window 128, 800 classifier
    /// epochs). Slow; not used by the test suite.
    static SimConfig paper_scale();

    static SimConfig from_json(const nlohmann::json& j);
    static SimConfig load(const std::string& path);
    nlohmann::json to_json() const;
};

/// Hamming distance divided by length.
double compute_ber(std::span<const std::uint8_t> tx_bits,
                   std::span<const std::uint8_t> rx_bits);

/// Bits-per-symbol weighted mean of per-stream BERs:
/// sum_j b_j BER_j / sum_j b_j.
double compute_raw_ber(std::span<const double> stream_bers,
                       std::span<const int> bits_per_symbol);

struct StreamStats {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    int bits_per_symbol = 0;
};

struct SubframeStats {
    std::vector<StreamStats> streams;
    int rank = 0;
    int modulation = 0;

    std::uint64_t bits() const;
    std::uint64_t errors() const;
};

/// Everything one subframe trial shares between detectors: the channel
/// realization, the transmitted grid, and the received signal. Detectors at
/// the same (Eb/N0, seed) see bit-identical received signals by construction.
struct SubframeContext {
    double sigma2 = 0.0;
    int rank = 0;
    int modulation = 0;
    channel::ChannelRealization ch;
    ofdm::SubframeGrid grid;              // stream-domain symbols (rank rows)
    std::vector<numerics::CMatrix> precoded;  // antenna-domain symbols (nt rows)
    ofdm::TimeSignal tx;                  // what the channel sees
    ofdm::TimeSignal stream_time;         // time-domain stream signal (ESN target)
    ofdm::TimeSignal rx;
    std::uint64_t seed = 0;

    // Lazily built reservoir pipeline, shared by the detectors that use it.
    struct EsnCache {
        bool ready = false;
        std::vector<esn::TrainedEsn> cascade;
        std::vector<numerics::CMatrix> equalized;  // all N demodulated symbols
    };
    EsnCache esn_cache;
};

SubframeContext make_subframe_context(const SimConfig& cfg, double ebn0_db,
                                      std::uint64_t subframe_seed);

/// Runs one detector inside a prepared context (training strictly on the Np
/// pilot symbols, error counting strictly on the Nd data symbols).
SubframeStats detect_in_context(const SimConfig& cfg, SubframeContext& ctx,
                                Detector detector);

/// One self-contained subframe trial; equivalent to building the context and
/// detecting, with all randomness derived from `subframe_seed`.
SubframeStats run_subframe(const SimConfig& cfg, double ebn0_db, Detector detector,
                           std::uint64_t subframe_seed);

struct SweepRow {
    double ebn0_db = 0.0;
    Detector detector = Detector::rcstruct;
    AdaptMode adapt = AdaptMode::none;
    double ber = 0.0;
    double raw_ber = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    int rank_mode = 0;
    int mod_mode = 0;
    int subframes = 0;
    double seconds = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
};

/// Full Monte-Carlo sweep over ebn0 x detectors x subframes. Per-subframe
/// seeds follow subframe_seed(master, point, index), so the result is
/// byte-reproducible for a fixed config and independent of the worker count.
SweepResult run_ber_sweep(const SimConfig& cfg, int threads = 1,
                          const std::function<void(const SweepRow&)>& on_row = {});

/// CSV with the fixed column set
/// ebn0_db,detector,adapt_mode,ber,raw_ber,bits,errors,rank_mode,mod_mode,subframes,seconds
/// preceded by header comments documenting the noise convention.
std::string to_csv(const SweepResult& result);
std::string csv_row(const SweepRow& row);
std::string csv_header();

}  // namespace rcsim::harness
