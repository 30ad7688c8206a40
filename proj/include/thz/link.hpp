#pragma once

#include <cstdint>
#include <optional>

#include "thz/equalize.hpp"
#include "thz/phy.hpp"
#include "thz/types.hpp"

namespace thz {

struct BerResult {
    double ebn0_db = 0.0;
    std::uint64_t bits_simulated = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    enum class Method { monte_carlo, semi_analytic } method = Method::monte_carlo;
    std::uint64_t config_fingerprint = 0;
};

struct ConstellationPoint {
    cplx soft;
    int tx_index = 0;
};

struct SweepResult {
    std::vector<BerResult> points;
    std::vector<ConstellationPoint> constellation;  // at the snapshot SNR
    double snapshot_ebn0_db = 0.0;
    std::string channel_label;
    std::string eq_label;
    bool pdc_on = false;
};

struct StopRule {
    std::uint64_t min_errors = 100;
    std::uint64_t max_bits = 100000000ULL;
};

enum class PdcMode { off, rx, tx };

struct SweepSpec {
    LinkConfig link;
    std::optional<EqualizerSpec> eq;  // nullopt: matched filter + slicer only
    PdcMode pdc = PdcMode::off;
    std::vector<double> ebn0_grid_db;
    StopRule stop;
    std::uint64_t master_seed = 1;
    double snapshot_ebn0_db = std::numeric_limits<double>::quiet_NaN();
    int prbs_order = 15;
    std::size_t max_constellation_points = 8192;
};

// Monte-Carlo BER sweep: per SNR point, fresh PRBS frames are modulated,
// passed through (optionally PDC-corrected) channel and AWGN, demodulated,
// equalized and counted until the stop rule is met. Deterministic per
// master seed.
SweepResult run_ber_sweep(const SweepSpec& spec, const ChannelResponse& channel);

// Sequence-enumeration BER: conditions the Gaussian error probability on
// every interfering pattern in the window. `noise_power_gain` scales the
// noise variance at the decision point (||w||^2 for a linear equalizer).
BerResult semi_analytic_ber(const FirChannelEstimate& est, Scheme scheme, double ebn0_db,
                            int cml_window, double noise_power_gain = 1.0,
                            std::uint64_t enumeration_budget = 1ULL << 22);

// Combined response seen at a linear equalizer's decision point, plus its
// noise power gain: feeds semi_analytic_ber for equalized links.
std::pair<FirChannelEstimate, double> equalized_response(const FirChannelEstimate& est,
                                                         const LinearFilter& filter);

double q_function(double x);

}  // namespace thz
