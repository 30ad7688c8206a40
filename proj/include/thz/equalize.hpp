#pragma once

#include <cstdint>
#include <optional>

#include "thz/phy.hpp"
#include "thz/types.hpp"

namespace thz {

// Symbol-spaced end-to-end impulse response (pulse x channel x matched
// filter). taps[0] sits delay_offset symbols after the transmitted symbol.
struct FirChannelEstimate {
    std::vector<cplx> taps;
    int delay_offset = 0;
    enum class Source { genie_from_h, pilot_trained } source = Source::genie_from_h;

    int cml() const { return static_cast<int>(taps.size()) - 1; }
};

struct EqualizerSpec {
    enum class Kind { zf, linear_mmse, dfe, mlse } kind = Kind::linear_mmse;
    int n_taps = 1;               // DFE: feed-forward count = feedback count = n_taps
    double noise_variance = 0.0;  // complex noise variance per symbol
};

// Genie estimate: shapes a single probe symbol, runs it through the channel
// and matched filter, and keeps the contiguous taps >= 1e-4 of the main tap.
FirChannelEstimate estimate_fir(const ChannelResponse& channel, const LinkConfig& cfg);

// Pilot-trained alternative: NLMS identification from received soft symbols
// and known pilots.
FirChannelEstimate estimate_fir_lms(std::span<const cplx> rx_soft, std::span<const cplx> pilots,
                                    int n_taps, double step = 0.25, int passes = 8);

// Full inverse 1/h on the band (amplitude and phase); unity outside.
ChannelResponse zf_equalizer(const ChannelResponse& channel, Band band);

// Symbol-spaced filter; estimates of s_t are formed as
//   u_t = sum_i taps[i] * y[t + delay_offset + decision_delay - i].
struct LinearFilter {
    std::vector<cplx> taps;
    int decision_delay = 0;
    double mse = 1.0;
    double diagonal_loading = 0.0;  // nonzero when regularization kicked in
};

struct DfeFilter {
    std::vector<cplx> ff;
    std::vector<cplx> fb;
    int decision_delay = 0;
    double mse = 1.0;
    double diagonal_loading = 0.0;
};

// Finite-length Wiener solution with the decision delay picked by minimum
// MSE over all candidate delays.
LinearFilter linear_mmse(const FirChannelEstimate& est, const EqualizerSpec& spec);

DfeFilter design_dfe(const FirChannelEstimate& est, int n_ff, int n_fb, double noise_variance);

std::vector<cplx> apply_linear(const LinearFilter& filter, const FirChannelEstimate& est,
                               std::span<const cplx> soft, std::size_t payload_start,
                               std::size_t n_symbols);

std::vector<cplx> apply_dfe(const DfeFilter& filter, const FirChannelEstimate& est,
                            std::span<const cplx> soft, std::size_t payload_start,
                            std::size_t n_symbols, Scheme scheme);

// MMSE-designed feed-forward/feedback DFE with hard decision feedback.
// Returns decided constellation points for the payload.
std::vector<cplx> dfe(const FirChannelEstimate& est, const EqualizerSpec& spec,
                      std::span<const cplx> soft, std::size_t payload_start,
                      std::size_t n_symbols, Scheme scheme);

inline constexpr std::uint64_t kDefaultStateBudget = 1ULL << 20;

// Viterbi sequence detection over the trellis defined by `est`; exact
// zero-symbol boundary handling so short blocks match exhaustive search.
std::vector<cplx> mlse(const FirChannelEstimate& est, std::span<const cplx> soft,
                       std::size_t payload_start, std::size_t n_symbols, Scheme scheme,
                       std::uint64_t state_budget = kDefaultStateBudget);

// Phase-only compensation: |G| = 1 everywhere, arg G cancels all phase
// curvature of the channel over the band (best-fit affine phase retained).
ChannelResponse pdc_filter(const ChannelResponse& channel, Band band);

// Deterministic unit-magnitude phase scrambler: piecewise-cubic random phase
// over the band, scaled so the integrated GDD metric hits target_metric_ps.
// Exactly inverted by conjugate().
ChannelResponse scramble_profile(std::uint64_t key, const FreqGrid& grid, Band band,
                                 double target_metric_ps, int n_segments);

}  // namespace thz
