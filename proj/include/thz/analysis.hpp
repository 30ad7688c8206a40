#pragma once

#include "thz/phy.hpp"
#include "thz/types.hpp"

namespace thz {

// Unwrapped phase and its derivatives on a channel's grid. Points where
// |h| < floor (or with too few neighbors to difference across) are masked;
// group delay and GDD are finite wherever the mask is false.
struct PhaseProfile {
    FreqGrid grid;
    std::vector<double> phase_unwrapped_rad;  // unwrapped arg(h)
    std::vector<double> group_delay_ps;       // -d(arg h)/dw
    std::vector<double> gdd_ps2;              // d(group_delay)/dw = -d2(arg h)/dw2
    std::vector<bool> amplitude_floor_mask;
};

// Unwraps arg(h) along the grid; derivatives by central differences on the
// interior of each unmasked run, second-order one-sided at run edges.
PhaseProfile phase_profile(const ChannelResponse& channel, double amplitude_floor = kAmplitudeFloor);

// 2 pi B mean(|gdd|) over [f_lo, f_hi], returned in ps. Values at or above
// the symbol duration mark significant waveform distortion.
double integrated_gdd_metric_ps(const PhaseProfile& profile, double f_lo_ghz, double f_hi_ghz);

// Mean |GDD| (in s^2) at which the integrated metric equals the symbol
// duration 1/B; scales as 1/B^2.
double required_mean_abs_gdd_s2(double bandwidth_hz);

// Half-wavelength travel time (c / 2f) / v in seconds.
double coherence_time_s(double carrier_ghz, double speed_kmh);

// Peak-to-average power ratio, 10 log10(max|x|^2 / mean|x|^2), in dB.
double papr_db(const Waveform& wave);

}  // namespace thz
