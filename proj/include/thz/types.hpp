#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "thz/errors.hpp"

namespace thz {

using cplx = std::complex<double>;

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kDefaultGridSpacingGhz = 0.01;
inline constexpr double kAmplitudeFloor = 1e-6;

// Uniform frequency grid, strictly increasing by construction.
struct FreqGrid {
    double f_start_ghz = 0.0;
    double df_ghz = 0.0;
    std::size_t n = 0;

    double freq_ghz(std::size_t i) const { return f_start_ghz + df_ghz * static_cast<double>(i); }
    double f_end_ghz() const { return freq_ghz(n == 0 ? 0 : n - 1); }
    double omega(std::size_t i) const;  // rad/s

    // Index of the grid point nearest to f (clamped to the grid).
    std::size_t nearest(double f_ghz) const;

    bool covers(double f_lo_ghz, double f_hi_ghz) const {
        return n > 0 && f_start_ghz <= f_lo_ghz && f_hi_ghz <= f_end_ghz();
    }
    bool operator==(const FreqGrid&) const = default;
};

FreqGrid make_grid(double f_start_ghz, double f_stop_ghz, double df_ghz = kDefaultGridSpacingGhz);
void validate(const FreqGrid& grid);

struct Band {
    double f_lo_ghz = 0.0;
    double f_hi_ghz = 0.0;
};

// Complex transfer function sampled on a uniform frequency grid.
struct ChannelResponse {
    FreqGrid grid;
    std::vector<cplx> h;
    double distance_m = 0.0;  // 0 for abstract or composed channels
    std::string label;
};

void validate(const ChannelResponse& ch);

ChannelResponse identity_channel(const FreqGrid& grid, std::string label = "identity");

// h = exp(-j * 0.5 * D * (w - w0)^2), a pure-GDD all-pass with constant GDD D.
ChannelResponse quadratic_phase_channel(const FreqGrid& grid, double f_center_ghz,
                                        double gdd_ps2, std::string label = "quadratic");

// h = exp(-j * w * tau), a pure delay.
ChannelResponse delay_channel(const FreqGrid& grid, double delay_ps, std::string label = "delay");

}  // namespace thz
