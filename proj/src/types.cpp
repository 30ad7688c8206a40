#include "thz/types.hpp"

#include <cmath>

namespace thz {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

double FreqGrid::omega(std::size_t i) const { return kTwoPi * freq_ghz(i) * 1e9; }

std::size_t FreqGrid::nearest(double f_ghz) const {
    if (n == 0) return 0;
    double idx = std::round((f_ghz - f_start_ghz) / df_ghz);
    if (idx < 0.0) return 0;
    if (idx >= static_cast<double>(n)) return n - 1;
    return static_cast<std::size_t>(idx);
}

FreqGrid make_grid(double f_start_ghz, double f_stop_ghz, double df_ghz) {
    if (!(df_ghz > 0.0)) throw ValidationError("df", "grid spacing must be positive");
    if (!(f_stop_ghz >= f_start_ghz))
        throw ValidationError("f_stop", "grid end must not precede its start");
    auto n = static_cast<std::size_t>(std::floor((f_stop_ghz - f_start_ghz) / df_ghz + 0.5)) + 1;
    FreqGrid g{f_start_ghz, df_ghz, n};
    validate(g);
    return g;
}

void validate(const FreqGrid& grid) {
    if (grid.n == 0) throw ValidationError("grid", "grid is empty");
    if (!(grid.df_ghz > 0.0)) throw ValidationError("df", "grid spacing must be positive");
    if (!std::isfinite(grid.f_start_ghz) || !std::isfinite(grid.f_end_ghz()))
        throw ValidationError("grid", "grid bounds must be finite");
}

void validate(const ChannelResponse& ch) {
    validate(ch.grid);
    if (ch.h.size() != ch.grid.n)
        throw ValidationError("h", "transfer array length does not match grid");
    for (const cplx& v : ch.h)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw ValidationError("h", "transfer values must be finite");
}

ChannelResponse identity_channel(const FreqGrid& grid, std::string label) {
    validate(grid);
    return ChannelResponse{grid, std::vector<cplx>(grid.n, cplx{1.0, 0.0}), 0.0, std::move(label)};
}

ChannelResponse quadratic_phase_channel(const FreqGrid& grid, double f_center_ghz,
                                        double gdd_ps2, std::string label) {
    validate(grid);
    const double w0 = kTwoPi * f_center_ghz * 1e9;
    const double d_s2 = gdd_ps2 * 1e-24;
    ChannelResponse ch{grid, std::vector<cplx>(grid.n), 0.0, std::move(label)};
    for (std::size_t i = 0; i < grid.n; ++i) {
        const double dw = grid.omega(i) - w0;
        ch.h[i] = std::polar(1.0, -0.5 * d_s2 * dw * dw);
    }
    return ch;
}

ChannelResponse delay_channel(const FreqGrid& grid, double delay_ps, std::string label) {
    validate(grid);
    const double tau = delay_ps * 1e-12;
    ChannelResponse ch{grid, std::vector<cplx>(grid.n), 0.0, std::move(label)};
    for (std::size_t i = 0; i < grid.n; ++i) ch.h[i] = std::polar(1.0, -grid.omega(i) * tau);
    return ch;
}

}  // namespace thz
