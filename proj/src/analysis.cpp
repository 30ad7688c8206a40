#include "thz/analysis.hpp"

#include <cmath>

namespace thz {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double wrap_to_pi(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

}  // namespace

PhaseProfile phase_profile(const ChannelResponse& channel, double amplitude_floor) {
    validate(channel);
    const std::size_t n = channel.grid.n;
    if (n < 5) throw ValidationError("grid", "phase profile needs at least 5 grid points");

    PhaseProfile p;
    p.grid = channel.grid;
    p.phase_unwrapped_rad.assign(n, 0.0);
    p.group_delay_ps.assign(n, 0.0);
    p.gdd_ps2.assign(n, 0.0);
    p.amplitude_floor_mask.assign(n, false);
    for (std::size_t i = 0; i < n; ++i)
        p.amplitude_floor_mask[i] = std::abs(channel.h[i]) < amplitude_floor;

    const double dw = kTwoPi * channel.grid.df_ghz * 1e9;
    std::size_t i = 0;
    while (i < n) {
        if (p.amplitude_floor_mask[i]) { ++i; continue; }
        std::size_t a = i;
        while (i < n && !p.amplitude_floor_mask[i]) ++i;
        const std::size_t b = i - 1;  // unmasked run [a, b]
        const std::size_t len = b - a + 1;
        if (len < 4) {
            // too short to difference; mask the run
            for (std::size_t j = a; j <= b; ++j) p.amplitude_floor_mask[j] = true;
            continue;
        }
        auto& ph = p.phase_unwrapped_rad;
        ph[a] = std::arg(channel.h[a]);
        for (std::size_t j = a + 1; j <= b; ++j)
            ph[j] = ph[j - 1] + wrap_to_pi(std::arg(channel.h[j]) - std::arg(channel.h[j - 1]));

        // group delay = -d(arg h)/dw; GDD = d(group delay)/dw = -d2(arg h)/dw2,
        // so a stretching channel exp(-j D w^2 / 2) carries GDD = +D.
        for (std::size_t j = a + 1; j < b; ++j) {
            p.group_delay_ps[j] = -(ph[j + 1] - ph[j - 1]) / (2.0 * dw) * 1e12;
            p.gdd_ps2[j] = -(ph[j + 1] - 2.0 * ph[j] + ph[j - 1]) / (dw * dw) * 1e24;
        }
        // second-order one-sided first derivative, one-sided second difference
        p.group_delay_ps[a] = -(-3.0 * ph[a] + 4.0 * ph[a + 1] - ph[a + 2]) / (2.0 * dw) * 1e12;
        p.group_delay_ps[b] = -(3.0 * ph[b] - 4.0 * ph[b - 1] + ph[b - 2]) / (2.0 * dw) * 1e12;
        p.gdd_ps2[a] = -(2.0 * ph[a] - 5.0 * ph[a + 1] + 4.0 * ph[a + 2] - ph[a + 3]) / (dw * dw) * 1e24;
        p.gdd_ps2[b] = -(2.0 * ph[b] - 5.0 * ph[b - 1] + 4.0 * ph[b - 2] - ph[b - 3]) / (dw * dw) * 1e24;
    }
    return p;
}

double integrated_gdd_metric_ps(const PhaseProfile& profile, double f_lo_ghz, double f_hi_ghz) {
    if (!(f_hi_ghz > f_lo_ghz)) throw ValidationError("band", "band must have positive width");
    if (!profile.grid.covers(f_lo_ghz, f_hi_ghz))
        throw ValidationError("band", "band extends beyond the profile grid");
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < profile.grid.n; ++i) {
        const double f = profile.grid.freq_ghz(i);
        if (f < f_lo_ghz || f > f_hi_ghz || profile.amplitude_floor_mask[i]) continue;
        sum += std::abs(profile.gdd_ps2[i]) * 1e-24;
        ++count;
    }
    if (count < 2) throw ValidationError("band", "band contains fewer than 2 unmasked points");
    const double bandwidth_hz = (f_hi_ghz - f_lo_ghz) * 1e9;
    return kTwoPi * bandwidth_hz * (sum / static_cast<double>(count)) * 1e12;
}

double required_mean_abs_gdd_s2(double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw ValidationError("bandwidth", "bandwidth must be positive");
    return 1.0 / (kTwoPi * bandwidth_hz * bandwidth_hz);
}

double coherence_time_s(double carrier_ghz, double speed_kmh) {
    if (!(carrier_ghz > 0.0)) throw ValidationError("carrier", "carrier must be positive");
    if (!(speed_kmh > 0.0)) throw ValidationError("speed", "speed must be positive");
    const double v = speed_kmh / 3.6;
    return kSpeedOfLight / (2.0 * carrier_ghz * 1e9) / v;
}

double papr_db(const Waveform& wave) {
    if (wave.samples.empty()) throw ValidationError("waveform", "empty waveform");
    double peak = 0.0, sum = 0.0;
    for (const cplx& v : wave.samples) {
        const double p = std::norm(v);
        peak = std::max(peak, p);
        sum += p;
    }
    if (sum == 0.0) throw ValidationError("waveform", "all-zero waveform has no PAPR");
    const double mean = sum / static_cast<double>(wave.samples.size());
    return 10.0 * std::log10(peak / mean);
}

}  // namespace thz
