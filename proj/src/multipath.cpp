#include "thz/multipath.hpp"

#include <cmath>
#include <sstream>

#include "thz/rng.hpp"

namespace thz {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

void validate(const PathSet& paths) {
    if (paths.paths.empty()) throw ValidationError("paths", "path set must contain at least one path");
    for (const Path& p : paths.paths) {
        if (!(p.delay_ps >= 0.0)) throw ValidationError("delay", "path delays must be non-negative");
        if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
            throw ValidationError("gain", "path gains must be finite");
    }
}

void validate(const SurfaceStats& stats) {
    if (!(stats.min_height_um >= 0.0)) throw ValidationError("min_height", "heights must be non-negative");
    if (!(stats.min_height_um <= stats.mean_height_um && stats.mean_height_um <= stats.max_height_um))
        throw ValidationError("mean_height", "need min <= mean <= max surface height");
    if (!(stats.incidence_angle_deg >= 0.0 && stats.incidence_angle_deg < 90.0))
        throw ValidationError("incidence_angle", "incidence angle must be in [0, 90) degrees");
    if (stats.n_scatterers < 1) throw ValidationError("n_scatterers", "need at least one scatterer");
}

ChannelResponse multipath_transfer(const PathSet& paths, const FreqGrid& grid) {
    validate(paths);
    validate(grid);
    ChannelResponse ch{grid, std::vector<cplx>(grid.n, cplx{0.0, 0.0}), 0.0, ""};
    for (const Path& p : paths.paths) {
        const double tau_s = p.delay_ps * 1e-12;
        for (std::size_t i = 0; i < grid.n; ++i)
            ch.h[i] += p.gain * std::polar(1.0, -kTwoPi * grid.freq_ghz(i) * 1e9 * tau_s);
    }
    std::ostringstream label;
    label << "multipath(" << paths.paths.size() << " paths)";
    ch.label = label.str();
    return ch;
}

PathSet rough_surface_paths(const SurfaceStats& stats, std::uint64_t seed) {
    validate(stats);
    Rng rng(seed);
    const double std_dev = (stats.max_height_um - stats.min_height_um) / 4.0;
    const double cos_theta = std::cos(stats.incidence_angle_deg * M_PI / 180.0);
    PathSet out;
    out.paths.reserve(stats.n_scatterers);
    const double gain = 1.0 / static_cast<double>(stats.n_scatterers);
    for (std::size_t i = 0; i < stats.n_scatterers; ++i) {
        double h = stats.mean_height_um;
        if (std_dev > 0.0) {
            do {
                h = stats.mean_height_um + std_dev * rng.gaussian();
            } while (h < stats.min_height_um || h > stats.max_height_um);
        }
        // round trip through the height profile, projected on the normal
        const double delay_ps = 2.0 * h * 1e-6 * cos_theta / kSpeedOfLight * 1e12;
        out.paths.push_back(Path{delay_ps, cplx{gain, 0.0}, "scatter" + std::to_string(i)});
    }
    return out;
}

ChannelResponse cascade(std::span<const ChannelResponse> channels) {
    if (channels.empty()) throw ValidationError("channels", "cascade of zero channels");
    ChannelResponse out = channels.front();
    validate(out);
    for (std::size_t c = 1; c < channels.size(); ++c) {
        const ChannelResponse& next = channels[c];
        validate(next);
        if (!(next.grid == out.grid))
            throw GridMismatchError("cascade requires identical frequency grids");
        for (std::size_t i = 0; i < out.h.size(); ++i) out.h[i] *= next.h[i];
        out.label += " * " + next.label;
        out.distance_m = 0.0;
    }
    return out;
}

ChannelResponse cascade(const ChannelResponse& a, const ChannelResponse& b) {
    const ChannelResponse chain[] = {a, b};
    return cascade(std::span<const ChannelResponse>(chain, 2));
}

ChannelResponse conjugate(const ChannelResponse& ch) {
    ChannelResponse out = ch;
    for (cplx& v : out.h) v = std::conj(v);
    out.label = "conj(" + ch.label + ")";
    out.distance_m = 0.0;
    return out;
}

}  // namespace thz
