#pragma once

#include <cstdint>

#include "thz/types.hpp"

namespace thz {

struct Path {
    double delay_ps = 0.0;
    cplx gain{1.0, 0.0};
    std::string label;
};

struct PathSet {
    std::vector<Path> paths;
};

// Statistical description of an electromagnetically rough reflector.
struct SurfaceStats {
    double mean_height_um = 0.0;
    double min_height_um = 0.0;
    double max_height_um = 0.0;
    double incidence_angle_deg = 0.0;  // from normal
    std::size_t n_scatterers = 1;
    std::string correlation_note;
};

void validate(const PathSet& paths);
void validate(const SurfaceStats& stats);

// h(f) = sum_k gain_k exp(-j 2 pi f delay_k)
ChannelResponse multipath_transfer(const PathSet& paths, const FreqGrid& grid);

// Micro-multipath cluster for a rough reflector: n_scatterers heights drawn
// from a truncated Gaussian (mean, std = range/4, clipped to [min, max]),
// each converted to excess delay 2 h cos(theta) / c with equal magnitudes
// 1/n and zero intrinsic phase. Deterministic per seed.
PathSet rough_surface_paths(const SurfaceStats& stats, std::uint64_t seed);

// Pointwise product of responses on identical grids.
ChannelResponse cascade(std::span<const ChannelResponse> channels);
ChannelResponse cascade(const ChannelResponse& a, const ChannelResponse& b);

// Phase-conjugate response (exact inverse of an all-pass).
ChannelResponse conjugate(const ChannelResponse& ch);

}  // namespace thz
