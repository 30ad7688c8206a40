#include "thz/equalize.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thz/analysis.hpp"
#include "thz/rng.hpp"

namespace thz {

namespace {

std::vector<cplx> constellation(Scheme scheme) {
    if (scheme == Scheme::BPSK) return {cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
    const double s = 0.70710678118654752440084436210485;
    // index = (re<0)<<1 | (im<0), matching constellation_index()
    return {cplx{s, s}, cplx{s, -s}, cplx{-s, s}, cplx{-s, -s}};
}

// Least-squares affine fit phi ~ a + b*w, centered for conditioning.
std::pair<double, double> fit_affine(std::span<const double> w, std::span<const double> phi) {
    const std::size_t n = w.size();
    double wm = 0.0, pm = 0.0;
    for (std::size_t i = 0; i < n; ++i) { wm += w[i]; pm += phi[i]; }
    wm /= static_cast<double>(n);
    pm /= static_cast<double>(n);
    double sxx = 0.0, sxp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = w[i] - wm;
        sxx += x * x;
        sxp += x * (phi[i] - pm);
    }
    const double b = sxx > 0.0 ? sxp / sxx : 0.0;
    return {pm - b * wm, b};
}

// Unwrap arg(h) over an index range, requiring amplitude above the floor.
std::vector<double> unwrap_band(const ChannelResponse& ch, std::size_t ia, std::size_t ib) {
    std::vector<double> phi(ib - ia + 1);
    for (std::size_t i = ia; i <= ib; ++i) {
        if (std::abs(ch.h[i]) < kAmplitudeFloor) {
            std::ostringstream msg;
            msg << "amplitude below floor at " << ch.grid.freq_ghz(i)
                << " GHz; phase undefined in band";
            throw MaskedPhaseError(msg.str());
        }
    }
    phi[0] = std::arg(ch.h[ia]);
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (std::size_t i = ia + 1; i <= ib; ++i) {
        double d = std::arg(ch.h[i]) - std::arg(ch.h[i - 1]);
        d -= kTwoPi * std::round(d / kTwoPi);
        phi[i - ia] = phi[i - ia - 1] + d;
    }
    return phi;
}

void band_indices(const FreqGrid& grid, Band band, std::size_t& ia, std::size_t& ib) {
    if (!(band.f_hi_ghz > band.f_lo_ghz)) throw ValidationError("band", "band must have positive width");
    if (!grid.covers(band.f_lo_ghz, band.f_hi_ghz))
        throw ValidationError("band", "band extends beyond the grid");
    ia = static_cast<std::size_t>(std::ceil((band.f_lo_ghz - grid.f_start_ghz) / grid.df_ghz - 1e-9));
    ib = static_cast<std::size_t>(std::floor((band.f_hi_ghz - grid.f_start_ghz) / grid.df_ghz + 1e-9));
    if (ib >= grid.n) ib = grid.n - 1;
    if (ib <= ia + 1) throw ValidationError("band", "band covers too few grid points");
}

struct Design {
    Eigen::VectorXcd v;
    int delay = 0;
    double mse = 1.0;
    double loading = 0.0;
};

// Joint feed-forward/feedback MMSE design. With n_fb = 0 this is exactly the
// finite-length linear Wiener solution.
Design design_ff_fb(const std::vector<cplx>& h, int n_ff, int n_fb, double sigma2) {
    const int L = static_cast<int>(h.size());
    if (n_ff < 1) throw ValidationError("n_taps", "need at least one feed-forward tap");
    if (n_fb < 0) throw ValidationError("n_taps", "feedback tap count must be non-negative");

    // autocorrelation rho(k) = sum_m h[m] conj(h[m+k])
    std::vector<cplx> rho(n_ff, cplx{0.0, 0.0});
    for (int k = 0; k < n_ff; ++k)
        for (int m = 0; m + k < L; ++m) rho[k] += h[m] * std::conj(h[m + k]);
    auto rho_at = [&](int k) -> cplx {
        if (k >= 0) return k < n_ff ? rho[k] : cplx{0.0, 0.0};
        return -k < n_ff ? std::conj(rho[-k]) : cplx{0.0, 0.0};
    };

    Eigen::MatrixXcd a_full(n_ff, n_ff);
    for (int i = 0; i < n_ff; ++i)
        for (int j = 0; j < n_ff; ++j) a_full(i, j) = std::conj(rho_at(i - j));

    Design best;
    bool have_best = false;
    for (int d = 0; d < n_ff + L - 1; ++d) {
        Eigen::MatrixXcd a = a_full;
        for (int q = d + 1; q <= d + n_fb && q < n_ff + L - 1; ++q) {
            // remove feedback-cancelled postcursors from the cost
            for (int i = 0; i < n_ff; ++i) {
                if (q - i < 0 || q - i >= L) continue;
                for (int j = 0; j < n_ff; ++j) {
                    if (q - j < 0 || q - j >= L) continue;
                    a(i, j) -= std::conj(h[q - i]) * h[q - j];
                }
            }
        }
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n_ff);
        for (int i = 0; i < n_ff; ++i)
            if (d - i >= 0 && d - i < L) b(i) = std::conj(h[d - i]);

        double loading = 0.0;
        Eigen::MatrixXcd areg = a + sigma2 * Eigen::MatrixXcd::Identity(n_ff, n_ff);
        Eigen::VectorXcd v = areg.ldlt().solve(b);
        double mse = 1.0 - b.dot(v).real();
        if (!std::isfinite(mse) || mse < -1e-9) {
            loading = 1e-12;
            areg += loading * Eigen::MatrixXcd::Identity(n_ff, n_ff);
            v = areg.ldlt().solve(b);
            mse = 1.0 - b.dot(v).real();
        }
        if (!std::isfinite(mse)) continue;
        if (!have_best || mse < best.mse) {
            best = Design{std::move(v), d, mse, loading};
            have_best = true;
        }
    }
    if (!have_best) throw ValidationError("taps", "equalizer design failed for all delays");
    return best;
}

}  // namespace

FirChannelEstimate estimate_fir(const ChannelResponse& channel, const LinkConfig& cfg) {
    cfg.check();
    validate(channel);
    constexpr std::size_t kMargin = 8;
    for (std::size_t n_probe = 2048; n_probe <= 32768; n_probe *= 4) {
        std::vector<cplx> symbols(n_probe, cplx{0.0, 0.0});
        const std::size_t center = n_probe / 2;
        symbols[center] = cplx{1.0, 0.0};
        Waveform rx = apply_channel(shape_frame(symbols, cfg), channel);
        std::vector<cplx> y = matched_filter_symbols(rx, cfg);
        y.resize(n_probe);

        double peak = 0.0;
        std::size_t main_idx = 0;
        for (std::size_t i = 0; i < n_probe; ++i) {
            if (std::abs(y[i]) > peak) { peak = std::abs(y[i]); main_idx = i; }
        }
        if (peak <= 0.0) throw ValidationError("channel", "channel annihilated the probe");
        const double threshold = 1e-4 * peak;
        std::size_t first = main_idx, last = main_idx;
        for (std::size_t i = 0; i < n_probe; ++i) {
            if (std::abs(y[i]) >= threshold) { first = std::min(first, i); last = std::max(last, i); }
        }
        if (first < kMargin || last + kMargin >= n_probe) continue;  // wrap risk; retry longer
        FirChannelEstimate est;
        est.taps.assign(y.begin() + first, y.begin() + last + 1);
        est.delay_offset = static_cast<int>(first) - static_cast<int>(center);
        est.source = FirChannelEstimate::Source::genie_from_h;
        return est;
    }
    throw Error("estimate", "channel memory exceeds the longest supported probe frame");
}

FirChannelEstimate estimate_fir_lms(std::span<const cplx> rx_soft, std::span<const cplx> pilots,
                                    int n_taps, double step, int passes) {
    if (n_taps < 1) throw ValidationError("n_taps", "need at least one tap");
    if (rx_soft.size() != pilots.size())
        throw ValidationError("pilots", "pilot and received lengths differ");
    std::vector<cplx> h(n_taps, cplx{0.0, 0.0});
    for (int pass = 0; pass < passes; ++pass) {
        for (std::size_t k = 0; k < rx_soft.size(); ++k) {
            cplx pred{0.0, 0.0};
            double energy = 1e-12;
            for (int m = 0; m < n_taps; ++m) {
                if (k < static_cast<std::size_t>(m)) break;
                pred += h[m] * pilots[k - m];
                energy += std::norm(pilots[k - m]);
            }
            const cplx err = rx_soft[k] - pred;
            for (int m = 0; m < n_taps; ++m) {
                if (k < static_cast<std::size_t>(m)) break;
                h[m] += step * err * std::conj(pilots[k - m]) / energy;
            }
        }
    }
    FirChannelEstimate est;
    est.taps = std::move(h);
    est.delay_offset = 0;
    est.source = FirChannelEstimate::Source::pilot_trained;
    return est;
}

ChannelResponse zf_equalizer(const ChannelResponse& channel, Band band) {
    validate(channel);
    std::size_t ia = 0, ib = 0;
    band_indices(channel.grid, band, ia, ib);
    ChannelResponse out = identity_channel(channel.grid, "zf(" + channel.label + ")");
    for (std::size_t i = ia; i <= ib; ++i) {
        if (std::abs(channel.h[i]) < kAmplitudeFloor) {
            std::ostringstream msg;
            msg << "in-band null at " << channel.grid.freq_ghz(i)
                << " GHz; zero-forcing inverse does not exist";
            throw NonInvertibleChannelError(channel.grid.freq_ghz(i), msg.str());
        }
        out.h[i] = 1.0 / channel.h[i];
    }
    return out;
}

LinearFilter linear_mmse(const FirChannelEstimate& est, const EqualizerSpec& spec) {
    if (spec.kind != EqualizerSpec::Kind::linear_mmse)
        throw ValidationError("kind", "spec kind must be linear_mmse");
    if (est.taps.empty()) throw ValidationError("taps", "empty channel estimate");
    Design d = design_ff_fb(est.taps, spec.n_taps, 0, spec.noise_variance);
    LinearFilter f;
    f.taps.assign(d.v.data(), d.v.data() + d.v.size());
    f.decision_delay = d.delay;
    f.mse = d.mse;
    f.diagonal_loading = d.loading;
    return f;
}

DfeFilter design_dfe(const FirChannelEstimate& est, int n_ff, int n_fb, double noise_variance) {
    if (est.taps.empty()) throw ValidationError("taps", "empty channel estimate");
    Design d = design_ff_fb(est.taps, n_ff, n_fb, noise_variance);
    DfeFilter f;
    f.ff.assign(d.v.data(), d.v.data() + d.v.size());
    f.decision_delay = d.delay;
    f.mse = d.mse;
    f.diagonal_loading = d.loading;
    // feedback taps cancel the combined-response postcursors
    const int L = static_cast<int>(est.taps.size());
    f.fb.assign(n_fb, cplx{0.0, 0.0});
    for (int j = 1; j <= n_fb; ++j) {
        const int q = d.delay + j;
        cplx fq{0.0, 0.0};
        for (int i = 0; i < n_ff; ++i)
            if (q - i >= 0 && q - i < L) fq += f.ff[i] * est.taps[q - i];
        f.fb[j - 1] = fq;
    }
    return f;
}

std::vector<cplx> apply_linear(const LinearFilter& filter, const FirChannelEstimate& est,
                               std::span<const cplx> soft, std::size_t payload_start,
                               std::size_t n_symbols) {
    std::vector<cplx> out(n_symbols, cplx{0.0, 0.0});
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(payload_start) + est.delay_offset +
                                filter.decision_delay;
    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(soft.size());
    for (std::size_t t = 0; t < n_symbols; ++t) {
        cplx u{0.0, 0.0};
        for (std::size_t i = 0; i < filter.taps.size(); ++i) {
            const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(t) -
                                       static_cast<std::ptrdiff_t>(i);
            if (idx >= 0 && idx < len) u += filter.taps[i] * soft[idx];
        }
        out[t] = u;
    }
    return out;
}

std::vector<cplx> apply_dfe(const DfeFilter& f, const FirChannelEstimate& est,
                            std::span<const cplx> soft, std::size_t payload_start,
                            std::size_t n_symbols, Scheme scheme) {
    std::vector<cplx> decided(n_symbols, cplx{0.0, 0.0});
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(payload_start) + est.delay_offset +
                                f.decision_delay;
    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(soft.size());
    for (std::size_t t = 0; t < n_symbols; ++t) {
        cplx u{0.0, 0.0};
        for (std::size_t i = 0; i < f.ff.size(); ++i) {
            const std::ptrdiff_t idx = base + static_cast<std::ptrdiff_t>(t) -
                                       static_cast<std::ptrdiff_t>(i);
            if (idx >= 0 && idx < len) u += f.ff[i] * soft[idx];
        }
        for (std::size_t j = 1; j <= f.fb.size(); ++j) {
            if (t >= j) u -= f.fb[j - 1] * decided[t - j];
            // symbols before the payload are guard zeros: nothing to subtract
        }
        decided[t] = slice_symbol(u, scheme);
    }
    return decided;
}

std::vector<cplx> dfe(const FirChannelEstimate& est, const EqualizerSpec& spec,
                      std::span<const cplx> soft, std::size_t payload_start,
                      std::size_t n_symbols, Scheme scheme) {
    if (spec.kind != EqualizerSpec::Kind::dfe)
        throw ValidationError("kind", "spec kind must be dfe");
    const DfeFilter f = design_dfe(est, spec.n_taps, spec.n_taps, spec.noise_variance);
    return apply_dfe(f, est, soft, payload_start, n_symbols, scheme);
}

std::vector<cplx> mlse(const FirChannelEstimate& est, std::span<const cplx> soft,
                       std::size_t payload_start, std::size_t n_symbols, Scheme scheme,
                       std::uint64_t state_budget) {
    if (est.taps.empty()) throw ValidationError("taps", "empty channel estimate");
    const auto points = constellation(scheme);
    const std::uint64_t m = points.size();
    const int cml = est.cml();
    // Refuse before allocating anything.
    if (cml > 0) {
        const double bits = cml * std::log2(static_cast<double>(m));
        if (bits > 62.0 || (1ULL << static_cast<int>(std::ceil(bits))) > state_budget * 2) {
            std::ostringstream msg;
            msg << "MLSE needs M^CML = " << m << "^" << cml
                << " trellis states, exceeding the state budget of " << state_budget;
            throw ComplexityError(msg.str());
        }
        std::uint64_t states = 1;
        for (int i = 0; i < cml; ++i) states *= m;
        if (states > state_budget) {
            std::ostringstream msg;
            msg << "MLSE needs " << states << " trellis states, exceeding the state budget of "
                << state_budget;
            throw ComplexityError(msg.str());
        }
        if (states * (n_symbols + cml) > (1ULL << 27)) {
            std::ostringstream msg;
            msg << "MLSE survivor storage (" << states << " states x " << n_symbols
                << " symbols) exceeds the memory budget";
            throw ComplexityError(msg.str());
        }
    }

    const std::ptrdiff_t len = static_cast<std::ptrdiff_t>(soft.size());
    auto obs = [&](std::size_t j, bool& present) -> cplx {
        const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(payload_start) + est.delay_offset +
                                   static_cast<std::ptrdiff_t>(j);
        present = idx >= 0 && idx < len;
        return present ? soft[idx] : cplx{0.0, 0.0};
    };

    if (cml == 0) {  // memoryless channel: per-symbol ML decision
        std::vector<cplx> out(n_symbols);
        for (std::size_t t = 0; t < n_symbols; ++t) {
            bool present = false;
            const cplx y = obs(t, present);
            std::size_t best = 0;
            double best_metric = 0.0;
            for (std::size_t a = 0; a < m; ++a) {
                const double metric = present ? std::norm(y - est.taps[0] * points[a]) : 0.0;
                if (a == 0 || metric < best_metric) { best_metric = metric; best = a; }
            }
            out[t] = points[best];
        }
        return out;
    }

    // State at step k encodes the last min(k, cml) symbols, most recent in the
    // least significant digit. Symbols before the block are zeros, which the
    // shrunken early state space represents exactly.
    auto digit = [&](std::uint64_t state, int t) -> std::uint64_t {  // t-th most recent
        for (int i = 0; i < t; ++i) state /= m;
        return state % m;
    };
    std::vector<double> cur{0.0};  // single empty-history state
    std::vector<std::vector<std::uint32_t>> surv_prev(n_symbols);
    std::vector<std::vector<std::uint8_t>> surv_in(n_symbols);
    std::uint64_t pow_full = 1;
    for (int i = 0; i < cml; ++i) pow_full *= m;

    for (std::size_t k = 0; k < n_symbols; ++k) {
        const int q = std::min<int>(static_cast<int>(k), cml);
        const int q_next = std::min<int>(static_cast<int>(k) + 1, cml);
        std::uint64_t n_next = 1;
        for (int i = 0; i < q_next; ++i) n_next *= m;
        std::vector<double> next(n_next, std::numeric_limits<double>::infinity());
        surv_prev[k].assign(n_next, 0);
        surv_in[k].assign(n_next, 0);
        bool present = false;
        const cplx y = obs(k, present);
        for (std::uint64_t u = 0; u < cur.size(); ++u) {
            if (!std::isfinite(cur[u])) continue;
            cplx isi{0.0, 0.0};
            for (int t = 1; t <= q && t < static_cast<int>(est.taps.size()); ++t)
                isi += est.taps[t] * points[digit(u, t - 1)];
            for (std::uint64_t a = 0; a < m; ++a) {
                const double metric =
                    cur[u] + (present ? std::norm(y - est.taps[0] * points[a] - isi) : 0.0);
                // drop the oldest digit once the history is full
                std::uint64_t nu = a + u * m;
                if (q == cml) nu = a + (u % (pow_full / m)) * m;
                if (metric < next[nu]) {
                    next[nu] = metric;
                    surv_prev[k][nu] = static_cast<std::uint32_t>(u);
                    surv_in[k][nu] = static_cast<std::uint8_t>(a);
                }
            }
        }
        cur = std::move(next);
    }

    // tail observations after the last input symbol
    for (std::uint64_t u = 0; u < cur.size(); ++u) {
        if (!std::isfinite(cur[u])) continue;
        for (int j = 0; j < cml; ++j) {
            const std::size_t k = n_symbols + static_cast<std::size_t>(j);
            bool present = false;
            const cplx y = obs(k, present);
            if (!present) continue;
            cplx pred{0.0, 0.0};
            for (int t = 0; t < cml; ++t) {
                // symbol s_{n-1-t} contributes via tap (k - (n-1-t))
                const std::ptrdiff_t tap = static_cast<std::ptrdiff_t>(k) -
                                           (static_cast<std::ptrdiff_t>(n_symbols) - 1 - t);
                if (tap >= 0 && tap < static_cast<std::ptrdiff_t>(est.taps.size()) &&
                    t < std::min<int>(static_cast<int>(n_symbols), cml))
                    pred += est.taps[tap] * points[digit(u, t)];
            }
            cur[u] += std::norm(y - pred);
        }
    }

    std::uint64_t best_state = 0;
    for (std::uint64_t u = 1; u < cur.size(); ++u)
        if (cur[u] < cur[best_state]) best_state = u;

    std::vector<cplx> out(n_symbols);
    std::uint64_t state = best_state;
    for (std::size_t k = n_symbols; k-- > 0;) {
        out[k] = points[surv_in[k][state]];
        state = surv_prev[k][state];
    }
    return out;
}

ChannelResponse pdc_filter(const ChannelResponse& channel, Band band) {
    validate(channel);
    std::size_t ia = 0, ib = 0;
    band_indices(channel.grid, band, ia, ib);
    const std::vector<double> phi = unwrap_band(channel, ia, ib);
    std::vector<double> w(phi.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = channel.grid.omega(ia + i);
    const auto [a, b] = fit_affine(w, phi);

    ChannelResponse out = identity_channel(channel.grid, "pdc(" + channel.label + ")");
    for (std::size_t i = ia; i <= ib; ++i)
        out.h[i] = std::polar(1.0, -(phi[i - ia] - (a + b * channel.grid.omega(i))));
    return out;
}

ChannelResponse scramble_profile(std::uint64_t key, const FreqGrid& grid, Band band,
                                 double target_metric_ps, int n_segments) {
    if (!(target_metric_ps > 0.0))
        throw ValidationError("target_metric", "target metric must be positive");
    if (n_segments < 1) throw ValidationError("n_segments", "need at least one segment");
    std::size_t ia = 0, ib = 0;
    band_indices(grid, band, ia, ib);

    // Random C1 piecewise cubic (Hermite) phase over the band.
    Rng rng(key);
    const int nk = n_segments + 1;
    const double f_lo = grid.freq_ghz(ia);
    const double f_hi = grid.freq_ghz(ib);
    const double seg = (f_hi - f_lo) / n_segments;
    std::vector<double> knot_v(nk), knot_d(nk);
    for (int j = 0; j < nk; ++j) knot_v[j] = rng.gaussian();
    for (int j = 0; j < nk; ++j) knot_d[j] = rng.gaussian() * 4.0 / seg;

    std::vector<double> phi(ib - ia + 1);
    std::vector<double> w(ib - ia + 1);
    for (std::size_t i = ia; i <= ib; ++i) {
        const double f = grid.freq_ghz(i);
        int j = std::min(static_cast<int>((f - f_lo) / seg), n_segments - 1);
        const double t = (f - (f_lo + j * seg)) / seg;
        const double t2 = t * t, t3 = t2 * t;
        phi[i - ia] = (2 * t3 - 3 * t2 + 1) * knot_v[j] + (t3 - 2 * t2 + t) * seg * knot_d[j] +
                      (-2 * t3 + 3 * t2) * knot_v[j + 1] + (t3 - t2) * seg * knot_d[j + 1];
        w[i - ia] = grid.omega(i);
    }
    const auto [a, b] = fit_affine(w, phi);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] -= a + b * w[i];

    auto build = [&](double scale) {
        ChannelResponse ch = identity_channel(grid, "scramble(key=" + std::to_string(key) + ")");
        for (std::size_t i = ia; i <= ib; ++i) ch.h[i] = std::polar(1.0, -scale * phi[i - ia]);
        return ch;
    };
    const double metric0 =
        integrated_gdd_metric_ps(phase_profile(build(1.0)), f_lo, f_hi);
    if (!(metric0 > 0.0))
        throw ValidationError("n_segments", "profile produced no curvature to scale");
    return build(target_metric_ps / metric0);
}

}  // namespace thz
