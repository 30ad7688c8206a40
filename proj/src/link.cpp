#include "thz/link.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "thz/multipath.hpp"
#include "thz/rng.hpp"

namespace thz {

namespace {

std::uint64_t fingerprint_of(const SweepSpec& spec, const ChannelResponse& channel) {
    std::ostringstream ss;
    ss << to_string(spec.link.scheme) << '|' << spec.link.symbol_rate_gbaud << '|'
       << spec.link.carrier_ghz << '|' << spec.link.rolloff << '|' << spec.link.span_symbols << '|'
       << spec.link.frame_bits << '|' << spec.link.samples_per_symbol << '|'
       << spec.link.guard_symbols << '|';
    if (spec.eq) ss << static_cast<int>(spec.eq->kind) << ':' << spec.eq->n_taps;
    else ss << "none";
    ss << '|' << static_cast<int>(spec.pdc) << '|' << spec.stop.min_errors << '|'
       << spec.stop.max_bits << '|' << spec.master_seed << '|' << spec.prbs_order << '|'
       << channel.label << '|' << channel.grid.f_start_ghz << '|' << channel.grid.df_ghz << '|'
       << channel.grid.n << '|' << channel.distance_m;
    for (double e : spec.ebn0_grid_db) ss << '|' << e;
    const std::string s = ss.str();
    return fnv1a(s.data(), s.size());
}

cplx main_tap_rotation(const FirChannelEstimate& est) {
    std::size_t main = 0;
    for (std::size_t i = 1; i < est.taps.size(); ++i)
        if (std::abs(est.taps[i]) > std::abs(est.taps[main])) main = i;
    const double mag = std::abs(est.taps[main]);
    if (mag == 0.0) return cplx{1.0, 0.0};
    return std::conj(est.taps[main]) / mag;  // unit derotator
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

SweepResult run_ber_sweep(const SweepSpec& spec, const ChannelResponse& channel) {
    spec.link.check();
    validate(channel);
    if (spec.ebn0_grid_db.empty()) throw ValidationError("ebn0_grid", "empty SNR grid");
    for (std::size_t i = 1; i < spec.ebn0_grid_db.size(); ++i)
        if (!(spec.ebn0_grid_db[i] > spec.ebn0_grid_db[i - 1]))
            throw ValidationError("ebn0_grid", "SNR grid must be strictly increasing");
    if (spec.stop.max_bits == 0 || spec.stop.min_errors == 0)
        throw ValidationError("stop_rule", "stop rule must allow at least one bit and one error");

    const Band band = spec.link.occupied_band();
    const int bps = bits_per_symbol(spec.link.scheme);

    // Receiver-visible linear chain: channel, then PDC, then (digital) ZF.
    ChannelResponse chain = channel;
    std::optional<ChannelResponse> pdc_resp;
    if (spec.pdc != PdcMode::off) {
        pdc_resp = pdc_filter(channel, band);
        chain = cascade(channel, *pdc_resp);
    }
    std::optional<ChannelResponse> zf_resp;
    const bool use_zf = spec.eq && spec.eq->kind == EqualizerSpec::Kind::zf;
    if (use_zf) zf_resp = zf_equalizer(chain, band);

    // Genie CSI of whatever the symbol-domain equalizer will see.
    LinkConfig link = spec.link;
    FirChannelEstimate est =
        estimate_fir(use_zf ? cascade(chain, *zf_resp) : chain, link);
    const int memory = static_cast<int>(est.taps.size()) + std::abs(est.delay_offset);
    link.guard_symbols = std::max(link.guard_symbols, link.span_symbols + memory + 16);

    const cplx derotate = main_tap_rotation(est);
    const std::uint64_t fingerprint = fingerprint_of(spec, channel);

    SweepResult result;
    result.channel_label = channel.label;
    result.eq_label = spec.eq ? std::string() : std::string("none");
    if (spec.eq) {
        switch (spec.eq->kind) {
            case EqualizerSpec::Kind::zf: result.eq_label = "zf"; break;
            case EqualizerSpec::Kind::linear_mmse:
                result.eq_label = "mmse:" + std::to_string(spec.eq->n_taps);
                break;
            case EqualizerSpec::Kind::dfe:
                result.eq_label = "dfe:" + std::to_string(spec.eq->n_taps);
                break;
            case EqualizerSpec::Kind::mlse: result.eq_label = "mlse"; break;
        }
    }
    result.pdc_on = spec.pdc != PdcMode::off;

    std::size_t snapshot_idx = spec.ebn0_grid_db.size();
    if (!std::isnan(spec.snapshot_ebn0_db)) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < spec.ebn0_grid_db.size(); ++i) {
            const double d = std::abs(spec.ebn0_grid_db[i] - spec.snapshot_ebn0_db);
            if (d < best) { best = d; snapshot_idx = i; }
        }
        result.snapshot_ebn0_db = spec.ebn0_grid_db[snapshot_idx];
    }

    const std::size_t n_payload = static_cast<std::size_t>(link.frame_symbols());
    for (std::size_t pi = 0; pi < spec.ebn0_grid_db.size(); ++pi) {
        const double ebn0 = spec.ebn0_grid_db[pi];
        const std::uint64_t point_seed = derive_seed(spec.master_seed, pi);

        EqualizerSpec eq_spec;
        std::optional<LinearFilter> mmse_filter;
        std::optional<DfeFilter> dfe_filter;
        if (spec.eq) {
            eq_spec = *spec.eq;
            eq_spec.noise_variance =
                std::isinf(ebn0) ? 0.0 : 1.0 / (bps * std::pow(10.0, ebn0 / 10.0));
            if (eq_spec.kind == EqualizerSpec::Kind::linear_mmse)
                mmse_filter = linear_mmse(est, eq_spec);
            else if (eq_spec.kind == EqualizerSpec::Kind::dfe)
                dfe_filter = design_dfe(est, eq_spec.n_taps, eq_spec.n_taps,
                                        eq_spec.noise_variance);
        }

        std::uint64_t errors = 0, bits_done = 0, frame = 0;
        while (errors < spec.stop.min_errors && bits_done < spec.stop.max_bits) {
            const std::uint64_t fseed = derive_seed(point_seed, frame);
            const auto bits = prbs(spec.prbs_order, fseed | 1ULL, link.frame_bits);
            Waveform wave = modulate(bits, link);
            if (spec.pdc == PdcMode::tx) wave = apply_channel(wave, *pdc_resp);
            wave = apply_channel(wave, spec.pdc == PdcMode::rx ? chain : channel);
            wave = add_awgn(wave, ebn0, derive_seed(fseed, 0x6e015e), bps);
            if (use_zf) wave = apply_channel(wave, *zf_resp);

            const auto soft = matched_filter_symbols(wave, link);
            const std::size_t payload_start = static_cast<std::size_t>(link.guard_symbols);

            std::vector<cplx> decided;
            std::vector<cplx> snapshot_soft;
            if (!spec.eq || spec.eq->kind == EqualizerSpec::Kind::zf) {
                decided.resize(n_payload);
                snapshot_soft.resize(n_payload);
                for (std::size_t t = 0; t < n_payload; ++t) {
                    const std::ptrdiff_t idx = static_cast<std::ptrdiff_t>(payload_start + t) +
                                               est.delay_offset;
                    cplx u{0.0, 0.0};
                    if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(soft.size()))
                        u = soft[idx] * derotate;
                    snapshot_soft[t] = u;
                    decided[t] = slice_symbol(u, link.scheme);
                }
            } else if (spec.eq->kind == EqualizerSpec::Kind::linear_mmse) {
                snapshot_soft = apply_linear(*mmse_filter, est, soft, payload_start, n_payload);
                decided.resize(n_payload);
                for (std::size_t t = 0; t < n_payload; ++t)
                    decided[t] = slice_symbol(snapshot_soft[t], link.scheme);
            } else if (spec.eq->kind == EqualizerSpec::Kind::dfe) {
                decided = apply_dfe(*dfe_filter, est, soft, payload_start, n_payload, link.scheme);
                snapshot_soft = decided;
            } else {
                decided = mlse(est, soft, payload_start, n_payload, link.scheme);
                snapshot_soft = decided;
            }

            const auto bits_hat = demap_symbols(decided, link.scheme);
            for (std::size_t b = 0; b < bits.size(); ++b)
                errors += bits[b] != bits_hat[b];
            bits_done += bits.size();

            if (pi == snapshot_idx && frame == 0) {
                const auto tx_symbols = map_symbols(bits, link.scheme);
                const std::size_t keep = std::min(spec.max_constellation_points, n_payload);
                result.constellation.reserve(keep);
                for (std::size_t t = 0; t < keep; ++t)
                    result.constellation.push_back(ConstellationPoint{
                        snapshot_soft[t], constellation_index(tx_symbols[t], link.scheme)});
            }
            ++frame;
        }

        BerResult r;
        r.ebn0_db = ebn0;
        r.bits_simulated = bits_done;
        r.bit_errors = errors;
        r.ber = bits_done ? static_cast<double>(errors) / static_cast<double>(bits_done) : 0.0;
        r.method = BerResult::Method::monte_carlo;
        r.config_fingerprint = fingerprint;
        result.points.push_back(r);
    }
    return result;
}

std::pair<FirChannelEstimate, double> equalized_response(const FirChannelEstimate& est,
                                                         const LinearFilter& filter) {
    const int L = static_cast<int>(est.taps.size());
    const int n = static_cast<int>(filter.taps.size());
    FirChannelEstimate out;
    out.taps.assign(n + L - 1, cplx{0.0, 0.0});
    for (int q = 0; q < n + L - 1; ++q)
        for (int i = 0; i < n; ++i)
            if (q - i >= 0 && q - i < L) out.taps[q] += filter.taps[i] * est.taps[q - i];
    out.delay_offset = 0;
    out.source = est.source;
    double gain = 0.0;
    for (const cplx& w : filter.taps) gain += std::norm(w);
    return {out, gain};
}

BerResult semi_analytic_ber(const FirChannelEstimate& est, Scheme scheme, double ebn0_db,
                            int cml_window, double noise_power_gain,
                            std::uint64_t enumeration_budget) {
    if (est.taps.empty()) throw ValidationError("taps", "empty channel estimate");
    if (cml_window < 0) throw ValidationError("cml_window", "window must be non-negative");
    const int bps = bits_per_symbol(scheme);
    const std::uint64_t m = scheme == Scheme::BPSK ? 2 : 4;

    // main tap and window selection by energy
    std::size_t main = 0;
    for (std::size_t i = 1; i < est.taps.size(); ++i)
        if (std::abs(est.taps[i]) > std::abs(est.taps[main])) main = i;
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < est.taps.size(); ++i)
        if (i != main) others.push_back(i);
    std::sort(others.begin(), others.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(est.taps[a]) > std::abs(est.taps[b]);
    });
    const std::size_t window = std::min<std::size_t>(others.size(), cml_window);

    double residual = 0.0;
    for (std::size_t i = window; i < others.size(); ++i) residual += std::norm(est.taps[others[i]]);
    if (residual >= 0.01 * std::norm(est.taps[main]))
        throw ValidationError("cml_window",
                              "taps outside the enumeration window hold >= 1% of main-tap energy");

    double patterns_log2 = window * std::log2(static_cast<double>(m));
    if (patterns_log2 > 62.0 ||
        static_cast<std::uint64_t>(std::llround(std::pow(m, window))) > enumeration_budget)
        throw ComplexityError("sequence enumeration exceeds budget; use the Monte-Carlo sweep");

    // derotate so the main tap is real-positive (genie carrier reference)
    const double main_mag = std::abs(est.taps[main]);
    if (main_mag == 0.0) throw ValidationError("taps", "main tap has zero magnitude");
    const cplx rot = std::conj(est.taps[main]) / main_mag;

    const auto point_of = [&](std::uint64_t digit) -> cplx {
        if (scheme == Scheme::BPSK) return cplx(digit ? -1.0 : 1.0, 0.0);
        const double s = 0.70710678118654752440084436210485;
        return cplx((digit & 2) ? -s : s, (digit & 1) ? -s : s);
    };
    const cplx ref = point_of(0);  // conditioning symbol; valid by symmetry

    const double n0 = noise_power_gain / (bps * std::pow(10.0, ebn0_db / 10.0));
    const double sigma_r = std::sqrt(n0 / 2.0);

    std::uint64_t n_patterns = 1;
    for (std::size_t i = 0; i < window; ++i) n_patterns *= m;

    double ber_sum = 0.0;
    for (std::uint64_t pat = 0; pat < n_patterns; ++pat) {
        cplx z = rot * est.taps[main] * ref;
        std::uint64_t rem = pat;
        for (std::size_t i = 0; i < window; ++i) {
            z += rot * est.taps[others[i]] * point_of(rem % m);
            rem /= m;
        }
        if (scheme == Scheme::BPSK) {
            ber_sum += q_function(z.real() / sigma_r);
        } else {
            // Gray QPSK: I and Q bits fail independently given the pattern
            ber_sum += 0.5 * (q_function(z.real() / sigma_r) + q_function(z.imag() / sigma_r));
        }
    }

    BerResult r;
    r.ebn0_db = ebn0_db;
    r.ber = ber_sum / static_cast<double>(n_patterns);
    r.method = BerResult::Method::semi_analytic;
    std::ostringstream ss;
    ss << to_string(scheme) << '|' << ebn0_db << '|' << cml_window << '|' << noise_power_gain
       << '|' << est.taps.size() << '|' << est.delay_offset;
    const std::string s = ss.str();
    r.config_fingerprint = fnv1a(s.data(), s.size());
    return r;
}

}  // namespace thz
