#include "thz/phy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "thz/fft.hpp"
#include "thz/rng.hpp"

namespace thz {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Raised-cosine magnitude at normalized frequency u = f / symbol_rate.
double raised_cosine(double u, double beta) {
    const double au = std::abs(u);
    if (beta <= 0.0) {
        if (au < 0.5) return 1.0;
        return au == 0.5 ? 0.5 : 0.0;
    }
    if (au <= (1.0 - beta) / 2.0) return 1.0;
    if (au < (1.0 + beta) / 2.0) {
        const double c = std::cos(M_PI / (2.0 * beta) * (au - (1.0 - beta) / 2.0));
        return c * c;
    }
    return 0.0;
}

// sqrt(sps * RC) on the frame FFT grid; real and symmetric (zero phase).
std::vector<double> rrc_bins(std::size_t n, int sps, double beta) {
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double nu = (k <= n / 2) ? static_cast<double>(k) / n
                                       : (static_cast<double>(k) - static_cast<double>(n)) / n;
        g[k] = std::sqrt(sps * raised_cosine(nu * sps, beta));
    }
    return g;
}

void filter_rrc(std::vector<cplx>& x, int sps, double beta) {
    fft(x);
    const auto g = rrc_bins(x.size(), sps, beta);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= g[k];
    ifft(x);
}

}  // namespace

int bits_per_symbol(Scheme scheme) { return scheme == Scheme::BPSK ? 1 : 2; }

const char* to_string(Scheme scheme) { return scheme == Scheme::BPSK ? "BPSK" : "QPSK"; }

int LinkConfig::frame_symbols() const { return frame_bits / bits_per_symbol(scheme); }

Band LinkConfig::occupied_band() const {
    const double half = (1.0 + rolloff) * symbol_rate_gbaud / 2.0;
    return Band{carrier_ghz - half, carrier_ghz + half};
}

void LinkConfig::check() const {
    if (!(symbol_rate_gbaud > 0.0)) throw ValidationError("symbol_rate", "symbol rate must be positive");
    if (!(carrier_ghz > 0.0)) throw ValidationError("carrier", "carrier must be positive");
    if (!(rolloff >= 0.0 && rolloff <= 1.0)) throw ValidationError("rolloff", "rolloff must be in [0, 1]");
    if (samples_per_symbol < 2)
        throw ValidationError("samples_per_symbol", "need at least 2 samples per symbol");
    if ((1.0 + rolloff) * symbol_rate_gbaud > sample_rate_gsps())
        throw ValidationError("samples_per_symbol", "occupied bandwidth exceeds sample rate");
    if (frame_bits <= 0 || frame_bits % bits_per_symbol(scheme) != 0)
        throw ValidationError("frame_bits", "frame_bits must be a positive multiple of bits per symbol");
    if (span_symbols < 0 || guard_symbols < 0)
        throw ValidationError("guard_symbols", "span and guard must be non-negative");
}

std::vector<std::uint8_t> prbs(int order, std::uint64_t seed, std::size_t n_bits) {
    // x^a + x^b + 1, all maximal
    int tap_b;
    switch (order) {
        case 7: tap_b = 6; break;
        case 9: tap_b = 5; break;
        case 15: tap_b = 14; break;
        case 23: tap_b = 18; break;
        default:
            throw ValidationError("order", "unsupported PRBS order " + std::to_string(order) +
                                               " (supported: 7, 9, 15, 23)");
    }
    if (seed == 0) throw ValidationError("seed", "PRBS seed must be nonzero");
    const std::uint64_t mask = (1ULL << order) - 1;
    std::uint64_t state = seed & mask;
    if (state == 0) state = 1;  // seed had no bits inside the register
    std::vector<std::uint8_t> bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        const std::uint64_t fb = ((state >> (order - 1)) ^ (state >> (tap_b - 1))) & 1ULL;
        bits[i] = static_cast<std::uint8_t>(fb);
        state = ((state << 1) | fb) & mask;
    }
    return bits;
}

std::vector<cplx> map_symbols(std::span<const std::uint8_t> bits, Scheme scheme) {
    const int bps = bits_per_symbol(scheme);
    if (bits.size() % bps != 0)
        throw ValidationError("bits", "bit count not a multiple of bits per symbol");
    std::vector<cplx> symbols(bits.size() / bps);
    if (scheme == Scheme::BPSK) {
        for (std::size_t i = 0; i < symbols.size(); ++i)
            symbols[i] = cplx(bits[i] ? -1.0 : 1.0, 0.0);
    } else {
        for (std::size_t i = 0; i < symbols.size(); ++i)
            symbols[i] = cplx(bits[2 * i] ? -kInvSqrt2 : kInvSqrt2,
                              bits[2 * i + 1] ? -kInvSqrt2 : kInvSqrt2);
    }
    return symbols;
}

cplx slice_symbol(cplx soft, Scheme scheme) {
    if (scheme == Scheme::BPSK) return cplx(soft.real() >= 0.0 ? 1.0 : -1.0, 0.0);
    return cplx(soft.real() >= 0.0 ? kInvSqrt2 : -kInvSqrt2,
                soft.imag() >= 0.0 ? kInvSqrt2 : -kInvSqrt2);
}

int constellation_index(cplx point, Scheme scheme) {
    if (scheme == Scheme::BPSK) return point.real() >= 0.0 ? 0 : 1;
    return (point.real() >= 0.0 ? 0 : 2) | (point.imag() >= 0.0 ? 0 : 1);
}

std::vector<std::uint8_t> demap_symbols(std::span<const cplx> soft, Scheme scheme) {
    std::vector<std::uint8_t> bits;
    bits.reserve(soft.size() * bits_per_symbol(scheme));
    for (const cplx& s : soft) {
        if (scheme == Scheme::BPSK) {
            bits.push_back(s.real() >= 0.0 ? 0 : 1);
        } else {
            bits.push_back(s.real() >= 0.0 ? 0 : 1);
            bits.push_back(s.imag() >= 0.0 ? 0 : 1);
        }
    }
    return bits;
}

Waveform shape_frame(std::span<const cplx> symbols, const LinkConfig& cfg) {
    cfg.check();
    if (symbols.empty()) throw ValidationError("symbols", "cannot shape an empty frame");
    const int sps = cfg.samples_per_symbol;
    const std::size_t n = next_pow2(symbols.size() * static_cast<std::size_t>(sps));
    std::vector<cplx> x(n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < symbols.size(); ++i) x[i * sps] = symbols[i];
    filter_rrc(x, sps, cfg.rolloff);
    return Waveform{std::move(x), cfg.sample_rate_gsps(), cfg.carrier_ghz, sps};
}

Waveform modulate(std::span<const std::uint8_t> bits, const LinkConfig& cfg) {
    cfg.check();
    if (static_cast<int>(bits.size()) != cfg.frame_bits)
        throw ValidationError("frame_bits", "expected " + std::to_string(cfg.frame_bits) +
                                                " bits, got " + std::to_string(bits.size()));
    const auto payload = map_symbols(bits, cfg.scheme);
    std::vector<cplx> frame(payload.size() + 2 * cfg.guard_symbols, cplx{0.0, 0.0});
    std::copy(payload.begin(), payload.end(), frame.begin() + cfg.guard_symbols);
    return shape_frame(frame, cfg);
}

Waveform apply_channel(const Waveform& wave, const ChannelResponse& channel) {
    validate(channel);
    if (wave.samples.empty()) throw ValidationError("waveform", "empty waveform");
    const std::size_t n = wave.samples.size();
    std::vector<cplx> spec = wave.samples;
    fft(spec);

    double peak = 0.0;
    for (const cplx& v : spec) peak = std::max(peak, std::abs(v));
    const double needed = 1e-12 * peak;

    const FreqGrid& g = channel.grid;
    double miss_lo = 0.0, miss_hi = 0.0;
    bool missing = false;
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double nu = (k <= n / 2) ? static_cast<double>(k) / n
                                       : (static_cast<double>(k) - static_cast<double>(n)) / n;
        const double f = wave.carrier_ghz + nu * wave.sample_rate_gsps;
        const bool covered = g.covers(f, f);
        if (!covered) {
            if (std::abs(spec[k]) > needed) {
                if (!missing) { miss_lo = miss_hi = f; missing = true; }
                miss_lo = std::min(miss_lo, f);
                miss_hi = std::max(miss_hi, f);
            }
            out[k] = spec[k];
            continue;
        }
        const double idx = (f - g.f_start_ghz) / g.df_ghz;
        std::size_t i0 = static_cast<std::size_t>(std::floor(idx));
        if (i0 >= g.n - 1) i0 = g.n - 2;
        const double frac = idx - static_cast<double>(i0);
        // polar interpolation keeps all-pass responses exactly unit magnitude
        const cplx h0 = channel.h[i0], h1 = channel.h[i0 + 1];
        const double m0 = std::abs(h0), m1 = std::abs(h1);
        double mag;
        if (frac == 0.0) mag = m0;
        else if (m0 == 0.0 || m1 == 0.0) mag = m0 * (1.0 - frac) + m1 * frac;
        else mag = m0 * std::pow(m1 / m0, frac);
        double dphi = std::arg(h1) - std::arg(h0);
        dphi -= 2.0 * M_PI * std::round(dphi / (2.0 * M_PI));
        out[k] = spec[k] * std::polar(mag, std::arg(h0) + frac * dphi);
    }
    if (missing) {
        std::ostringstream msg;
        msg << "channel grid does not cover occupied band [" << miss_lo << ", " << miss_hi
            << "] GHz (grid spans [" << g.f_start_ghz << ", " << g.f_end_ghz() << "] GHz)";
        throw CoverageError(msg.str());
    }
    ifft(out);
    return Waveform{std::move(out), wave.sample_rate_gsps, wave.carrier_ghz, wave.samples_per_symbol};
}

Waveform add_awgn(const Waveform& wave, double ebn0_db, std::uint64_t seed, int bps) {
    if (std::isinf(ebn0_db)) return wave;
    if (bps < 1) throw ValidationError("bps", "bits per symbol must be at least 1");
    // Unit-energy pulses: per-sample complex noise variance N0 gives
    // post-matched-filter symbol noise variance N0 exactly.
    const double n0 = 1.0 / (bps * std::pow(10.0, ebn0_db / 10.0));
    const double sigma = std::sqrt(n0 / 2.0);
    Rng rng(seed);
    Waveform out = wave;
    for (cplx& v : out.samples) v += cplx(sigma * rng.gaussian(), sigma * rng.gaussian());
    return out;
}

std::vector<cplx> matched_filter_symbols(const Waveform& wave, const LinkConfig& cfg) {
    if (wave.samples_per_symbol != cfg.samples_per_symbol ||
        std::abs(wave.sample_rate_gsps - cfg.sample_rate_gsps()) > 1e-9 ||
        std::abs(wave.carrier_ghz - cfg.carrier_ghz) > 1e-9)
        throw ValidationError("config", "waveform was not generated with this link config");
    std::vector<cplx> x = wave.samples;
    filter_rrc(x, cfg.samples_per_symbol, cfg.rolloff);
    std::vector<cplx> soft(x.size() / cfg.samples_per_symbol);
    for (std::size_t i = 0; i < soft.size(); ++i) soft[i] = x[i * cfg.samples_per_symbol];
    return soft;
}

std::vector<cplx> demodulate(const Waveform& wave, const LinkConfig& cfg) {
    const auto all = matched_filter_symbols(wave, cfg);
    const std::size_t want = cfg.guard_symbols + cfg.frame_symbols();
    if (all.size() < want)
        throw ValidationError("config", "waveform shorter than configured frame");
    return std::vector<cplx>(all.begin() + cfg.guard_symbols, all.begin() + want);
}

}  // namespace thz
