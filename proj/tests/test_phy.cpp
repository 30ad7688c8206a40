#include "doctest.h"

#include <cmath>
#include <numeric>

#include "thz/fft.hpp"
#include "thz/link.hpp"
#include "thz/multipath.hpp"
#include "thz/phy.hpp"

using namespace thz;

namespace {

LinkConfig qpsk10() {
    LinkConfig cfg;
    cfg.scheme = Scheme::QPSK;
    cfg.symbol_rate_gbaud = 10.0;
    cfg.carrier_ghz = 100.0;
    cfg.rolloff = 0.35;
    cfg.span_symbols = 16;
    cfg.frame_bits = 1024;
    cfg.samples_per_symbol = 2;
    cfg.guard_symbols = 32;
    return cfg;
}

double total_energy(const Waveform& w) {
    double e = 0.0;
    for (const cplx& v : w.samples) e += std::norm(v);
    return e;
}

// channel grid aligned with the waveform's FFT bins (no interpolation error)
FreqGrid aligned_grid(const Waveform& w) {
    const double df = w.sample_rate_gsps / static_cast<double>(w.samples.size());
    const double lo = w.carrier_ghz - w.sample_rate_gsps / 2.0;
    return FreqGrid{lo, df, w.samples.size() + 1};
}

}  // namespace

TEST_SUITE("phy") {

TEST_CASE("prbs: period, determinism, frame coverage") {
    const auto bits = prbs(7, 0x5a, 254);
    for (int p = 1; p < 127; ++p) {  // 127 is prime; any shorter period divides it
        bool periodic = true;
        for (int i = 0; i + p < 254 && periodic; ++i) periodic = bits[i] == bits[i + p];
        CHECK(!periodic);
    }
    bool period127 = true;
    for (int i = 0; i + 127 < 254; ++i) period127 = period127 && bits[i] == bits[i + 127];
    CHECK(period127);

    CHECK(prbs(15, 99, 512) == prbs(15, 99, 512));
    CHECK(prbs(15, 99, 512) != prbs(15, 98, 512));

    // 4096-bit frame of PRBS15 never repeats internally (overlap of at least
    // 64 bits so chance agreement cannot masquerade as a period)
    const auto frame = prbs(15, 0x1234, 4096);
    for (int p = 1; p <= 4096 - 64; ++p) {
        bool periodic = true;
        for (int i = 0; i + p < 4096 && periodic; ++i) periodic = frame[i] == frame[i + p];
        CHECK(!periodic);
    }

    CHECK_THROWS_AS(prbs(8, 1, 16), ValidationError);
    CHECK_THROWS_AS(prbs(7, 0, 16), ValidationError);
}

TEST_CASE("all-zero BPSK frame maps to +1 symbols and survives loopback") {
    LinkConfig cfg = qpsk10();
    cfg.scheme = Scheme::BPSK;
    cfg.frame_bits = 512;
    std::vector<std::uint8_t> bits(512, 0);
    const auto soft = demodulate(modulate(bits, cfg), cfg);
    REQUIRE(soft.size() == 512);
    for (const cplx& s : soft) CHECK(std::abs(s - cplx{1.0, 0.0}) < 1e-9);
}

TEST_CASE("QPSK spectrum is confined to the occupied band") {
    LinkConfig cfg = qpsk10();  // 20 Gbit/s at 10 Gbaud
    const auto bits = prbs(15, 7, cfg.frame_bits);
    const Waveform w = modulate(bits, cfg);
    std::vector<cplx> spec = w.samples;
    fft(spec);
    const std::size_t n = spec.size();
    double inside = 0.0, outside = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double nu = (k <= n / 2) ? static_cast<double>(k) / n
                                       : (static_cast<double>(k) - static_cast<double>(n)) / n;
        const double off_ghz = std::abs(nu) * w.sample_rate_gsps;
        if (off_ghz <= (1.0 + cfg.rolloff) * cfg.symbol_rate_gbaud / 2.0) inside += std::norm(spec[k]);
        else outside += std::norm(spec[k]);
    }
    CHECK(inside / (inside + outside) > 0.99);
    CHECK(outside / (inside + outside) < 1e-20);  // exactly band-limited shaping
}

TEST_CASE("noiseless loopback recovers constellation points exactly") {
    for (int sps : {2, 4}) {
        for (double beta : {0.0, 0.35, 0.6}) {
            LinkConfig cfg = qpsk10();
            cfg.samples_per_symbol = sps;
            cfg.rolloff = beta;
            const auto bits = prbs(15, 3 + sps, cfg.frame_bits);
            const auto tx = map_symbols(bits, cfg.scheme);
            const auto soft = demodulate(modulate(bits, cfg), cfg);
            REQUIRE(soft.size() == tx.size());
            double worst = 0.0;
            for (std::size_t i = 0; i < tx.size(); ++i)
                worst = std::max(worst, std::abs(soft[i] - tx[i]));
            CHECK(worst < 1e-9);
            CHECK(demap_symbols(soft, cfg.scheme) == bits);
        }
    }
}

TEST_CASE("apply_channel: identity, integer-sample delay shift, linearity") {
    LinkConfig cfg = qpsk10();
    const auto bits = prbs(15, 11, cfg.frame_bits);
    const Waveform w = modulate(bits, cfg);
    const auto grid = aligned_grid(w);

    const Waveform same = apply_channel(w, identity_channel(grid));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        num += std::norm(same.samples[i] - w.samples[i]);
        den += std::norm(w.samples[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-12);

    // tau = 3 samples = 150 ps, carrier*tau = 15 cycles: pure circular shift
    const Waveform shifted = apply_channel(w, delay_channel(grid, 150.0));
    const std::size_t n = w.samples.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(shifted.samples[(i + 3) % n] - w.samples[i]));
    CHECK(worst < 1e-9);

    const auto bits2 = prbs(15, 12, cfg.frame_bits);
    const Waveform w2 = modulate(bits2, cfg);
    const auto q = quadratic_phase_channel(grid, cfg.carrier_ghz, 800.0);
    Waveform mix = w;
    for (std::size_t i = 0; i < n; ++i)
        mix.samples[i] = 0.7 * w.samples[i] + cplx{0.0, 1.3} * w2.samples[i];
    const Waveform lhs = apply_channel(mix, q);
    const Waveform a = apply_channel(w, q);
    const Waveform b = apply_channel(w2, q);
    worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst,
                         std::abs(lhs.samples[i] - (0.7 * a.samples[i] + cplx{0.0, 1.3} * b.samples[i])));
    CHECK(worst < 1e-9);
}

TEST_CASE("pure-GDD channel stretches the pulse but leaves spectral amplitude") {
    // 100 ps pulse at f_c = 130 GHz
    Waveform pulse;
    pulse.sample_rate_gsps = 40.0;
    pulse.carrier_ghz = 130.0;
    pulse.samples_per_symbol = 2;
    pulse.samples.assign(4096, cplx{0.0, 0.0});
    const double t_fwhm_ps = 100.0;
    const double sig = t_fwhm_ps / 2.3548200450309493;  // FWHM -> sigma
    const double dt_ps = 1e3 / pulse.sample_rate_gsps;
    for (std::size_t i = 0; i < pulse.samples.size(); ++i) {
        const double t = (static_cast<double>(i) - 2048.0) * dt_ps;
        pulse.samples[i] = std::exp(-t * t / (2.0 * sig * sig));
    }
    const auto grid = make_grid(105.0, 155.0, 0.01);
    const Waveform out = apply_channel(pulse, quadratic_phase_channel(grid, 130.0, 2533.0));

    std::vector<cplx> s_in = pulse.samples, s_out = out.samples;
    fft(s_in);
    fft(s_out);
    double peak = 0.0;
    for (const cplx& v : s_in) peak = std::max(peak, std::abs(v));
    for (std::size_t k = 0; k < s_in.size(); ++k) {
        if (std::abs(s_in[k]) < 1e-9 * peak) continue;
        CHECK(std::abs(s_out[k]) == doctest::Approx(std::abs(s_in[k])).epsilon(1e-9));
    }

    // time-domain stretching: count samples above half the (new) peak
    auto width = [](const Waveform& w) {
        double pk = 0.0;
        for (const cplx& v : w.samples) pk = std::max(pk, std::abs(v));
        int count = 0;
        for (const cplx& v : w.samples) count += std::abs(v) > 0.5 * pk;
        return count;
    };
    CHECK(width(out) > 2 * width(pulse));
}

TEST_CASE("phase-only channels conserve energy (Parseval)") {
    LinkConfig cfg = qpsk10();
    const auto bits = prbs(15, 21, cfg.frame_bits);
    const Waveform w = modulate(bits, cfg);
    const auto grid = make_grid(85.0, 115.0, 0.01);
    const Waveform out = apply_channel(w, quadratic_phase_channel(grid, 100.0, 5000.0));
    CHECK(total_energy(out) == doctest::Approx(total_energy(w)).epsilon(1e-12));
}

TEST_CASE("coverage error names the missing band") {
    LinkConfig cfg = qpsk10();
    const auto bits = prbs(15, 31, cfg.frame_bits);
    const Waveform w = modulate(bits, cfg);
    const auto narrow = identity_channel(make_grid(97.0, 103.0, 0.01));
    CHECK_THROWS_AS(apply_channel(w, narrow), CoverageError);
}

TEST_CASE("awgn determinism and the no-noise flag") {
    LinkConfig cfg = qpsk10();
    const auto bits = prbs(15, 41, cfg.frame_bits);
    const Waveform w = modulate(bits, cfg);
    const Waveform n1 = add_awgn(w, 10.0, 777, 2);
    const Waveform n2 = add_awgn(w, 10.0, 777, 2);
    const Waveform n3 = add_awgn(w, 10.0, 778, 2);
    bool same = true, different = false;
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
        same = same && n1.samples[i] == n2.samples[i];
        different = different || n1.samples[i] != n3.samples[i];
    }
    CHECK(same);
    CHECK(different);

    const Waveform clean = add_awgn(w, std::numeric_limits<double>::infinity(), 777, 2);
    for (std::size_t i = 0; i < w.samples.size(); ++i) CHECK(clean.samples[i] == w.samples[i]);
}

TEST_CASE("BPSK Monte-Carlo BER sits in the binomial interval of Q(sqrt(2 Eb/N0))") {
    LinkConfig cfg = qpsk10();
    cfg.scheme = Scheme::BPSK;
    cfg.frame_bits = 16384;
    const double ebn0 = 6.0;
    const double p = q_function(std::sqrt(2.0 * std::pow(10.0, ebn0 / 10.0)));
    std::uint64_t errors = 0, total = 0;
    for (int f = 0; f < 25; ++f) {
        const auto bits = prbs(23, 1000 + f, cfg.frame_bits);
        const auto soft = demodulate(add_awgn(modulate(bits, cfg), ebn0, 5000 + f, 1), cfg);
        const auto hat = demap_symbols(soft, cfg.scheme);
        for (std::size_t i = 0; i < bits.size(); ++i) errors += bits[i] != hat[i];
        total += bits.size();
    }
    const double ber = static_cast<double>(errors) / static_cast<double>(total);
    const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(total));
    CHECK(std::abs(ber - p) < 3.0 * sigma);
}

TEST_CASE("demodulate rejects mismatched configs") {
    LinkConfig cfg = qpsk10();
    const auto bits = prbs(15, 51, cfg.frame_bits);
    const Waveform w = modulate(bits, cfg);
    LinkConfig other = cfg;
    other.samples_per_symbol = 4;
    CHECK_THROWS_AS(demodulate(w, other), ValidationError);
    other = cfg;
    other.carrier_ghz = 101.0;
    CHECK_THROWS_AS(demodulate(w, other), ValidationError);
}

TEST_CASE("carrier-phase rotation rotates the constellation exactly") {
    LinkConfig cfg = qpsk10();
    const auto bits = prbs(15, 61, cfg.frame_bits);
    const auto tx = map_symbols(bits, cfg.scheme);
    const Waveform w = modulate(bits, cfg);
    const auto grid = make_grid(85.0, 115.0, 0.01);
    ChannelResponse rot = identity_channel(grid, "rot");
    for (cplx& v : rot.h) v = std::polar(1.0, 0.7);
    const auto soft = demodulate(apply_channel(w, rot), cfg);
    for (std::size_t i = 0; i < tx.size(); ++i)
        CHECK(std::abs(soft[i] - tx[i] * std::polar(1.0, 0.7)) < 1e-9);
}

TEST_CASE("two-path ISI smears the QPSK constellation") {
    LinkConfig cfg = qpsk10();
    const auto bits = prbs(15, 71, cfg.frame_bits);
    const auto tx = map_symbols(bits, cfg.scheme);
    const auto grid = make_grid(85.0, 115.0, 0.01);
    PathSet tp{{Path{0.0, cplx{1.0, 0.0}, ""}, Path{50.5, cplx{1.0, 0.0}, ""}}};

    auto spread = [&](const std::vector<cplx>& soft) {
        double s = 0.0;
        for (std::size_t i = 0; i < soft.size(); ++i) s += std::norm(soft[i] - tx[i]);
        return std::sqrt(s / soft.size());
    };
    const auto clean = demodulate(modulate(bits, cfg), cfg);
    const auto isi =
        demodulate(apply_channel(modulate(bits, cfg), multipath_transfer(tp, grid)), cfg);
    CHECK(spread(clean) < 1e-9);
    CHECK(spread(isi) > 0.05);
    CHECK(spread(isi) > 10.0 * std::max(spread(clean), 1e-12));
}

TEST_CASE("link config invariants") {
    LinkConfig cfg = qpsk10();
    cfg.frame_bits = 1023;  // not a multiple of 2 bits/symbol
    CHECK_THROWS_AS(cfg.check(), ValidationError);
    cfg = qpsk10();
    cfg.samples_per_symbol = 1;
    CHECK_THROWS_AS(cfg.check(), ValidationError);
    cfg = qpsk10();
    cfg.rolloff = 1.5;
    CHECK_THROWS_AS(cfg.check(), ValidationError);
    cfg = qpsk10();
    std::vector<std::uint8_t> wrong(cfg.frame_bits + 2, 0);
    CHECK_THROWS_AS(modulate(wrong, cfg), ValidationError);
}

}  // TEST_SUITE
