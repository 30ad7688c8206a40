#pragma once

#include <cstdint>
#include <span>

#include "thz/types.hpp"

namespace thz {

enum class Scheme { BPSK, QPSK };

int bits_per_symbol(Scheme scheme);
const char* to_string(Scheme scheme);

// Complex baseband-equivalent envelope around `carrier_ghz`, unit energy per
// symbol. Guard symbols at the frame edges are zeros.
struct Waveform {
    std::vector<cplx> samples;
    double sample_rate_gsps = 0.0;
    double carrier_ghz = 0.0;
    int samples_per_symbol = 0;
};

struct LinkConfig {
    Scheme scheme = Scheme::QPSK;
    double symbol_rate_gbaud = 10.0;
    double carrier_ghz = 380.0;
    double rolloff = 0.35;
    int span_symbols = 16;   // shaping latency allocation
    int frame_bits = 4096;
    int samples_per_symbol = 2;
    int guard_symbols = 64;  // zero symbols inserted at each frame edge

    double sample_rate_gsps() const { return symbol_rate_gbaud * samples_per_symbol; }
    int frame_symbols() const;
    Band occupied_band() const;  // carrier +- (1 + rolloff) * Rs / 2
    void check() const;
};

// Maximal-length LFSR bit sequence; orders 7, 9, 15, 23.
std::vector<std::uint8_t> prbs(int order, std::uint64_t seed, std::size_t n_bits);

// Gray mapping to unit-energy constellation points and back.
std::vector<cplx> map_symbols(std::span<const std::uint8_t> bits, Scheme scheme);
std::vector<std::uint8_t> demap_symbols(std::span<const cplx> soft, Scheme scheme);
cplx slice_symbol(cplx soft, Scheme scheme);
int constellation_index(cplx point, Scheme scheme);

// Root-raised-cosine shaping applied in the frequency domain on the frame
// FFT grid (exactly band-limited; the tx/rx cascade is Nyquist on the grid).
Waveform shape_frame(std::span<const cplx> symbols, const LinkConfig& cfg);
Waveform modulate(std::span<const std::uint8_t> bits, const LinkConfig& cfg);

// Frequency-domain application of a channel response to the waveform's
// occupied FFT bins (linear interpolation onto bin frequencies).
Waveform apply_channel(const Waveform& wave, const ChannelResponse& channel);

// Circularly-symmetric AWGN scaled so post-matched-filter Eb/N0 matches.
// Pass ebn0_db = +inf to disable. `bps` converts Eb to Es for multi-bit
// constellations.
Waveform add_awgn(const Waveform& wave, double ebn0_db, std::uint64_t seed, int bps = 1);

// Matched filter + symbol-rate sampling over the whole frame (guards
// included); genie timing.
std::vector<cplx> matched_filter_symbols(const Waveform& wave, const LinkConfig& cfg);

// Payload soft symbols only.
std::vector<cplx> demodulate(const Waveform& wave, const LinkConfig& cfg);

}  // namespace thz
