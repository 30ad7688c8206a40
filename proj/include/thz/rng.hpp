#pragma once

#include <cstdint>

namespace thz {

// SplitMix64-based stream. Hand-rolled Gaussian (Box-Muller) so realizations
// are bit-identical across standard libraries and platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();
    double uniform01();  // (0, 1]
    double gaussian();   // standard normal

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Deterministic seed derivation: master seed -> per-stream seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// FNV-1a over a byte string; used for config fingerprints.
std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace thz
