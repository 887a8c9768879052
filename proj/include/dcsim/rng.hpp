#pragma once

#include <array>
#include <cstdint>

namespace dcsim {

// One Philox4x32-10 block: 128-bit counter, 64-bit key, 128 output bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Counter-based generator (Philox4x32-10). Streams created from the same seed
// but different stream ids are independent, which lets every stochastic
// operation in the library consume its own stream derived from one master
// seed. Satisfies UniformRandomBitGenerator.
class Philox {
public:
    explicit Philox(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : ctr_{0, 0, static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)},
          key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)} {}

    std::uint32_t next_u32() {
        if (avail_ == 0) refill();
        return block_[4 - avail_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        return lo | (static_cast<std::uint64_t>(next_u32()) << 32);
    }

    // Uniform in [0, 1), 53-bit resolution. Avoids std::uniform_real_distribution
    // so sequences are identical across standard libraries.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool next_bit() { return (next_u32() & 1u) != 0; }

    // Uniform in [0, n). Multiply-shift; bias is O(n / 2^64).
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }
    result_type operator()() { return next_u64(); }

private:
    void refill() {
        block_ = philox4x32(ctr_, key_);
        if (++ctr_[0] == 0 && ++ctr_[1] == 0 && ++ctr_[2] == 0) ++ctr_[3];
        avail_ = 4;
    }

    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> block_{};
    int avail_ = 0;
};

// Derives a subordinate 64-bit seed from (seed, a, b) with one Philox block.
// Used to split a master seed into per-frame / per-trial / per-purpose seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Stream tags so different consumers of one master seed never collide.
namespace seed_tag {
inline constexpr std::uint64_t kFrameNoise = 0x01;
inline constexpr std::uint64_t kKnownBits = 0x02;
inline constexpr std::uint64_t kInterleaver = 0x03;
inline constexpr std::uint64_t kCodeSample = 0x04;
inline constexpr std::uint64_t kCodeword = 0x05;
inline constexpr std::uint64_t kTrial = 0x06;
inline constexpr std::uint64_t kPopulation = 0x07;
inline constexpr std::uint64_t kProbe = 0x08;
}  // namespace seed_tag

}  // namespace dcsim
