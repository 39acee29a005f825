#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace stim {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A stream is identified by (key, stream_a, stream_b): the key is the run seed,
// the stream words pin a Monte-Carlo point and trial. Streams never overlap, so
// trials can be evaluated in any order on any number of threads.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint32_t stream_a = 0, std::uint64_t stream_b = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, stream_a, static_cast<std::uint32_t>(stream_b), static_cast<std::uint32_t>(stream_b >> 32)} {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ >= 4) refill();
        const std::uint64_t hi = block_[pos_];
        const std::uint64_t lo = block_[pos_ + 1];
        pos_ += 2;
        return (hi << 32) | lo;
    }

    static Block bijection(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    void refill() {
        block_ = bijection(ctr_, key_);
        ++ctr_[0];
        pos_ = 0;
    }

    Key key_;
    Block ctr_;
    Block block_{};
    unsigned pos_ = 4;
};

}  // namespace stim
