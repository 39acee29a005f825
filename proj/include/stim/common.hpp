#pragma once

#include <charconv>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace stim {

using Complex = std::complex<double>;

// One entry per bit, each 0 or 1. The first entry is the first transmitted bit.
using Bits = std::vector<std::uint8_t>;

// Invalid system parameters (unsupported alphabet, N < L, non-power-of-two n_t, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Caller passed inconsistent arguments (wrong bit count, rank out of range, ...).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Interprets bits[first, first + count) as an unsigned integer, MSB first.
inline std::uint64_t bits_to_uint(const Bits& bits, std::size_t first, std::size_t count) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < count; ++i) v = (v << 1) | (bits[first + i] & 1u);
    return v;
}

// Appends the low `count` bits of v, MSB first.
inline void append_uint(Bits& out, std::uint64_t v, std::size_t count) {
    for (std::size_t i = count; i-- > 0;) out.push_back(static_cast<std::uint8_t>((v >> i) & 1u));
}

inline bool is_power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline unsigned floor_log2(std::uint64_t v) {
    unsigned r = 0;
    while (v >>= 1) ++r;
    return r;
}

// Shortest decimal text that parses back to exactly v.
inline std::string format_shortest(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace stim
