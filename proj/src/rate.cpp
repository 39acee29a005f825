#include "stim/rate.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "stim/common.hpp"

namespace stim::rate {

namespace {

using u128 = unsigned __int128;

std::optional<u128> exact_binomial(unsigned n, unsigned k) {
    if (k > n) return u128{0};
    k = std::min(k, n - k);
    u128 c = 1;
    constexpr u128 limit = ~u128{0} / 0xffffffffu;  // c * (n-k+i) must not overflow
    for (unsigned i = 1; i <= k; ++i) {
        if (c > limit) return std::nullopt;
        c = c * (n - k + i) / i;
    }
    return c;
}

unsigned floor_log2_u128(u128 v) {
    unsigned r = 0;
    while (v >>= 1) ++r;
    return r;
}

}  // namespace

unsigned RateParams::antenna_bits_per_slot() const { return floor_log2(n_tx); }
unsigned RateParams::bits_per_symbol() const { return floor_log2(alphabet_size); }
double RateParams::c() const { return std::ldexp(1.0, static_cast<int>(antenna_bits_per_slot() + bits_per_symbol())); }

void validate(const RateParams& p) {
    if (p.n_slots < 1) throw ConfigError("N must be >= 1");
    if (p.n_taps < 1) throw ConfigError("L must be >= 1");
    if (p.n_tx < 1) throw ConfigError("n_t must be >= 1");
    if (p.alphabet_size < 2 || !is_power_of_two(p.alphabet_size))
        throw ConfigError("alphabet size must be a power of two >= 2, got " +
                          std::to_string(p.alphabet_size));
}

double log2_binomial(unsigned n, unsigned k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    if (auto c = exact_binomial(n, k)) {
        // Split so the conversion to double keeps full precision.
        const auto hi = static_cast<double>(static_cast<std::uint64_t>(*c >> 64));
        const auto lo = static_cast<double>(static_cast<std::uint64_t>(*c));
        return std::log2(std::ldexp(hi, 64) + lo);
    }
    return (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) / std::log(2.0);
}

unsigned floor_log2_binomial(unsigned n, unsigned k) {
    if (auto c = exact_binomial(n, k)) return floor_log2_u128(*c);
    return static_cast<unsigned>(std::floor(log2_binomial(n, k)));
}

double stim_rate(const RateParams& p, unsigned k, bool analytic) {
    validate(p);
    if (k < 1 || k > p.n_slots)
        throw UsageError("stim_rate: k must be in [1, N], got " + std::to_string(k));
    const double per_slot = p.antenna_bits_per_slot() + p.bits_per_symbol();
    const double slot_term =
        analytic ? log2_binomial(p.n_slots, k) : static_cast<double>(floor_log2_binomial(p.n_slots, k));
    return (k * per_slot + slot_term) / (p.n_slots + p.n_taps - 1.0);
}

double ofdm_rate(unsigned n_slots, unsigned n_taps, unsigned alphabet_size) {
    if (n_slots < 1 || n_taps < 1) throw UsageError("ofdm_rate: N and L must be >= 1");
    return n_slots * std::log2(static_cast<double>(alphabet_size)) / (n_slots + n_taps - 1.0);
}

double rate_improvement(const RateParams& p, unsigned k, bool analytic) {
    const double r_ofdm = ofdm_rate(p.n_slots, p.n_taps, p.alphabet_size);
    return (stim_rate(p, k, analytic) - r_ofdm) / r_ofdm * 100.0;
}

KBounds k_bounds(const RateParams& p) {
    validate(p);
    const double c = p.c();
    const double n = p.n_slots;
    KBounds b;
    b.k_u = c * (n + 1.0) / (1.0 + c);
    b.k_l = (c * n - 1.0) / (1.0 + c);
    b.k_m = b.k_u - 0.5;

    const auto lo = static_cast<unsigned>(std::max(1.0, std::floor(b.k_l)));
    const auto hi = static_cast<unsigned>(std::min(n, std::ceil(b.k_u)));
    double best = -std::numeric_limits<double>::infinity();
    for (unsigned k = lo; k <= hi; ++k) {
        const double r = stim_rate(p, k, true);
        if (r >= best) {
            best = r;
            b.k_star = k;
        }
    }
    return b;
}

double rate_improvement_k_n_minus_1(unsigned n_slots, unsigned n_tx, unsigned alphabet_size) {
    const double a = floor_log2(n_tx);
    const double m = std::log2(static_cast<double>(alphabet_size));
    const double n = n_slots;
    return ((n - 1.0) * (a + m) - n * m + std::log2(n)) / (n * m) * 100.0;
}

unsigned optimal_n(unsigned n_tx, unsigned alphabet_size) {
    const RateParams p{2, 1, n_tx, alphabet_size};
    validate(p);
    return static_cast<unsigned>(std::lround(p.c() * std::exp2(1.4427)));
}

unsigned brute_force_optimal_n(unsigned n_tx, unsigned alphabet_size, unsigned n_max) {
    validate(RateParams{2, 1, n_tx, alphabet_size});
    unsigned best_n = 2;
    double best = -std::numeric_limits<double>::infinity();
    for (unsigned n = 2; n <= n_max; ++n) {
        const double r = rate_improvement_k_n_minus_1(n, n_tx, alphabet_size);
        if (r > best) {
            best = r;
            best_n = n;
        }
    }
    return best_n;
}

std::vector<std::pair<unsigned, double>> rate_curve(const RateParams& p, unsigned k_first,
                                                    unsigned k_last, bool analytic) {
    if (k_first < 1 || k_last > p.n_slots || k_first > k_last)
        throw UsageError("rate_curve: k range must lie within [1, N]");
    std::vector<std::pair<unsigned, double>> out;
    out.reserve(k_last - k_first + 1);
    for (unsigned k = k_first; k <= k_last; ++k) out.emplace_back(k, stim_rate(p, k, analytic));
    return out;
}

}  // namespace stim::rate
