#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stim/codec.hpp"
#include "stim/rate.hpp"

using namespace stim;
using namespace stim::rate;

namespace {

RateParams params(unsigned n, unsigned l, unsigned nt, unsigned size) { return RateParams{n, l, nt, size}; }

// Value truncated to `digits` decimals, the way the published rates are printed.
double truncate(double v, int digits) {
    const double s = std::pow(10.0, digits);
    return std::floor(v * s + 1e-9) / s;
}

double log2_binomial_oracle(unsigned n, unsigned k) {
    double s = 0.0;
    for (unsigned i = 1; i <= k; ++i) s += std::log2(static_cast<double>(n - k + i)) - std::log2(static_cast<double>(i));
    return s;
}

}  // namespace

TEST_CASE("published rates") {
    CHECK(truncate(stim_rate(params(6, 2, 2, 4), 5), 3) == doctest::Approx(2.428));
    CHECK(truncate(ofdm_rate(6, 2, 8), 2) == doctest::Approx(2.57));
    CHECK(truncate(ofdm_rate(6, 2, 4), 2) == doctest::Approx(1.71));
    CHECK(truncate(stim_rate(params(8, 2, 2, 4), 7), 2) == doctest::Approx(2.66));
    CHECK(truncate(ofdm_rate(8, 2, 8), 2) == doctest::Approx(2.66));
    CHECK(truncate(stim_rate(params(12, 2, 2, 4), 11), 3) == doctest::Approx(2.769));
    CHECK(truncate(ofdm_rate(12, 2, 8), 3) == doctest::Approx(2.769));
}

TEST_CASE("floored rate counts exactly the bits of one frame") {
    for (unsigned nt : {1u, 2u, 4u})
        for (auto a : {AlphabetKind::bpsk, AlphabetKind::qam4, AlphabetKind::qam16})
            for (unsigned n = 2; n <= 20; ++n)
                for (unsigned k = 1; k <= n; ++k) {
                    StimConfig c;
                    c.n_tx = nt;
                    c.n_slots = n;
                    c.n_used = k;
                    c.n_taps = 2;
                    c.alphabet = Alphabet::build(a);
                    const double bits = static_cast<double>(bit_partition(c).total());
                    const auto p = params(n, 2, nt, static_cast<unsigned>(c.alphabet.size()));
                    CHECK(stim_rate(p, k) == doctest::Approx(bits / (n + 1)));
                }
}

TEST_CASE("log2 binomial") {
    for (unsigned n = 1; n <= 300; n += 7)
        for (unsigned k = 0; k <= n; k += 3) CHECK(log2_binomial(n, k) == doctest::Approx(log2_binomial_oracle(n, k)).epsilon(1e-10));
    CHECK(log2_binomial(8, 7) == doctest::Approx(3.0));
    CHECK(floor_log2_binomial(8, 7) == 3);
    CHECK(floor_log2_binomial(12, 11) == 3);
    CHECK(floor_log2_binomial(128, 64) == 124);
}

TEST_CASE("optimal k for N = 128, n_t = 2") {
    const unsigned sizes[] = {2, 4, 8, 16};
    const unsigned expect[] = {103, 114, 121, 125};
    for (int i = 0; i < 4; ++i) {
        const auto p = params(128, 4, 2, sizes[i]);
        const auto kb = k_bounds(p);
        CHECK(kb.k_star == expect[i]);
        CHECK(kb.k_l <= kb.k_star + 1.0);
        CHECK(kb.k_star <= kb.k_u + 1.0);
        CHECK(kb.k_m == doctest::Approx(kb.k_u - 0.5));

        unsigned best = 1;
        for (unsigned k = 1; k <= 128; ++k)
            if (stim_rate(p, k, true) > stim_rate(p, best, true)) best = k;
        CHECK(best == expect[i]);
    }
}

TEST_CASE("bound formulas") {
    const auto p = params(128, 4, 2, 2);
    const double c = 4.0;
    const auto kb = k_bounds(p);
    CHECK(kb.k_u == doctest::Approx(c * 129 / (1 + c)));
    CHECK(kb.k_l == doctest::Approx((c * 128 - 1) / (1 + c)));
    CHECK(p.c() == doctest::Approx(c));
}

TEST_CASE("k_star is the global argmax of the analytic rate for N <= 256") {
    for (unsigned nt : {1u, 2u, 4u, 8u})
        for (unsigned size : {2u, 4u, 8u, 16u})
            for (unsigned n = 2; n <= 256; ++n) {
                const auto p = params(n, 2, nt, size);
                const auto kb = k_bounds(p);
                double best = -1.0;
                for (unsigned k = 1; k <= n; ++k) best = std::max(best, stim_rate(p, k, true));
                CHECK(stim_rate(p, kb.k_star, true) == doctest::Approx(best).epsilon(1e-12));
            }
}

TEST_CASE("degenerate small case") {
    const auto kb = k_bounds(params(4, 2, 1, 2));
    CHECK(kb.k_star == 3);
    CHECK(k_bounds(params(1, 1, 1, 2)).k_star == 1);
}

TEST_CASE("rate improvement with k = N - 1") {
    for (unsigned nt : {2u, 4u})
        for (unsigned size : {2u, 4u, 16u})
            for (unsigned n = 2; n <= 100; ++n) {
                const double a = std::floor(std::log2(nt)), m = std::log2(size);
                const double oracle = ((n - 1) * (a + m) + std::log2(n) - n * m) / (n * m) * 100.0;
                CHECK(rate_improvement_k_n_minus_1(n, nt, size) == doctest::Approx(oracle));
                CHECK(rate_improvement(params(n, 2, nt, size), n - 1, true) == doctest::Approx(oracle));
            }
}

TEST_CASE("optimal N") {
    struct Case {
        unsigned nt, size, expect;
    };
    // round(C * 2^1.4427): 10.88, 21.76, 87.04, 43.52 -> 43 after rounding 43.49.
    const Case cases[] = {{2, 2, 11}, {2, 4, 22}, {2, 16, 87}, {4, 4, 43}};
    for (const auto& c : cases) {
        CHECK(optimal_n(c.nt, c.size) == c.expect);
        const auto brute = brute_force_optimal_n(c.nt, c.size, 512);
        CHECK(std::abs(static_cast<int>(brute) - static_cast<int>(optimal_n(c.nt, c.size))) <= 1);
    }
    // The commonly quoted 44 for n_t = 4, 4-QAM is within one of both answers.
    CHECK(std::abs(static_cast<int>(optimal_n(4, 4)) - 44) <= 1);
}

TEST_CASE("rate curve") {
    const auto p = params(128, 4, 2, 2);
    const auto curve = rate_curve(p, 1, 128);
    REQUIRE(curve.size() == 128);
    CHECK(curve.front().first == 1);
    CHECK(curve.back().first == 128);
    CHECK(curve[102].second == doctest::Approx(stim_rate(p, 103)));
}

TEST_CASE("validation") {
    CHECK_THROWS_AS(validate(params(8, 2, 2, 3)), ConfigError);
    CHECK_THROWS_AS(validate(params(0, 2, 2, 4)), ConfigError);
    CHECK_THROWS_AS(stim_rate(params(8, 2, 2, 4), 9), UsageError);
}
