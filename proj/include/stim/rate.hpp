#pragma once

#include <utility>
#include <vector>

namespace stim::rate {

// Parameters of the closed-form rate expressions. Rates are in bits per channel
// use with N + L - 1 channel uses per frame.
struct RateParams {
    unsigned n_slots = 8;        // N
    unsigned n_taps = 2;         // L
    unsigned n_tx = 2;           // n_t
    unsigned alphabet_size = 4;  // |A|, a power of two >= 2

    unsigned antenna_bits_per_slot() const;  // floor(log2 n_t)
    unsigned bits_per_symbol() const;        // log2 |A|
    double c() const;                        // 2^(antenna bits + symbol bits)
};

void validate(const RateParams& p);

// log2 C(n, k). Exact integer arithmetic while the coefficient fits in 128 bits,
// log-gamma beyond that.
double log2_binomial(unsigned n, unsigned k);
unsigned floor_log2_binomial(unsigned n, unsigned k);

// Floored form by default (what a frame actually carries). `analytic` drops the
// floor on the slot-index term, which is the form the optimizers work with.
double stim_rate(const RateParams& p, unsigned k, bool analytic = false);
double ofdm_rate(unsigned n_slots, unsigned n_taps, unsigned alphabet_size);

// Percentage rate improvement of STIM over OFDM at the same N, L and alphabet.
double rate_improvement(const RateParams& p, unsigned k, bool analytic = false);

struct KBounds {
    double k_l = 0.0;
    double k_u = 0.0;
    double k_m = 0.0;
    unsigned k_star = 0;  // integer argmax of the analytic rate in [floor(k_l), ceil(k_u)]
};

KBounds k_bounds(const RateParams& p);

// Rate improvement (percent) with k = N - 1 and the unfloored slot term:
// ((N-1)(A+M) - N M + log2 N) / (N M) * 100.
double rate_improvement_k_n_minus_1(unsigned n_slots, unsigned n_tx, unsigned alphabet_size);

// round(C * 2^1.4427), the stationary point of the k = N - 1 improvement curve.
unsigned optimal_n(unsigned n_tx, unsigned alphabet_size);

// Integer argmax of rate_improvement_k_n_minus_1 over N in [2, n_max]; ties -> smaller N.
unsigned brute_force_optimal_n(unsigned n_tx, unsigned alphabet_size, unsigned n_max = 512);

std::vector<std::pair<unsigned, double>> rate_curve(const RateParams& p, unsigned k_first,
                                                    unsigned k_last, bool analytic = false);

}  // namespace stim::rate
