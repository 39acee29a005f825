#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "stim/codec.hpp"
#include "stim/rng.hpp"

namespace stim {

// Quasi-static frequency-selective channel: taps[l] is the n_rx x n_tx matrix of
// gains on the l-th symbol-spaced path, entries CN(0, e^-l).
struct ChannelRealization {
    std::vector<Eigen::MatrixXcd> taps;

    unsigned n_taps() const { return static_cast<unsigned>(taps.size()); }
    Eigen::Index n_rx() const { return taps.front().rows(); }
    Eigen::Index n_tx() const { return taps.front().cols(); }
};

// Draws one CN(0, variance) sample: real and imaginary parts each N(0, variance / 2).
template <class Rng>
Complex complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> g(0.0, std::sqrt(variance / 2.0));
    const double re = g(rng);
    const double im = g(rng);
    return {re, im};
}

ChannelRealization draw_channel(Philox4x32& rng, unsigned n_rx, unsigned n_tx, unsigned n_taps);
inline ChannelRealization draw_channel(Philox4x32& rng, const StimConfig& cfg) {
    return draw_channel(rng, cfg.n_rx, cfg.n_tx, cfg.n_taps);
}

// Nn_rx x Nn_tx equivalent channel after cyclic-prefix removal. Block (r, c)
// is taps[(r - c) mod N] when that index is < L, zero otherwise.
Eigen::MatrixXcd build_block_circulant(const ChannelRealization& ch, unsigned n_slots);

// Sum of e^-l over the taps: average aggregate channel power per tx-rx pair.
double power_delay_profile_sum(unsigned n_taps);

// Noise variance per complex received sample for the given average SNR,
// assuming unit average symbol energy: sigma^2 = sum_l e^-l / 10^(snr/10).
double snr_to_sigma2(double snr_db, unsigned n_taps);

struct ReceivedBlock {
    Eigen::VectorXcd y;  // N * n_rx, slot-major
    double sigma2 = 0.0;
};

// y = H x + n for the data part of the frame; n ~ CN(0, sigma2 I).
ReceivedBlock transmit(const StimFrame& frame, const Eigen::MatrixXcd& h, double sigma2, Philox4x32& rng);

}  // namespace stim
