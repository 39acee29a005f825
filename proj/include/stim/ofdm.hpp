#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stim/alphabet.hpp"
#include "stim/channel.hpp"

namespace stim::ofdm {

// Single transmit antenna OFDM with N subcarriers and an (L - 1)-sample cyclic prefix.
struct OfdmConfig {
    unsigned n_subcarriers = 8;
    unsigned n_taps = 2;
    unsigned n_rx = 1;
    Alphabet alphabet = Alphabet::build(AlphabetKind::qam8);
};

void validate(const OfdmConfig& cfg);

inline std::size_t bits_per_block(const OfdmConfig& cfg) {
    return std::size_t{cfg.n_subcarriers} * cfg.alphabet.bits_per_symbol();
}

// Unitary DFT / inverse DFT.
Eigen::VectorXcd dft(const Eigen::VectorXcd& x);
Eigen::VectorXcd idft(const Eigen::VectorXcd& x);

// Bits -> N subcarrier symbols -> unitary IDFT -> CP prepended. Length N + L - 1.
Eigen::VectorXcd modulate(const Bits& bits, const OfdmConfig& cfg);

// Linear convolution of the block with each receive antenna's taps, truncated to
// the block length, plus CN(0, sigma2) noise. Column j is receive antenna j.
Eigen::MatrixXcd transmit(const Eigen::VectorXcd& block, const ChannelRealization& ch, double sigma2,
                          Philox4x32& rng);

// Frequency response of receive antenna j's taps at every subcarrier.
Eigen::MatrixXcd frequency_response(const ChannelRealization& ch, unsigned n_subcarriers);

// CP removal, DFT per antenna, then per-subcarrier ML over the alphabet with the
// combined metric sum_j |Y_m^j - Lambda_m^j s|^2.
Bits detect(const Eigen::MatrixXcd& received, const ChannelRealization& ch, const OfdmConfig& cfg);

}  // namespace stim::ofdm
