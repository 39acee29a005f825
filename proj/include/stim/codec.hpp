#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "stim/alphabet.hpp"
#include "stim/common.hpp"

namespace stim {

// System parameters of one STIM link. A single transmit RF chain is implied.
struct StimConfig {
    unsigned n_tx = 2;     // transmit antennas, power of two
    unsigned n_rx = 1;     // receive antennas
    unsigned n_slots = 8;  // data slots per frame (N)
    unsigned n_used = 7;   // used slots per frame (k)
    unsigned n_taps = 2;   // multipath taps (L); the cyclic prefix has n_taps - 1 slots
    Alphabet alphabet = Alphabet::build(AlphabetKind::qam4);
};

// Throws ConfigError on any violated parameter invariant.
void validate(const StimConfig& cfg);

struct BitPartition {
    std::size_t antenna_bits = 0;
    std::size_t slot_bits = 0;
    std::size_t symbol_bits = 0;
    std::size_t total() const { return antenna_bits + slot_bits + symbol_bits; }
};

// Segment sizes in transmission order: antenna, slot, symbol.
BitPartition bit_partition(const StimConfig& cfg);

// Exact binomial coefficient; throws ConfigError if it does not fit in 64 bits.
std::uint64_t binomial(unsigned n, unsigned k);

// Used slots of a frame as strictly increasing 0-based indices.
struct SlotActivationPattern {
    std::vector<unsigned> used;
    bool operator==(const SlotActivationPattern&) const = default;
};

// rank-th k-subset of {0..N-1} in lexicographic order of the sorted index lists.
SlotActivationPattern rank_to_sap(std::uint64_t rank, unsigned n_slots, unsigned n_used);
std::uint64_t sap_to_rank(const SlotActivationPattern& sap, unsigned n_slots);

struct StimFrame {
    Eigen::MatrixXi activation;  // n_tx x N, 0/1
    Eigen::MatrixXcd signal;     // n_tx x N
    Eigen::MatrixXcd with_cp;    // n_tx x (N + L - 1)
    SlotActivationPattern sap;
    std::vector<unsigned> antennas;  // active antenna (0-based) per used slot, slot order
    std::vector<std::size_t> labels; // constellation label per used slot, slot order
    Bits bits;

    // Data part stacked slot-major: entry (slot * n_tx + antenna).
    Eigen::VectorXcd stacked() const;
};

StimFrame encode_frame(const Bits& bits, const StimConfig& cfg);

struct DecodedBits {
    Bits bits;
    bool sap_repaired = false;  // rank was outside the signalled set and got folded
};

// Inverse of encode_frame. Symbols are snapped to the nearest constellation point.
// A SAP whose rank is not signalled by any bit pattern is folded to rank mod 2^slot_bits.
DecodedBits decode_frame(const SlotActivationPattern& sap, const std::vector<unsigned>& antennas,
                         const std::vector<Complex>& symbols, const StimConfig& cfg);

}  // namespace stim
