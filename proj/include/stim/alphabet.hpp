#pragma once

#include <string_view>
#include <vector>

#include "stim/common.hpp"

namespace stim {

enum class AlphabetKind { bpsk, qam4, qam8, qam16 };

// Accepts "bpsk" (alias "qam2"), "qam4", "qam8", "qam16".
AlphabetKind parse_alphabet_kind(std::string_view name);
std::string_view to_string(AlphabetKind kind);

// Modulation constellation with a fixed bit labeling.
//
// Point i carries label i read as an M-bit integer, MSB first. Labels are
// therefore a bijection onto {0,1}^M by construction.
//
// Labeling (unnormalized):
//   bpsk   b        -> 1 - 2b
//   qam4   b1 b2    -> (1 - 2b1) + j(1 - 2b2)
//   qam8   b1 b2 b3 -> pam4(b1 b2) + j(1 - 2b3)
//   qam16  b1..b4   -> pam4(b1 b2) + j pam4(b3 b4)
// with the Gray 4-PAM map 00 -> +3, 01 -> +1, 11 -> -1, 10 -> -3.
class Alphabet {
public:
    static Alphabet build(AlphabetKind kind, bool normalize = true);

    AlphabetKind kind() const { return kind_; }
    unsigned bits_per_symbol() const { return bits_per_symbol_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<Complex>& points() const { return points_; }
    const Complex& point(std::size_t label) const { return points_[label]; }
    double avg_energy() const { return avg_energy_; }
    bool normalized() const { return normalized_; }

    // Label of the nearest point; ties go to the lower label.
    std::size_t nearest(Complex s) const;

    Complex map_bits(const Bits& bits) const;
    Bits demap_symbol(Complex s) const;

private:
    AlphabetKind kind_{AlphabetKind::bpsk};
    unsigned bits_per_symbol_{1};
    std::vector<Complex> points_;
    double avg_energy_{0.0};
    bool normalized_{false};
};

}  // namespace stim
