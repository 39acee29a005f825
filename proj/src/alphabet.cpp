#include "stim/alphabet.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace stim {

namespace {

constexpr std::array<double, 4> kGrayPam4 = {+3.0, +1.0, -3.0, -1.0};  // index = b1b2

double sign_level(unsigned bit) { return bit ? -1.0 : 1.0; }

}  // namespace

AlphabetKind parse_alphabet_kind(std::string_view name) {
    if (name == "bpsk" || name == "qam2") return AlphabetKind::bpsk;
    if (name == "qam4") return AlphabetKind::qam4;
    if (name == "qam8") return AlphabetKind::qam8;
    if (name == "qam16") return AlphabetKind::qam16;
    throw ConfigError("unsupported alphabet '" + std::string(name) +
                      "' (expected bpsk, qam4, qam8 or qam16)");
}

std::string_view to_string(AlphabetKind kind) {
    switch (kind) {
        case AlphabetKind::bpsk: return "bpsk";
        case AlphabetKind::qam4: return "qam4";
        case AlphabetKind::qam8: return "qam8";
        case AlphabetKind::qam16: return "qam16";
    }
    return "?";
}

Alphabet Alphabet::build(AlphabetKind kind, bool normalize) {
    Alphabet a;
    a.kind_ = kind;
    switch (kind) {
        case AlphabetKind::bpsk:
            a.bits_per_symbol_ = 1;
            for (unsigned l = 0; l < 2; ++l) a.points_.emplace_back(sign_level(l), 0.0);
            break;
        case AlphabetKind::qam4:
            a.bits_per_symbol_ = 2;
            for (unsigned l = 0; l < 4; ++l)
                a.points_.emplace_back(sign_level((l >> 1) & 1u), sign_level(l & 1u));
            break;
        case AlphabetKind::qam8:
            a.bits_per_symbol_ = 3;
            for (unsigned l = 0; l < 8; ++l)
                a.points_.emplace_back(kGrayPam4[(l >> 1) & 3u], sign_level(l & 1u));
            break;
        case AlphabetKind::qam16:
            a.bits_per_symbol_ = 4;
            for (unsigned l = 0; l < 16; ++l)
                a.points_.emplace_back(kGrayPam4[(l >> 2) & 3u], kGrayPam4[l & 3u]);
            break;
        default:
            throw ConfigError("unsupported alphabet kind");
    }

    double energy = 0.0;
    for (const auto& p : a.points_) energy += std::norm(p);
    energy /= static_cast<double>(a.points_.size());

    if (normalize) {
        const double g = 1.0 / std::sqrt(energy);
        for (auto& p : a.points_) p *= g;
        energy = 0.0;
        for (const auto& p : a.points_) energy += std::norm(p);
        energy /= static_cast<double>(a.points_.size());
    }
    a.avg_energy_ = energy;
    a.normalized_ = normalize;
    return a;
}

std::size_t Alphabet::nearest(Complex s) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < points_.size(); ++l) {
        const double d = std::norm(s - points_[l]);
        if (d < best_d) {
            best_d = d;
            best = l;
        }
    }
    return best;
}

Complex Alphabet::map_bits(const Bits& bits) const {
    if (bits.size() != bits_per_symbol_)
        throw UsageError("map_bits: expected " + std::to_string(bits_per_symbol_) + " bits, got " +
                         std::to_string(bits.size()));
    return points_[bits_to_uint(bits, 0, bits.size())];
}

Bits Alphabet::demap_symbol(Complex s) const {
    Bits out;
    out.reserve(bits_per_symbol_);
    append_uint(out, nearest(s), bits_per_symbol_);
    return out;
}

}  // namespace stim
