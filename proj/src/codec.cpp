#include "stim/codec.hpp"

#include <limits>
#include <string>

namespace stim {

void validate(const StimConfig& cfg) {
    if (cfg.n_tx < 1 || !is_power_of_two(cfg.n_tx))
        throw ConfigError("n_t must be a power of two >= 1, got " + std::to_string(cfg.n_tx));
    if (cfg.n_rx < 1) throw ConfigError("n_r must be >= 1");
    if (cfg.n_taps < 1) throw ConfigError("L must be >= 1");
    if (cfg.n_slots < 1) throw ConfigError("N must be >= 1");
    if (cfg.n_used < 1 || cfg.n_used > cfg.n_slots)
        throw ConfigError("k must satisfy 1 <= k <= N, got k=" + std::to_string(cfg.n_used) +
                          " N=" + std::to_string(cfg.n_slots));
    if (cfg.n_slots < cfg.n_taps)
        throw ConfigError("N must be >= L for the cyclic prefix, got N=" +
                          std::to_string(cfg.n_slots) + " L=" + std::to_string(cfg.n_taps));
    const auto c = binomial(cfg.n_slots, cfg.n_used);
    if (floor_log2(c) > 62) throw ConfigError("too many slot index bits for 64-bit ranks");
}

std::uint64_t binomial(unsigned n, unsigned k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 c = 1;
    for (unsigned i = 1; i <= k; ++i) {
        c = c * (n - k + i) / i;
        if (c > std::numeric_limits<std::uint64_t>::max())
            throw ConfigError("binomial(" + std::to_string(n) + ", " + std::to_string(k) +
                              ") exceeds 64 bits");
    }
    return static_cast<std::uint64_t>(c);
}

BitPartition bit_partition(const StimConfig& cfg) {
    BitPartition p;
    p.antenna_bits = std::size_t{cfg.n_used} * floor_log2(cfg.n_tx);
    p.slot_bits = floor_log2(binomial(cfg.n_slots, cfg.n_used));
    p.symbol_bits = std::size_t{cfg.n_used} * cfg.alphabet.bits_per_symbol();
    return p;
}

SlotActivationPattern rank_to_sap(std::uint64_t rank, unsigned n_slots, unsigned n_used) {
    if (n_used > n_slots || rank >= binomial(n_slots, n_used))
        throw UsageError("rank_to_sap: rank " + std::to_string(rank) + " out of range for C(" +
                         std::to_string(n_slots) + ", " + std::to_string(n_used) + ")");
    SlotActivationPattern sap;
    sap.used.reserve(n_used);
    unsigned next = 0;
    for (unsigned i = 0; i < n_used; ++i) {
        const unsigned remaining = n_used - i - 1;
        // Skip whole blocks of subsets whose i-th element is `next`.
        for (;; ++next) {
            const auto block = binomial(n_slots - next - 1, remaining);
            if (rank < block) break;
            rank -= block;
        }
        sap.used.push_back(next++);
    }
    return sap;
}

std::uint64_t sap_to_rank(const SlotActivationPattern& sap, unsigned n_slots) {
    const auto n_used = static_cast<unsigned>(sap.used.size());
    std::uint64_t rank = 0;
    unsigned next = 0;
    for (unsigned i = 0; i < n_used; ++i) {
        const unsigned remaining = n_used - i - 1;
        for (; next < sap.used[i]; ++next) rank += binomial(n_slots - next - 1, remaining);
        ++next;
    }
    return rank;
}

Eigen::VectorXcd StimFrame::stacked() const {
    const auto n_tx = signal.rows();
    const auto n = signal.cols();
    Eigen::VectorXcd x(n * n_tx);
    for (Eigen::Index s = 0; s < n; ++s) x.segment(s * n_tx, n_tx) = signal.col(s);
    return x;
}

StimFrame encode_frame(const Bits& bits, const StimConfig& cfg) {
    const auto part = bit_partition(cfg);
    if (bits.size() != part.total())
        throw UsageError("encode_frame: expected " + std::to_string(part.total()) + " bits, got " +
                         std::to_string(bits.size()));

    const unsigned n = cfg.n_slots;
    const unsigned k = cfg.n_used;
    const unsigned ant_bits = floor_log2(cfg.n_tx);
    const unsigned sym_bits = cfg.alphabet.bits_per_symbol();

    StimFrame f;
    f.bits = bits;
    f.sap = rank_to_sap(bits_to_uint(bits, part.antenna_bits, part.slot_bits), n, k);
    f.antennas.resize(k);
    f.labels.resize(k);
    for (unsigned j = 0; j < k; ++j) {
        f.antennas[j] = static_cast<unsigned>(bits_to_uint(bits, std::size_t{j} * ant_bits, ant_bits));
        f.labels[j] = bits_to_uint(bits, part.antenna_bits + part.slot_bits + std::size_t{j} * sym_bits,
                                   sym_bits);
    }

    f.activation = Eigen::MatrixXi::Zero(cfg.n_tx, n);
    f.signal = Eigen::MatrixXcd::Zero(cfg.n_tx, n);
    for (unsigned j = 0; j < k; ++j) {
        const auto slot = f.sap.used[j];
        f.activation(f.antennas[j], slot) = 1;
        f.signal(f.antennas[j], slot) = cfg.alphabet.point(f.labels[j]);
    }

    const unsigned cp = cfg.n_taps - 1;
    f.with_cp.resize(cfg.n_tx, n + cp);
    f.with_cp.leftCols(cp) = f.signal.rightCols(cp);
    f.with_cp.rightCols(n) = f.signal;
    return f;
}

DecodedBits decode_frame(const SlotActivationPattern& sap, const std::vector<unsigned>& antennas,
                         const std::vector<Complex>& symbols, const StimConfig& cfg) {
    const auto part = bit_partition(cfg);
    const unsigned k = cfg.n_used;
    if (sap.used.size() != k || antennas.size() != k || symbols.size() != k)
        throw UsageError("decode_frame: expected " + std::to_string(k) + " used slots");

    DecodedBits out;
    out.bits.reserve(part.total());
    const unsigned ant_bits = floor_log2(cfg.n_tx);
    for (auto a : antennas) {
        if (a >= cfg.n_tx) throw UsageError("decode_frame: antenna index out of range");
        append_uint(out.bits, a, ant_bits);
    }

    auto rank = sap_to_rank(sap, cfg.n_slots);
    const std::uint64_t signalled = std::uint64_t{1} << part.slot_bits;
    if (rank >= signalled) {
        rank %= signalled;
        out.sap_repaired = true;
    }
    append_uint(out.bits, rank, part.slot_bits);

    for (const auto& s : symbols) append_uint(out.bits, cfg.alphabet.nearest(s), cfg.alphabet.bits_per_symbol());
    return out;
}

}  // namespace stim
