#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "stim/codec.hpp"
#include "stim/detectors.hpp"
#include "stim/rng.hpp"

namespace stim {

inline constexpr std::string_view kVersion = "1.0.0";

enum class SystemKind { stim, ofdm };

SystemKind parse_system_kind(std::string_view name);
std::string_view to_string(SystemKind kind);

// One BER experiment. For OFDM, cfg.n_slots is the subcarrier count and
// n_tx / n_used are ignored (single antenna, every subcarrier carries a symbol).
struct SweepSpec {
    SystemKind system = SystemKind::stim;
    DetectorKind detector = DetectorKind::ml;
    StimConfig cfg;
    std::vector<double> snr_points;
    std::uint64_t min_frames = 1000;
    std::uint64_t max_frames = 100000;
    std::uint64_t min_bit_errors = 100;
    std::uint64_t seed = 0;
    MpParams mp;
    unsigned workers = 1;  // 0 = hardware concurrency; never affects results
};

void validate(const SweepSpec& spec);

struct BerRecord {
    double snr_db = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t bits_total = 0;
    std::uint64_t bit_errors_total = 0;
    std::uint64_t bit_errors_antenna = 0;
    std::uint64_t bit_errors_slot = 0;
    std::uint64_t bit_errors_symbol = 0;
    std::uint64_t frame_errors = 0;

    double ber() const { return bits_total ? static_cast<double>(bit_errors_total) / bits_total : 0.0; }
    bool operator==(const BerRecord&) const = default;
};

struct TrialOutcome {
    std::uint64_t bits = 0;
    std::uint64_t antenna_errors = 0;
    std::uint64_t slot_errors = 0;
    std::uint64_t symbol_errors = 0;
    std::uint64_t total_errors() const { return antenna_errors + slot_errors + symbol_errors; }
};

// Independent generator for (seed, SNR point, trial).
inline Philox4x32 trial_stream(std::uint64_t seed, std::size_t point_index, std::uint64_t trial) {
    return Philox4x32(seed, static_cast<std::uint32_t>(point_index), trial);
}

// One frame: fresh channel and bits, encode, transmit, detect, count errors per segment.
TrialOutcome run_trial(const SweepSpec& spec, std::size_t point_index, std::uint64_t trial);

// Runs trials 0, 1, 2, ... of one SNR point until at least min_bit_errors errors
// and min_frames frames are reached, or max_frames frames. The result is the same
// for every worker count.
BerRecord run_ber_point(const SweepSpec& spec, std::size_t point_index);

std::vector<BerRecord> run_sweep(const SweepSpec& spec);

inline constexpr std::string_view kCsvHeader =
    "snr_db,frames,bits_total,bit_errors_total,bit_errors_antenna,bit_errors_slot,bit_errors_symbol,"
    "frame_errors,ber";

// '#' comment lines echoing the full configuration, the header row, one row per record.
// `deterministic` suppresses the timestamp comment.
void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<BerRecord>& records,
               bool deterministic);
void write_csv_file(const std::filesystem::path& path, const SweepSpec& spec,
                    const std::vector<BerRecord>& records, bool deterministic);

}  // namespace stim
