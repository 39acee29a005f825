#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stim/codec.hpp"
#include "stim/harness.hpp"

namespace stim::cli {

// Everything a command needs, after config file and flags have been merged.
// The default detector is 2ssd because ML cannot enumerate the default frame size.
struct RunConfig {
    std::string command;
    SweepSpec spec = [] {
        SweepSpec s;
        s.detector = DetectorKind::ssd2;
        return s;
    }();
    std::optional<std::filesystem::path> out;
    bool deterministic = false;
    bool min_frames_set = false;  // otherwise min_frames is capped at max_frames

    // rate
    std::string sweep = "k";  // "k" or "n"
    bool analytic = false;
    unsigned n_max = 512;

    // roundtrip
    bool golden = false;
    std::uint64_t frames = 1000;
};

// Flat `key = value` text. Blank lines and lines starting with '#' are skipped,
// lists are comma separated. Unknown keys and malformed values throw ConfigError
// naming the line.
void apply_config_text(std::string_view text, RunConfig& rc);
void apply_config_file(const std::filesystem::path& path, RunConfig& rc);

// "0,2,4" or "start:step:stop" (inclusive), or a mix separated by commas.
std::vector<double> parse_snr_list(std::string_view text);

// Resolved configuration in the same key = value syntax, one '#'-prefixed line each.
void echo_config(std::ostream& os, const RunConfig& rc);

// The documented 24-bit example frame: n_t = 2, N = 8, k = 7, L = 2, unnormalized 4-QAM.
struct GoldenReport {
    StimFrame frame;
    Eigen::MatrixXi expected_a;
    Eigen::MatrixXcd expected_b;
    Eigen::MatrixXcd expected_x;
    bool decode_ok = false;
    bool pass = false;
};

Bits golden_bits();
GoldenReport golden_check();

// Exit codes: 0 success, 1 check failed, 2 invalid usage or configuration, 3 I/O error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stim::cli
