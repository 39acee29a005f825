#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "stim/codec.hpp"

namespace stim {

enum class DetectorKind { ml, mmse, ssd2, ssd3 };

// "ml" | "mmse" | "2ssd" | "3ssd"
DetectorKind parse_detector_kind(std::string_view name);
std::string_view to_string(DetectorKind kind);

struct MpParams {
    unsigned max_iterations = 10;
    double damping = 0.3;      // weight of the new message, in (0, 1]
    double tolerance = 1e-6;   // stop once no message moves more than this (total variation)
};

void validate(const MpParams& mp);

struct DetectionDiagnostics {
    bool sap_repaired = false;
    unsigned iterations_run = 0;
    double final_residual = 0.0;        // ||y - H x_hat||^2
    std::vector<double> slot_posterior;  // Pr(slot used | y) per slot, message-passing detectors only
};

struct DetectionResult {
    Bits bits;
    SlotActivationPattern sap;
    std::vector<unsigned> antennas;  // per used slot, slot order
    std::vector<Complex> symbols;    // per used slot, slot order
    DetectionDiagnostics diagnostics;
};

// Exhaustive ML over every valid frame. Refuses (UsageError) when the number of
// candidate frames 2^total exceeds max_candidates.
inline constexpr std::uint64_t kDefaultMlCandidateCap = std::uint64_t{1} << 22;
DetectionResult ml_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, const StimConfig& cfg,
                          std::uint64_t max_candidates = kDefaultMlCandidateCap);

struct MmseEstimate {
    Eigen::VectorXcd x_hat;               // N * n_tx, slot-major
    std::vector<unsigned> antenna_index;  // per slot: entry of largest magnitude, ties -> lower antenna
};

// x_hat = (H^H H + sigma2 I)^-1 H^H y. sigma2 = 0 is regularized with 1e-12.
MmseEstimate mmse_stage(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2, unsigned n_tx);

// Column s of the result is column (s * n_tx + antenna_index[s]) of h.
Eigen::MatrixXcd reduce_model(const Eigen::MatrixXcd& h, const std::vector<unsigned>& antenna_index,
                              unsigned n_tx);

// Linear receiver: MMSE antenna estimates, the k slots with largest estimate
// magnitude, nearest-point symbol decisions.
DetectionResult mmse_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2,
                            const StimConfig& cfg);

DetectionResult ssd2_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2,
                            const StimConfig& cfg, const MpParams& mp = {});
DetectionResult ssd3_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2,
                            const StimConfig& cfg, const MpParams& mp = {});

DetectionResult detect(DetectorKind kind, const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                       double sigma2, const StimConfig& cfg, const MpParams& mp = {});

// ---------------------------------------------------------------------------
// Message utilities

// Divides by the sum; all-zero (underflowed) input yields the uniform pmf.
std::vector<double> normalize_messages(std::span<const double> raw);
// Same result from log-weights, via max subtraction.
std::vector<double> normalize_log_messages(std::span<const double> log_raw);
void normalize_log_in_place(std::span<double> log_msg);

// msg <- damping * fresh + (1 - damping) * msg. Returns the total-variation change.
double damp_into(std::span<double> msg, std::span<const double> fresh, double damping);

// ---------------------------------------------------------------------------
// Second stage of 2SSD: slot-activity and symbol message passing on y = Hbar z + n,
// z_l in {0} u A. Symbol index 0 is the zero symbol, index s + 1 is alphabet point s.
class SlotSymbolMessagePassing {
public:
    SlotSymbolMessagePassing(const Eigen::MatrixXcd& h_reduced, const Eigen::VectorXcd& y, double sigma2,
                             const StimConfig& cfg, const MpParams& mp);

    // One pass of the schedule v -> u -> p -> q. Returns the largest TV change of p and q.
    double iterate();
    // Iterates until converged or max_iterations; returns the number of passes run.
    unsigned run();

    std::size_t n_obs() const { return n_obs_; }
    std::size_t n_slots() const { return n_slots_; }
    std::size_t n_values() const { return n_values_; }

    // Normalized log-message from observation i to slot l.
    std::span<const double> log_v(std::size_t i, std::size_t l) const;
    // Message from slot l to observation i.
    std::span<const double> p(std::size_t l, std::size_t i) const;
    // Activity message of slot l: {Pr(unused), Pr(used)}.
    std::span<const double> q(std::size_t l) const;
    // Constraint message to slot l: {unused, used}.
    std::span<const double> u(std::size_t l) const;
    // Pmf of the number of used slots among all slots except l, on {0..N-1}.
    std::vector<double> phi(std::size_t l) const;

    // Pr(slot l used | y) combining the activity and constraint messages.
    std::vector<double> slot_posterior() const;
    // Per slot, alphabet label maximizing the product of all observation messages.
    std::vector<std::size_t> symbol_decisions() const;

private:
    void update_v();
    void update_u();
    double update_p();
    double update_q();

    Eigen::MatrixXcd h_;
    Eigen::VectorXcd y_;
    double sigma2_;
    MpParams mp_;
    std::size_t n_obs_, n_slots_, n_values_, n_used_;
    std::vector<Complex> values_;  // {0} u A
    std::vector<double> log_prior_;  // log Pr(z | t): 0 for z = 0, -log|A| otherwise

    std::vector<double> log_v_;   // [i][l][z]
    std::vector<double> p_;       // [l][i][z]
    std::vector<double> q_;       // [l][b]
    std::vector<double> u_;       // [l][b]
    std::vector<double> log_sum_; // [l][z] = sum_i log_v[i][l][z]
};

// Third stage of 3SSD: per-used-slot vector message passing on y = G w + n,
// w_j in the n_tx * |A| single-antenna candidates. Candidate m puts alphabet
// point (m % |A|) on antenna (m / |A|).
class VectorMessagePassing {
public:
    VectorMessagePassing(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& y, double sigma2,
                         const StimConfig& cfg, const MpParams& mp);

    double iterate();
    unsigned run();

    std::size_t n_candidates() const { return n_cand_; }
    std::span<const double> p(std::size_t j, std::size_t i) const;
    // Final pmf over candidates for used slot j, using all observations.
    std::vector<double> posterior(std::size_t j) const;
    std::vector<std::size_t> decisions() const;

private:
    void update_moments();

    std::size_t n_obs_, n_vars_, n_cand_;
    Eigen::VectorXcd y_;
    double sigma2_;
    MpParams mp_;
    std::vector<Complex> gs_;    // [i][j][m] = g_{i,[j]} s_m
    std::vector<double> p_;      // [j][i][m]
    std::vector<Complex> mean_;  // [i][j], excluding slot j
    std::vector<double> var_;    // [i][j], excluding slot j, plus sigma2
};

// Single-antenna candidate vectors for one used slot (columns), ordered as in
// VectorMessagePassing.
Eigen::MatrixXcd candidate_vectors(const StimConfig& cfg);

}  // namespace stim
