#pragma once

#include <vector>

#include "stim/detectors.hpp"

namespace stim::detail {

struct SapChoice {
    SlotActivationPattern sap;
    bool repaired = false;
};

// Picks the k slots with the largest activity score (ties -> lower slot). If the
// resulting pattern is not signalled by any slot-bit value, walks down the score
// ranking, swapping the weakest remaining used slot for the strongest remaining
// unused one, until a signalled pattern appears. Falls back to rank mod 2^slot_bits.
SapChoice select_sap(const std::vector<double>& scores, const StimConfig& cfg);

// Fills bits, residual and the decision fields from per-used-slot decisions.
DetectionResult assemble_result(const SlotActivationPattern& sap, std::vector<unsigned> antennas,
                                std::vector<Complex> symbols, bool sap_repaired,
                                const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, const StimConfig& cfg);

}  // namespace stim::detail
