#include "detector_common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace stim {

DetectorKind parse_detector_kind(std::string_view name) {
    if (name == "ml") return DetectorKind::ml;
    if (name == "mmse") return DetectorKind::mmse;
    if (name == "2ssd") return DetectorKind::ssd2;
    if (name == "3ssd") return DetectorKind::ssd3;
    throw ConfigError("unknown detector '" + std::string(name) + "' (expected ml, mmse, 2ssd or 3ssd)");
}

std::string_view to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::ml: return "ml";
        case DetectorKind::mmse: return "mmse";
        case DetectorKind::ssd2: return "2ssd";
        case DetectorKind::ssd3: return "3ssd";
    }
    return "?";
}

void validate(const MpParams& mp) {
    if (mp.max_iterations < 1) throw ConfigError("message passing needs at least one iteration");
    if (!(mp.damping > 0.0 && mp.damping <= 1.0))
        throw ConfigError("damping must lie in (0, 1], got " + std::to_string(mp.damping));
    if (!(mp.tolerance >= 0.0)) throw ConfigError("convergence tolerance must be >= 0");
}

DetectionResult detect(DetectorKind kind, const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h,
                       double sigma2, const StimConfig& cfg, const MpParams& mp) {
    switch (kind) {
        case DetectorKind::ml: return ml_detect(y, h, cfg);
        case DetectorKind::mmse: return mmse_detect(y, h, sigma2, cfg);
        case DetectorKind::ssd2: return ssd2_detect(y, h, sigma2, cfg, mp);
        case DetectorKind::ssd3: return ssd3_detect(y, h, sigma2, cfg, mp);
    }
    throw ConfigError("unknown detector");
}

std::vector<double> normalize_messages(std::span<const double> raw) {
    std::vector<double> out(raw.begin(), raw.end());
    const double sum = std::accumulate(out.begin(), out.end(), 0.0);
    if (!(sum > 0.0) || !std::isfinite(sum)) {
        std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
        return out;
    }
    for (auto& v : out) v /= sum;
    return out;
}

void normalize_log_in_place(std::span<double> log_msg) {
    const double mx = *std::max_element(log_msg.begin(), log_msg.end());
    if (!std::isfinite(mx)) {
        const double uniform = -std::log(static_cast<double>(log_msg.size()));
        std::fill(log_msg.begin(), log_msg.end(), uniform);
        return;
    }
    double sum = 0.0;
    for (double v : log_msg) sum += std::exp(v - mx);
    const double log_norm = mx + std::log(sum);
    for (auto& v : log_msg) v -= log_norm;
}

std::vector<double> normalize_log_messages(std::span<const double> log_raw) {
    std::vector<double> out(log_raw.begin(), log_raw.end());
    normalize_log_in_place(out);
    for (auto& v : out) v = std::exp(v);
    return out;
}

double damp_into(std::span<double> msg, std::span<const double> fresh, double damping) {
    double tv = 0.0;
    for (std::size_t z = 0; z < msg.size(); ++z) {
        const double next = damping * fresh[z] + (1.0 - damping) * msg[z];
        tv += std::abs(next - msg[z]);
        msg[z] = next;
    }
    return 0.5 * tv;
}

namespace detail {

SapChoice select_sap(const std::vector<double>& scores, const StimConfig& cfg) {
    const unsigned n = cfg.n_slots;
    const unsigned k = cfg.n_used;
    std::vector<unsigned> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](unsigned a, unsigned b) { return scores[a] > scores[b]; });

    const std::uint64_t signalled = std::uint64_t{1} << bit_partition(cfg).slot_bits;
    auto pattern_of = [&](const std::vector<unsigned>& chosen) {
        SlotActivationPattern sap{chosen};
        std::sort(sap.used.begin(), sap.used.end());
        return sap;
    };

    std::vector<unsigned> chosen(order.begin(), order.begin() + k);
    SapChoice out{pattern_of(chosen), false};
    if (sap_to_rank(out.sap, n) < signalled) return out;

    out.repaired = true;
    // chosen[k - t] is the t-th weakest used slot, order[k - 1 + t] the t-th strongest unused one.
    for (unsigned t = 1; t <= std::min(k, n - k); ++t) {
        chosen[k - t] = order[k - 1 + t];
        auto sap = pattern_of(chosen);
        if (sap_to_rank(sap, n) < signalled) {
            out.sap = std::move(sap);
            return out;
        }
    }
    out.sap = rank_to_sap(sap_to_rank(out.sap, n) % signalled, n, k);
    return out;
}

DetectionResult assemble_result(const SlotActivationPattern& sap, std::vector<unsigned> antennas,
                                std::vector<Complex> symbols, bool sap_repaired,
                                const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, const StimConfig& cfg) {
    DetectionResult r;
    auto decoded = decode_frame(sap, antennas, symbols, cfg);
    r.bits = std::move(decoded.bits);
    r.sap = sap;
    r.diagnostics.sap_repaired = sap_repaired || decoded.sap_repaired;

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(h.cols());
    for (std::size_t j = 0; j < sap.used.size(); ++j)
        x[sap.used[j] * cfg.n_tx + antennas[j]] = symbols[j];
    r.diagnostics.final_residual = (y - h * x).squaredNorm();

    r.antennas = std::move(antennas);
    r.symbols = std::move(symbols);
    return r;
}

}  // namespace detail
}  // namespace stim
