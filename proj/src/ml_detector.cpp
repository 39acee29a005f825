#include <limits>
#include <tuple>
#include <string>

#include "detector_common.hpp"

namespace stim {

namespace {

// Depth-first enumeration of (antenna, symbol) per used slot for a fixed SAP.
// The metric ||y - Hx||^2 - ||y||^2 = x^H G x - 2 Re(x^H z) is accumulated
// incrementally: cross[d][a] holds sum_{e<d} G(col(d, a), col_e) s_e.
class FrameSearch {
public:
    FrameSearch(const Eigen::MatrixXcd& gram, const Eigen::VectorXcd& matched, const StimConfig& cfg)
        : gram_(gram), matched_(matched), cfg_(cfg), k_(cfg.n_used), n_tx_(cfg.n_tx),
          n_sym_(cfg.alphabet.size()), cross_(k_ + 1, std::vector<Complex>(std::size_t{k_} * n_tx_)),
          antennas_(k_), labels_(k_) {}

    void search(const SlotActivationPattern& sap, std::uint64_t rank) {
        sap_ = &sap;
        rank_ = rank;
        std::fill(cross_[0].begin(), cross_[0].end(), Complex{});
        descend(0, 0.0);
    }

    double best_metric = std::numeric_limits<double>::infinity();
    std::uint64_t best_rank = 0;
    std::vector<unsigned> best_antennas;
    std::vector<std::size_t> best_labels;

private:
    Eigen::Index column(unsigned depth, unsigned antenna) const {
        return static_cast<Eigen::Index>(sap_->used[depth]) * n_tx_ + antenna;
    }

    void descend(unsigned d, double metric) {
        const auto& points = cfg_.alphabet.points();
        for (unsigned a = 0; a < n_tx_; ++a) {
            const auto c = column(d, a);
            const double g_cc = gram_(c, c).real();
            const Complex z_c = matched_[c];
            const Complex x_c = cross_[d][std::size_t{d} * n_tx_ + a];
            for (std::size_t s = 0; s < n_sym_; ++s) {
                const Complex sym = points[s];
                const double m = metric + std::norm(sym) * g_cc + 2.0 * (std::conj(sym) * (x_c - z_c)).real();
                antennas_[d] = a;
                labels_[d] = s;
                if (d + 1 == k_) {
                    offer(m);
                    continue;
                }
                auto& next = cross_[d + 1];
                const auto& cur = cross_[d];
                for (unsigned e = d + 1; e < k_; ++e)
                    for (unsigned b = 0; b < n_tx_; ++b) {
                        const std::size_t idx = std::size_t{e} * n_tx_ + b;
                        next[idx] = cur[idx] + gram_(column(e, b), c) * sym;
                    }
                descend(d + 1, m);
            }
        }
    }

    // Exact ties go to the lower bit value: antenna bits, then slot bits, then symbol bits.
    void offer(double metric) {
        if (metric < best_metric ||
            (metric == best_metric &&
             std::tie(antennas_, rank_, labels_) < std::tie(best_antennas, best_rank, best_labels))) {
            best_metric = metric;
            best_rank = rank_;
            best_antennas = antennas_;
            best_labels = labels_;
        }
    }

    const Eigen::MatrixXcd& gram_;
    const Eigen::VectorXcd& matched_;
    const StimConfig& cfg_;
    unsigned k_, n_tx_;
    std::size_t n_sym_;
    std::vector<std::vector<Complex>> cross_;
    std::vector<unsigned> antennas_;
    std::vector<std::size_t> labels_;
    const SlotActivationPattern* sap_ = nullptr;
    std::uint64_t rank_ = 0;
};

}  // namespace

DetectionResult ml_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, const StimConfig& cfg,
                          std::uint64_t max_candidates) {
    validate(cfg);
    const auto part = bit_partition(cfg);
    if (part.total() >= 64 || (std::uint64_t{1} << part.total()) > max_candidates)
        throw UsageError("ml_detect: 2^" + std::to_string(part.total()) +
                         " candidate frames exceed the enumeration cap " + std::to_string(max_candidates) +
                         "; use the 2ssd or 3ssd detector for this configuration");
    if (h.rows() != y.size() || h.cols() != static_cast<Eigen::Index>(cfg.n_slots) * cfg.n_tx)
        throw UsageError("ml_detect: channel and observation dimensions do not match the configuration");

    const Eigen::MatrixXcd gram = h.adjoint() * h;
    const Eigen::VectorXcd matched = h.adjoint() * y;
    FrameSearch search(gram, matched, cfg);

    const std::uint64_t n_sap = std::uint64_t{1} << part.slot_bits;
    for (std::uint64_t rank = 0; rank < n_sap; ++rank) {
        const auto sap = rank_to_sap(rank, cfg.n_slots, cfg.n_used);
        search.search(sap, rank);
    }

    std::vector<Complex> symbols;
    symbols.reserve(cfg.n_used);
    for (auto l : search.best_labels) symbols.push_back(cfg.alphabet.point(l));
    return detail::assemble_result(rank_to_sap(search.best_rank, cfg.n_slots, cfg.n_used),
                                   search.best_antennas, std::move(symbols), false, y, h, cfg);
}

}  // namespace stim
