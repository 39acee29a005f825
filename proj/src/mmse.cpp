#include <cmath>

#include "detector_common.hpp"

namespace stim {

MmseEstimate mmse_stage(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2, unsigned n_tx) {
    if (h.rows() != y.size() || n_tx == 0 || h.cols() % n_tx != 0)
        throw UsageError("mmse_stage: inconsistent dimensions");
    const double reg = sigma2 > 0.0 ? sigma2 : 1e-12;
    Eigen::MatrixXcd a = h.adjoint() * h;
    a.diagonal().array() += reg;

    MmseEstimate est;
    est.x_hat = a.ldlt().solve(h.adjoint() * y);

    const auto n_slots = static_cast<std::size_t>(h.cols() / n_tx);
    est.antenna_index.resize(n_slots);
    for (std::size_t s = 0; s < n_slots; ++s) {
        unsigned best = 0;
        double best_mag = -1.0;
        for (unsigned a_idx = 0; a_idx < n_tx; ++a_idx) {
            const double mag = std::abs(est.x_hat[static_cast<Eigen::Index>(s * n_tx + a_idx)]);
            if (mag > best_mag) {
                best_mag = mag;
                best = a_idx;
            }
        }
        est.antenna_index[s] = best;
    }
    return est;
}

Eigen::MatrixXcd reduce_model(const Eigen::MatrixXcd& h, const std::vector<unsigned>& antenna_index,
                              unsigned n_tx) {
    if (h.cols() != static_cast<Eigen::Index>(antenna_index.size()) * n_tx)
        throw UsageError("reduce_model: one antenna index per slot required");
    Eigen::MatrixXcd out(h.rows(), static_cast<Eigen::Index>(antenna_index.size()));
    for (std::size_t s = 0; s < antenna_index.size(); ++s) {
        if (antenna_index[s] >= n_tx) throw UsageError("reduce_model: antenna index out of range");
        out.col(static_cast<Eigen::Index>(s)) = h.col(static_cast<Eigen::Index>(s * n_tx + antenna_index[s]));
    }
    return out;
}

DetectionResult mmse_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2,
                            const StimConfig& cfg) {
    validate(cfg);
    const auto est = mmse_stage(y, h, sigma2, cfg.n_tx);
    std::vector<double> score(cfg.n_slots);
    for (unsigned s = 0; s < cfg.n_slots; ++s) score[s] = std::abs(est.x_hat[s * cfg.n_tx + est.antenna_index[s]]);

    const auto choice = detail::select_sap(score, cfg);
    std::vector<unsigned> antennas;
    std::vector<Complex> symbols;
    for (auto s : choice.sap.used) {
        antennas.push_back(est.antenna_index[s]);
        symbols.push_back(cfg.alphabet.point(cfg.alphabet.nearest(est.x_hat[s * cfg.n_tx + est.antenna_index[s]])));
    }
    return detail::assemble_result(choice.sap, std::move(antennas), std::move(symbols), choice.repaired, y, h, cfg);
}

}  // namespace stim
