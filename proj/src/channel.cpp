#include "stim/channel.hpp"

#include <cmath>
#include <string>

namespace stim {

ChannelRealization draw_channel(Philox4x32& rng, unsigned n_rx, unsigned n_tx, unsigned n_taps) {
    if (n_taps < 1 || n_rx < 1 || n_tx < 1) throw ConfigError("draw_channel: empty channel");
    ChannelRealization ch;
    ch.taps.reserve(n_taps);
    for (unsigned l = 0; l < n_taps; ++l) {
        const double var = std::exp(-static_cast<double>(l));
        Eigen::MatrixXcd t(n_rx, n_tx);
        for (Eigen::Index c = 0; c < t.cols(); ++c)
            for (Eigen::Index r = 0; r < t.rows(); ++r) t(r, c) = complex_gaussian(rng, var);
        ch.taps.push_back(std::move(t));
    }
    return ch;
}

Eigen::MatrixXcd build_block_circulant(const ChannelRealization& ch, unsigned n_slots) {
    const unsigned l_taps = ch.n_taps();
    if (n_slots < l_taps)
        throw ConfigError("block-circulant channel needs N >= L, got N=" + std::to_string(n_slots) +
                          " L=" + std::to_string(l_taps));
    const auto nr = ch.n_rx();
    const auto nt = ch.n_tx();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n_slots * nr, n_slots * nt);
    for (unsigned r = 0; r < n_slots; ++r)
        for (unsigned l = 0; l < l_taps; ++l) {
            const unsigned c = (r + n_slots - l) % n_slots;
            h.block(r * nr, c * nt, nr, nt) = ch.taps[l];
        }
    return h;
}

double power_delay_profile_sum(unsigned n_taps) {
    double p = 0.0;
    for (unsigned l = 0; l < n_taps; ++l) p += std::exp(-static_cast<double>(l));
    return p;
}

double snr_to_sigma2(double snr_db, unsigned n_taps) {
    return power_delay_profile_sum(n_taps) / std::pow(10.0, snr_db / 10.0);
}

ReceivedBlock transmit(const StimFrame& frame, const Eigen::MatrixXcd& h, double sigma2, Philox4x32& rng) {
    const Eigen::VectorXcd x = frame.stacked();
    if (h.cols() != x.size())
        throw UsageError("transmit: channel has " + std::to_string(h.cols()) + " columns, frame has " +
                         std::to_string(x.size()) + " entries");
    ReceivedBlock rx;
    rx.sigma2 = sigma2;
    rx.y = h * x;
    if (sigma2 > 0.0)
        for (Eigen::Index i = 0; i < rx.y.size(); ++i) rx.y[i] += complex_gaussian(rng, sigma2);
    return rx;
}

}  // namespace stim
