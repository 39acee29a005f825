#include "stim/ofdm.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace stim::ofdm {

namespace {

Eigen::VectorXcd unitary_dft(const Eigen::VectorXcd& x, double sign) {
    const auto n = x.size();
    Eigen::VectorXcd out(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index m = 0; m < n; ++m) {
        Complex acc{};
        for (Eigen::Index t = 0; t < n; ++t)
            acc += x[t] * std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>((m * t) % n) /
                                              static_cast<double>(n));
        out[m] = acc * scale;
    }
    return out;
}

}  // namespace

void validate(const OfdmConfig& cfg) {
    if (cfg.n_subcarriers < 1 || cfg.n_taps < 1 || cfg.n_rx < 1)
        throw ConfigError("OFDM needs N, L and n_r >= 1");
    if (cfg.n_subcarriers < cfg.n_taps)
        throw ConfigError("OFDM needs N >= L, got N=" + std::to_string(cfg.n_subcarriers) +
                          " L=" + std::to_string(cfg.n_taps));
}

Eigen::VectorXcd dft(const Eigen::VectorXcd& x) { return unitary_dft(x, -1.0); }
Eigen::VectorXcd idft(const Eigen::VectorXcd& x) { return unitary_dft(x, +1.0); }

Eigen::VectorXcd modulate(const Bits& bits, const OfdmConfig& cfg) {
    validate(cfg);
    if (bits.size() != bits_per_block(cfg))
        throw UsageError("ofdm::modulate: expected " + std::to_string(bits_per_block(cfg)) + " bits, got " +
                         std::to_string(bits.size()));
    const unsigned m_bits = cfg.alphabet.bits_per_symbol();
    Eigen::VectorXcd freq(cfg.n_subcarriers);
    for (unsigned m = 0; m < cfg.n_subcarriers; ++m)
        freq[m] = cfg.alphabet.point(bits_to_uint(bits, std::size_t{m} * m_bits, m_bits));

    const Eigen::VectorXcd time = idft(freq);
    const unsigned cp = cfg.n_taps - 1;
    Eigen::VectorXcd block(cfg.n_subcarriers + cp);
    block.head(cp) = time.tail(cp);
    block.tail(cfg.n_subcarriers) = time;
    return block;
}

Eigen::MatrixXcd transmit(const Eigen::VectorXcd& block, const ChannelRealization& ch, double sigma2,
                          Philox4x32& rng) {
    if (ch.n_tx() != 1) throw UsageError("ofdm::transmit: single transmit antenna expected");
    const auto len = block.size();
    Eigen::MatrixXcd rx = Eigen::MatrixXcd::Zero(len, ch.n_rx());
    for (Eigen::Index j = 0; j < ch.n_rx(); ++j)
        for (Eigen::Index t = 0; t < len; ++t) {
            Complex acc{};
            for (unsigned l = 0; l < ch.n_taps() && l <= t; ++l) acc += ch.taps[l](j, 0) * block[t - l];
            rx(t, j) = acc;
        }
    if (sigma2 > 0.0)
        for (Eigen::Index j = 0; j < rx.cols(); ++j)
            for (Eigen::Index t = 0; t < len; ++t) rx(t, j) += complex_gaussian(rng, sigma2);
    return rx;
}

Eigen::MatrixXcd frequency_response(const ChannelRealization& ch, unsigned n_subcarriers) {
    Eigen::MatrixXcd lambda = Eigen::MatrixXcd::Zero(n_subcarriers, ch.n_rx());
    for (Eigen::Index j = 0; j < ch.n_rx(); ++j)
        for (unsigned m = 0; m < n_subcarriers; ++m)
            for (unsigned l = 0; l < ch.n_taps(); ++l)
                lambda(m, j) += ch.taps[l](j, 0) *
                                std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>((m * l) % n_subcarriers) /
                                                    static_cast<double>(n_subcarriers));
    return lambda;
}

Bits detect(const Eigen::MatrixXcd& received, const ChannelRealization& ch, const OfdmConfig& cfg) {
    validate(cfg);
    const unsigned n = cfg.n_subcarriers;
    const unsigned cp = cfg.n_taps - 1;
    if (received.rows() != n + cp || received.cols() != ch.n_rx())
        throw UsageError("ofdm::detect: received block has the wrong shape");

    // With the unitary DFT the CP-stripped block gives Y_m = Lambda_m S_m + noise.
    Eigen::MatrixXcd freq(n, received.cols());
    for (Eigen::Index j = 0; j < received.cols(); ++j) freq.col(j) = dft(received.col(j).tail(n));
    const Eigen::MatrixXcd lambda = frequency_response(ch, n);

    Bits out;
    out.reserve(bits_per_block(cfg));
    const auto& points = cfg.alphabet.points();
    for (unsigned m = 0; m < n; ++m) {
        std::size_t best = 0;
        double best_metric = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < points.size(); ++s) {
            double metric = 0.0;
            for (Eigen::Index j = 0; j < freq.cols(); ++j) metric += std::norm(freq(m, j) - lambda(m, j) * points[s]);
            if (metric < best_metric) {
                best_metric = metric;
                best = s;
            }
        }
        append_uint(out, best, cfg.alphabet.bits_per_symbol());
    }
    return out;
}

}  // namespace stim::ofdm
