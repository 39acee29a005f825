#include <algorithm>
#include <cmath>
#include <limits>

#include "detector_common.hpp"

namespace stim {

namespace {

constexpr double kMinVariance = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

// Pmf of the number of ones among independent Bernoulli slots, by sequential convolution.
void convolve_bernoulli(std::vector<double>& pmf, double p_one) {
    pmf.push_back(0.0);
    for (std::size_t m = pmf.size() - 1; m > 0; --m) pmf[m] = pmf[m] * (1.0 - p_one) + pmf[m - 1] * p_one;
    pmf[0] *= 1.0 - p_one;
}

}  // namespace

// ---------------------------------------------------------------------------
// SlotSymbolMessagePassing

SlotSymbolMessagePassing::SlotSymbolMessagePassing(const Eigen::MatrixXcd& h_reduced, const Eigen::VectorXcd& y,
                                                   double sigma2, const StimConfig& cfg, const MpParams& mp)
    : h_(h_reduced), y_(y), sigma2_(std::max(sigma2, kMinVariance)), mp_(mp),
      n_obs_(static_cast<std::size_t>(h_reduced.rows())), n_slots_(static_cast<std::size_t>(h_reduced.cols())),
      n_values_(cfg.alphabet.size() + 1), n_used_(cfg.n_used) {
    validate(mp);
    if (y.size() != h_reduced.rows()) throw UsageError("SlotSymbolMessagePassing: dimension mismatch");
    if (n_used_ > n_slots_) throw UsageError("SlotSymbolMessagePassing: k exceeds slot count");

    values_.push_back(Complex{});
    for (const auto& pt : cfg.alphabet.points()) values_.push_back(pt);
    log_prior_.assign(n_values_, -std::log(static_cast<double>(cfg.alphabet.size())));
    log_prior_[0] = 0.0;

    log_v_.assign(n_obs_ * n_slots_ * n_values_, -std::log(static_cast<double>(n_values_)));
    p_.assign(n_slots_ * n_obs_ * n_values_, 1.0 / static_cast<double>(n_values_));
    const double active = static_cast<double>(n_used_) / static_cast<double>(n_slots_);
    q_.resize(2 * n_slots_);
    for (std::size_t l = 0; l < n_slots_; ++l) {
        q_[2 * l] = 1.0 - active;
        q_[2 * l + 1] = active;
    }
    u_.assign(2 * n_slots_, 0.5);
    log_sum_.assign(n_slots_ * n_values_, 0.0);
}

std::span<const double> SlotSymbolMessagePassing::log_v(std::size_t i, std::size_t l) const {
    return {log_v_.data() + (i * n_slots_ + l) * n_values_, n_values_};
}
std::span<const double> SlotSymbolMessagePassing::p(std::size_t l, std::size_t i) const {
    return {p_.data() + (l * n_obs_ + i) * n_values_, n_values_};
}
std::span<const double> SlotSymbolMessagePassing::q(std::size_t l) const { return {q_.data() + 2 * l, 2}; }
std::span<const double> SlotSymbolMessagePassing::u(std::size_t l) const { return {u_.data() + 2 * l, 2}; }

std::vector<double> SlotSymbolMessagePassing::phi(std::size_t l) const {
    std::vector<double> pmf{1.0};
    for (std::size_t j = 0; j < n_slots_; ++j)
        if (j != l) convolve_bernoulli(pmf, q_[2 * j + 1]);
    return pmf;
}

void SlotSymbolMessagePassing::update_v() {
    // Moments of p_li over {0} u A; index [i][l].
    std::vector<Complex> mean(n_obs_ * n_slots_);
    std::vector<double> var(n_obs_ * n_slots_);
    for (std::size_t l = 0; l < n_slots_; ++l)
        for (std::size_t i = 0; i < n_obs_; ++i) {
            const auto msg = p(l, i);
            Complex m{};
            double e2 = 0.0;
            for (std::size_t z = 0; z < n_values_; ++z) {
                m += msg[z] * values_[z];
                e2 += msg[z] * std::norm(values_[z]);
            }
            mean[i * n_slots_ + l] = m;
            var[i * n_slots_ + l] = std::max(0.0, e2 - std::norm(m));
        }

    std::fill(log_sum_.begin(), log_sum_.end(), 0.0);
    for (std::size_t i = 0; i < n_obs_; ++i) {
        Complex total_mean{};
        double total_var = 0.0;
        for (std::size_t l = 0; l < n_slots_; ++l) {
            const Complex hil = h_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
            total_mean += hil * mean[i * n_slots_ + l];
            total_var += std::norm(hil) * var[i * n_slots_ + l];
        }
        for (std::size_t l = 0; l < n_slots_; ++l) {
            const Complex hil = h_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l));
            const Complex mu = total_mean - hil * mean[i * n_slots_ + l];
            const double s2 = std::max(total_var - std::norm(hil) * var[i * n_slots_ + l], 0.0) + sigma2_;
            const Complex resid = y_[static_cast<Eigen::Index>(i)] - mu;
            std::span<double> out{log_v_.data() + (i * n_slots_ + l) * n_values_, n_values_};
            for (std::size_t z = 0; z < n_values_; ++z) out[z] = -std::norm(resid - values_[z] * hil) / s2;
            normalize_log_in_place(out);
            for (std::size_t z = 0; z < n_values_; ++z) log_sum_[l * n_values_ + z] += out[z];
        }
    }
}

void SlotSymbolMessagePassing::update_u() {
    // prefix[l]: count pmf over slots [0, l); suffix[l]: over slots [l, N).
    std::vector<std::vector<double>> prefix(n_slots_ + 1), suffix(n_slots_ + 1);
    prefix[0] = {1.0};
    for (std::size_t l = 0; l < n_slots_; ++l) {
        prefix[l + 1] = prefix[l];
        convolve_bernoulli(prefix[l + 1], q_[2 * l + 1]);
    }
    suffix[n_slots_] = {1.0};
    for (std::size_t l = n_slots_; l-- > 0;) {
        suffix[l] = suffix[l + 1];
        convolve_bernoulli(suffix[l], q_[2 * l + 1]);
    }

    auto phi_at = [&](std::size_t l, std::size_t count) {
        const auto& a = prefix[l];
        const auto& b = suffix[l + 1];
        double s = 0.0;
        for (std::size_t i = 0; i < a.size() && i <= count; ++i)
            if (count - i < b.size()) s += a[i] * b[count - i];
        return s;
    };

    for (std::size_t l = 0; l < n_slots_; ++l) {
        const double raw[2] = {phi_at(l, n_used_), phi_at(l, n_used_ - 1)};
        const auto msg = normalize_messages(raw);
        u_[2 * l] = msg[0];
        u_[2 * l + 1] = msg[1];
    }
}

double SlotSymbolMessagePassing::update_p() {
    double tv = 0.0;
    std::vector<double> fresh(n_values_);
    for (std::size_t l = 0; l < n_slots_; ++l) {
        const double log_u0 = safe_log(u_[2 * l]);
        const double log_u1 = safe_log(u_[2 * l + 1]);
        for (std::size_t i = 0; i < n_obs_; ++i) {
            const auto lv = log_v(i, l);
            for (std::size_t z = 0; z < n_values_; ++z)
                fresh[z] = (z == 0 ? log_u0 : log_u1) + log_prior_[z] + log_sum_[l * n_values_ + z] - lv[z];
            normalize_log_in_place(fresh);
            for (auto& f : fresh) f = std::exp(f);
            tv = std::max(tv, damp_into({p_.data() + (l * n_obs_ + i) * n_values_, n_values_}, fresh, mp_.damping));
        }
    }
    return tv;
}

double SlotSymbolMessagePassing::update_q() {
    double tv = 0.0;
    for (std::size_t l = 0; l < n_slots_; ++l) {
        double mx = kNegInf;
        for (std::size_t z = 1; z < n_values_; ++z) mx = std::max(mx, log_sum_[l * n_values_ + z] + log_prior_[z]);
        double acc = 0.0;
        for (std::size_t z = 1; z < n_values_; ++z) acc += std::exp(log_sum_[l * n_values_ + z] + log_prior_[z] - mx);
        double log_q[2] = {log_sum_[l * n_values_], mx + std::log(acc)};
        const auto fresh = normalize_log_messages(log_q);
        tv = std::max(tv, damp_into({q_.data() + 2 * l, 2}, fresh, mp_.damping));
    }
    return tv;
}

double SlotSymbolMessagePassing::iterate() {
    update_v();
    update_u();
    const double tv_p = update_p();
    const double tv_q = update_q();
    return std::max(tv_p, tv_q);
}

unsigned SlotSymbolMessagePassing::run() {
    for (unsigned it = 1; it <= mp_.max_iterations; ++it)
        if (iterate() < mp_.tolerance) return it;
    return mp_.max_iterations;
}

std::vector<double> SlotSymbolMessagePassing::slot_posterior() const {
    std::vector<double> post(n_slots_);
    for (std::size_t l = 0; l < n_slots_; ++l) {
        const auto pmf = phi(l);
        const double u0 = n_used_ < pmf.size() ? pmf[n_used_] : 0.0;
        const double u1 = pmf[n_used_ - 1];
        const double raw[2] = {q_[2 * l] * u0, q_[2 * l + 1] * u1};
        post[l] = normalize_messages(raw)[1];
    }
    return post;
}

std::vector<std::size_t> SlotSymbolMessagePassing::symbol_decisions() const {
    std::vector<std::size_t> out(n_slots_);
    for (std::size_t l = 0; l < n_slots_; ++l) {
        const double* row = log_sum_.data() + l * n_values_;
        out[l] = static_cast<std::size_t>(std::max_element(row + 1, row + n_values_) - (row + 1));
    }
    return out;
}

// ---------------------------------------------------------------------------
// VectorMessagePassing

Eigen::MatrixXcd candidate_vectors(const StimConfig& cfg) {
    const auto n_sym = cfg.alphabet.size();
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(cfg.n_tx, static_cast<Eigen::Index>(cfg.n_tx * n_sym));
    for (unsigned a = 0; a < cfg.n_tx; ++a)
        for (std::size_t s = 0; s < n_sym; ++s) m(a, static_cast<Eigen::Index>(a * n_sym + s)) = cfg.alphabet.point(s);
    return m;
}

VectorMessagePassing::VectorMessagePassing(const Eigen::MatrixXcd& g, const Eigen::VectorXcd& y, double sigma2,
                                           const StimConfig& cfg, const MpParams& mp)
    : n_obs_(static_cast<std::size_t>(g.rows())), n_vars_(static_cast<std::size_t>(g.cols()) / cfg.n_tx),
      n_cand_(cfg.n_tx * cfg.alphabet.size()), y_(y), sigma2_(std::max(sigma2, kMinVariance)), mp_(mp) {
    validate(mp);
    if (y.size() != g.rows() || g.cols() % cfg.n_tx != 0)
        throw UsageError("VectorMessagePassing: dimension mismatch");

    const auto n_sym = cfg.alphabet.size();
    gs_.resize(n_obs_ * n_vars_ * n_cand_);
    for (std::size_t i = 0; i < n_obs_; ++i)
        for (std::size_t j = 0; j < n_vars_; ++j)
            for (std::size_t m = 0; m < n_cand_; ++m) {
                const auto col = static_cast<Eigen::Index>(j * cfg.n_tx + m / n_sym);
                gs_[(i * n_vars_ + j) * n_cand_ + m] = g(static_cast<Eigen::Index>(i), col) * cfg.alphabet.point(m % n_sym);
            }
    p_.assign(n_vars_ * n_obs_ * n_cand_, 1.0 / static_cast<double>(n_cand_));
    mean_.assign(n_obs_ * n_vars_, Complex{});
    var_.assign(n_obs_ * n_vars_, sigma2_);
}

std::span<const double> VectorMessagePassing::p(std::size_t j, std::size_t i) const {
    return {p_.data() + (j * n_obs_ + i) * n_cand_, n_cand_};
}

void VectorMessagePassing::update_moments() {
    std::vector<Complex> own_mean(n_vars_);
    std::vector<double> own_var(n_vars_);
    for (std::size_t i = 0; i < n_obs_; ++i) {
        Complex total_mean{};
        double total_var = 0.0;
        for (std::size_t j = 0; j < n_vars_; ++j) {
            const auto msg = p(j, i);
            const Complex* gs = gs_.data() + (i * n_vars_ + j) * n_cand_;
            Complex m{};
            double e2 = 0.0;
            for (std::size_t c = 0; c < n_cand_; ++c) {
                m += msg[c] * gs[c];
                e2 += msg[c] * std::norm(gs[c]);
            }
            own_mean[j] = m;
            own_var[j] = std::max(0.0, e2 - std::norm(m));
            total_mean += m;
            total_var += own_var[j];
        }
        for (std::size_t j = 0; j < n_vars_; ++j) {
            mean_[i * n_vars_ + j] = total_mean - own_mean[j];
            var_[i * n_vars_ + j] = std::max(total_var - own_var[j], 0.0) + sigma2_;
        }
    }
}

double VectorMessagePassing::iterate() {
    update_moments();
    // ll[i][j][m] = -|y_i - mean_ij - g_{i,[j]} s_m|^2 / var_ij
    std::vector<double> ll(n_obs_ * n_vars_ * n_cand_);
    std::vector<double> total(n_vars_ * n_cand_, 0.0);
    for (std::size_t i = 0; i < n_obs_; ++i)
        for (std::size_t j = 0; j < n_vars_; ++j) {
            const Complex r = y_[static_cast<Eigen::Index>(i)] - mean_[i * n_vars_ + j];
            const double v = var_[i * n_vars_ + j];
            const Complex* gs = gs_.data() + (i * n_vars_ + j) * n_cand_;
            double* out = ll.data() + (i * n_vars_ + j) * n_cand_;
            for (std::size_t c = 0; c < n_cand_; ++c) {
                out[c] = -std::norm(r - gs[c]) / v;
                total[j * n_cand_ + c] += out[c];
            }
        }

    double tv = 0.0;
    std::vector<double> fresh(n_cand_);
    for (std::size_t j = 0; j < n_vars_; ++j)
        for (std::size_t i = 0; i < n_obs_; ++i) {
            const double* own = ll.data() + (i * n_vars_ + j) * n_cand_;
            for (std::size_t c = 0; c < n_cand_; ++c) fresh[c] = total[j * n_cand_ + c] - own[c];
            normalize_log_in_place(fresh);
            for (auto& f : fresh) f = std::exp(f);
            tv = std::max(tv, damp_into({p_.data() + (j * n_obs_ + i) * n_cand_, n_cand_}, fresh, mp_.damping));
        }
    return tv;
}

unsigned VectorMessagePassing::run() {
    unsigned it = 1;
    for (; it <= mp_.max_iterations; ++it)
        if (iterate() < mp_.tolerance) break;
    update_moments();
    return std::min(it, mp_.max_iterations);
}

std::vector<double> VectorMessagePassing::posterior(std::size_t j) const {
    std::vector<double> logp(n_cand_, 0.0);
    for (std::size_t i = 0; i < n_obs_; ++i) {
        const Complex r = y_[static_cast<Eigen::Index>(i)] - mean_[i * n_vars_ + j];
        const double v = var_[i * n_vars_ + j];
        const Complex* gs = gs_.data() + (i * n_vars_ + j) * n_cand_;
        for (std::size_t c = 0; c < n_cand_; ++c) logp[c] -= std::norm(r - gs[c]) / v;
    }
    return normalize_log_messages(logp);
}

std::vector<std::size_t> VectorMessagePassing::decisions() const {
    std::vector<std::size_t> out(n_vars_);
    for (std::size_t j = 0; j < n_vars_; ++j) {
        const auto post = posterior(j);
        out[j] = static_cast<std::size_t>(std::max_element(post.begin(), post.end()) - post.begin());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Detectors

DetectionResult ssd2_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2,
                            const StimConfig& cfg, const MpParams& mp) {
    validate(cfg);
    validate(mp);
    const auto est = mmse_stage(y, h, sigma2, cfg.n_tx);
    SlotSymbolMessagePassing engine(reduce_model(h, est.antenna_index, cfg.n_tx), y, sigma2, cfg, mp);
    const unsigned iterations = engine.run();

    std::vector<double> activity(cfg.n_slots);
    for (unsigned l = 0; l < cfg.n_slots; ++l) activity[l] = engine.q(l)[1];
    const auto choice = detail::select_sap(activity, cfg);

    const auto labels = engine.symbol_decisions();
    std::vector<unsigned> antennas;
    std::vector<Complex> symbols;
    for (auto s : choice.sap.used) {
        antennas.push_back(est.antenna_index[s]);
        symbols.push_back(cfg.alphabet.point(labels[s]));
    }
    auto r = detail::assemble_result(choice.sap, std::move(antennas), std::move(symbols), choice.repaired, y, h, cfg);
    r.diagnostics.iterations_run = iterations;
    r.diagnostics.slot_posterior = engine.slot_posterior();
    return r;
}

DetectionResult ssd3_detect(const Eigen::VectorXcd& y, const Eigen::MatrixXcd& h, double sigma2,
                            const StimConfig& cfg, const MpParams& mp) {
    auto stage2 = ssd2_detect(y, h, sigma2, cfg, mp);

    Eigen::MatrixXcd g(h.rows(), static_cast<Eigen::Index>(cfg.n_used) * cfg.n_tx);
    for (unsigned j = 0; j < cfg.n_used; ++j)
        g.middleCols(j * cfg.n_tx, cfg.n_tx) = h.middleCols(stage2.sap.used[j] * cfg.n_tx, cfg.n_tx);

    VectorMessagePassing engine(g, y, sigma2, cfg, mp);
    const unsigned iterations = engine.run();

    const auto n_sym = cfg.alphabet.size();
    std::vector<unsigned> antennas;
    std::vector<Complex> symbols;
    for (auto m : engine.decisions()) {
        antennas.push_back(static_cast<unsigned>(m / n_sym));
        symbols.push_back(cfg.alphabet.point(m % n_sym));
    }
    auto r = detail::assemble_result(stage2.sap, std::move(antennas), std::move(symbols),
                                     stage2.diagnostics.sap_repaired, y, h, cfg);
    r.diagnostics.iterations_run = stage2.diagnostics.iterations_run + iterations;
    r.diagnostics.slot_posterior = std::move(stage2.diagnostics.slot_posterior);
    return r;
}

}  // namespace stim
