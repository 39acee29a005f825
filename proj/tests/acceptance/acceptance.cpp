// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stim/channel.hpp"
#include "stim/cli.hpp"
#include "stim/detectors.hpp"
#include "stim/harness.hpp"
#include "stim/rate.hpp"

using namespace stim;

namespace {

// Tolerances and budgets.
constexpr double kGoldenBudgetMs = 1.0;
constexpr double kChannelTolerance = 1e-10;
constexpr double kNoiselessSnrDb = 60.0;
constexpr double kTargetBer = 1e-3;
constexpr std::uint64_t kMinErrorsPerPoint = 200;
constexpr double kMlGapMin = 4.0, kMlGapMax = 8.0;
constexpr double kSsdGapMin = 0.5, kSsdGapMax = 2.0;
constexpr double kOfdmGapMin = 2.0;
constexpr double kPosteriorTvMax = 0.05;
constexpr double kRayleighSigmas = 3.0;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

StimConfig stim_cfg(unsigned nt, unsigned nr, unsigned n, unsigned k, AlphabetKind a, unsigned l = 2) {
    StimConfig c;
    c.n_tx = nt;
    c.n_rx = nr;
    c.n_slots = n;
    c.n_used = k;
    c.n_taps = l;
    c.alphabet = Alphabet::build(a);
    return c;
}

double truncate(double v, int digits) {
    const double s = std::pow(10.0, digits);
    return std::floor(v * s + 1e-9) / s;
}

Bits random_bits(Philox4x32& rng, std::size_t n) {
    Bits b(n);
    for (auto& x : b) x = rng() & 1u;
    return b;
}

// SNR (dB) where BER crosses `target`, from a 1 dB grid walked upward from `start`
// and interpolated linearly in log10(BER) between the bracketing points.
struct Crossing {
    double snr = std::numeric_limits<double>::quiet_NaN();
    std::string trace;
};

Crossing snr_at_ber(SweepSpec spec, double start, double target) {
    spec.snr_points.clear();
    for (int i = 0; i <= 40; ++i) spec.snr_points.push_back(start - 10.0 + i);
    const std::size_t first = 10;

    std::vector<double> ber(spec.snr_points.size(), -1.0);
    auto at = [&](std::size_t i) {
        if (ber[i] < 0.0) {
            const auto r = run_ber_point(spec, i);
            ber[i] = r.ber();
            std::fprintf(stderr, "    %s/%s snr %5.1f dB: %8llu frames %6llu errors ber %.3e\n",
                         std::string(to_string(spec.system)).c_str(), std::string(to_string(spec.detector)).c_str(),
                         spec.snr_points[i], static_cast<unsigned long long>(r.frames),
                         static_cast<unsigned long long>(r.bit_errors_total), r.ber());
        }
        return ber[i];
    };

    Crossing c;
    std::size_t i = first;
    while (i > 0 && at(i) < target) --i;
    while (i + 1 < spec.snr_points.size() && at(i + 1) >= target) ++i;
    if (i + 1 >= spec.snr_points.size() || at(i) < target) return c;
    const double b0 = std::log10(at(i)), b1 = std::log10(std::max(at(i + 1), 1e-12));
    const double t = (b0 - std::log10(target)) / (b0 - b1);
    c.snr = spec.snr_points[i] + t;
    c.trace = fmt("%.2e", at(i)) + "@" + fmt("%.0f", spec.snr_points[i]) + " " + fmt("%.2e", at(i + 1)) + "@" +
              fmt("%.0f", spec.snr_points[i + 1]);
    return c;
}

SweepSpec ber_spec(SystemKind sys, DetectorKind det, StimConfig cfg) {
    SweepSpec s;
    s.system = sys;
    s.detector = det;
    s.cfg = std::move(cfg);
    s.min_frames = 100;
    s.max_frames = 5'000'000;
    s.min_bit_errors = kMinErrorsPerPoint;
    s.seed = 2024;
    s.mp = MpParams{10, 0.3, 1e-6};
    s.workers = 0;
    return s;
}

// ---------------------------------------------------------------------------

Outcome golden() {
    const auto t0 = Clock::now();
    const auto r = cli::golden_check();
    const double ms = seconds_since(t0) * 1e3;

    const char* argv[] = {"stim", "roundtrip", "--golden"};
    std::ostringstream out, err;
    const int code = cli::run(3, argv, out, err);
    const bool cli_pass = code == 0 && out.str().find("PASS") != std::string::npos;
    return {r.pass && cli_pass && ms < kGoldenBudgetMs,
            std::string("A, B, X ") + (r.pass ? "match" : "differ") + ", CLI exit " + std::to_string(code) + ", " +
                fmt("%.3f ms", ms)};
}

Outcome rate_table() {
    struct Row {
        const char* name;
        double value;
        double quoted;
        int digits;
    };
    const rate::RateParams n6{6, 2, 2, 4}, n8{8, 2, 2, 4}, n12{12, 2, 2, 4};
    const Row rows[] = {
        {"N=6 stim", rate::stim_rate(n6, 5), 2.428, 3}, {"N=6 ofdm qam8", rate::ofdm_rate(6, 2, 8), 2.57, 2},
        {"N=6 ofdm qam4", rate::ofdm_rate(6, 2, 4), 1.71, 2}, {"N=8 stim", rate::stim_rate(n8, 7), 2.66, 2},
        {"N=8 ofdm", rate::ofdm_rate(8, 2, 8), 2.66, 2},       {"N=12 stim", rate::stim_rate(n12, 11), 2.769, 3},
        {"N=12 ofdm", rate::ofdm_rate(12, 2, 8), 2.769, 3},
    };
    bool pass = true;
    std::string detail;
    for (const auto& r : rows) {
        const bool ok = std::abs(truncate(r.value, r.digits) - r.quoted) < 1e-9;
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : ", ") + r.name + "=" + fmt("%.4f", r.value) + (ok ? "" : "(!)");
    }
    return {pass, detail};
}

Outcome optimal_k() {
    const unsigned sizes[] = {2, 4, 8, 16};
    const unsigned expect[] = {103, 114, 121, 125};
    bool pass = true;
    std::string detail = "k_star =";
    for (int i = 0; i < 4; ++i) {
        const rate::RateParams p{128, 4, 2, sizes[i]};
        const auto kb = rate::k_bounds(p);
        unsigned best = 1;
        for (unsigned k = 1; k <= 128; ++k)
            if (rate::stim_rate(p, k, true) > rate::stim_rate(p, best, true)) best = k;
        pass = pass && kb.k_star == expect[i] && best == expect[i];
        detail += " " + std::to_string(kb.k_star) + (best == kb.k_star ? "" : "(sweep " + std::to_string(best) + ")");
    }
    return {pass, detail};
}

Outcome optimal_n() {
    struct Case {
        unsigned nt, size, quoted;
    };
    const Case cases[] = {{2, 2, 11}, {2, 4, 22}, {2, 16, 87}, {4, 4, 44}};
    bool pass = true;
    std::string detail;
    for (const auto& c : cases) {
        const int formula = static_cast<int>(rate::optimal_n(c.nt, c.size));
        const int brute = static_cast<int>(rate::brute_force_optimal_n(c.nt, c.size, 512));
        const bool ok = std::abs(formula - brute) <= 1 && std::abs(formula - static_cast<int>(c.quoted)) <= 1;
        pass = pass && ok;
        detail += std::string(detail.empty() ? "" : ", ") + "round " + std::to_string(formula) + " brute " +
                  std::to_string(brute) + " (~" + std::to_string(c.quoted) + ")";
    }
    return {pass, detail};
}

Outcome channel_oracle() {
    Philox4x32 rng(5, 0, 0);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const unsigned n = 2 + static_cast<unsigned>(rng() % 15);
        const unsigned l = 1 + static_cast<unsigned>(rng() % std::min(n, 4u));
        const unsigned nt = 1u << (rng() % 3);
        const unsigned nr = 1 + static_cast<unsigned>(rng() % 4);
        const unsigned k = 1 + static_cast<unsigned>(rng() % n);
        const auto cfg = stim_cfg(nt, nr, n, k, AlphabetKind::qam4, l);
        const auto frame = encode_frame(random_bits(rng, bit_partition(cfg).total()), cfg);
        const auto ch = draw_channel(rng, cfg);
        const Eigen::VectorXcd hx = build_block_circulant(ch, n) * frame.stacked();
        Eigen::VectorXcd oracle = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n) * nr);
        for (unsigned s = 0; s < n; ++s)
            for (unsigned tap = 0; tap < l; ++tap)
                oracle.segment(s * nr, nr) += ch.taps[tap] * frame.signal.col((s + n - tap) % n);
        worst = std::max(worst, (hx - oracle).cwiseAbs().maxCoeff());
    }
    return {worst < kChannelTolerance, "max |Hx - circular oracle| = " + fmt("%.2e", worst) + " over 100 pairs"};
}

Outcome noiseless() {
    const auto cfg = stim_cfg(2, 4, 8, 7, AlphabetKind::qam4);
    const double sigma2 = snr_to_sigma2(kNoiselessSnrDb, cfg.n_taps);
    std::size_t e_ml = 0, e_2 = 0, e_3 = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        auto rng = trial_stream(6, 0, t);
        const auto ch = draw_channel(rng, cfg);
        const auto bits = random_bits(rng, bit_partition(cfg).total());
        const auto frame = encode_frame(bits, cfg);
        const auto h = build_block_circulant(ch, cfg.n_slots);
        const auto y = transmit(frame, h, sigma2, rng).y;
        auto errors = [&](const Bits& b) {
            std::size_t e = 0;
            for (std::size_t i = 0; i < b.size(); ++i) e += b[i] != bits[i];
            return e;
        };
        e_ml += errors(ml_detect(y, h, cfg, std::uint64_t{1} << 24).bits);
        e_2 += errors(ssd2_detect(y, h, sigma2, cfg).bits);
        e_3 += errors(ssd3_detect(y, h, sigma2, cfg).bits);
    }
    return {e_ml == 0 && e_2 == 0 && e_3 == 0, "bit errors over 100 frames: ML " + std::to_string(e_ml) + ", 2SSD " +
                                                   std::to_string(e_2) + ", 3SSD " + std::to_string(e_3)};
}

Outcome ml_vs_ofdm_gap() {
    const auto stim = snr_at_ber(ber_spec(SystemKind::stim, DetectorKind::ml, stim_cfg(2, 4, 6, 5, AlphabetKind::qam4)),
                                 6.0, kTargetBer);
    const auto ofdm = snr_at_ber(
        ber_spec(SystemKind::ofdm, DetectorKind::ml, stim_cfg(1, 4, 6, 6, AlphabetKind::qam8)), 10.0, kTargetBer);
    const double gap = ofdm.snr - stim.snr;
    return {gap >= kMlGapMin && gap <= kMlGapMax,
            "SNR at 1e-3: STIM-ML " + fmt("%.2f", stim.snr) + " dB, OFDM-8QAM " + fmt("%.2f", ofdm.snr) +
                " dB, gap " + fmt("%.2f", gap) + " dB (window 4..8)"};
}

Outcome ssd_ordering() {
    const auto cfg = stim_cfg(2, 4, 8, 7, AlphabetKind::qam4);
    const auto s2 = snr_at_ber(ber_spec(SystemKind::stim, DetectorKind::ssd2, cfg), 9.0, kTargetBer);
    const auto s3 = snr_at_ber(ber_spec(SystemKind::stim, DetectorKind::ssd3, cfg), 8.0, kTargetBer);
    const auto of = snr_at_ber(
        ber_spec(SystemKind::ofdm, DetectorKind::ml, stim_cfg(1, 4, 8, 8, AlphabetKind::qam8)), 11.0, kTargetBer);
    const double gap_ssd = s2.snr - s3.snr;
    const double gap2 = of.snr - s2.snr, gap3 = of.snr - s3.snr;
    const bool pass = gap_ssd >= kSsdGapMin && gap_ssd <= kSsdGapMax && gap2 >= kOfdmGapMin &&
                      gap3 >= kOfdmGapMin;
    return {pass, "SNR at 1e-3: 2SSD " + fmt("%.2f", s2.snr) + ", 3SSD " + fmt("%.2f", s3.snr) + ", OFDM " +
                      fmt("%.2f", of.snr) + " dB; 3SSD gain " + fmt("%.2f", gap_ssd) + " dB, over OFDM " +
                      fmt("%.2f", gap2) + " / " + fmt("%.2f", gap3) + " dB"};
}

Outcome exact_posterior() {
    const auto cfg = stim_cfg(1, 2, 2, 1, AlphabetKind::bpsk);
    const double sigma2 = snr_to_sigma2(10.0, cfg.n_taps);
    double tv = 0.0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        auto rng = trial_stream(9, 0, static_cast<std::uint64_t>(t));
        const auto ch = draw_channel(rng, cfg);
        const auto frame = encode_frame(random_bits(rng, 2), cfg);
        const auto h = build_block_circulant(ch, 2);
        const auto y = transmit(frame, h, sigma2, rng).y;
        double w[2] = {0.0, 0.0};
        for (std::uint64_t v = 0; v < 4; ++v) {
            Bits b;
            append_uint(b, v, 2);
            const auto f = encode_frame(b, cfg);
            w[f.sap.used[0]] += std::exp(-(y - h * f.stacked()).squaredNorm() / sigma2);
        }
        const double exact0 = w[0] / (w[0] + w[1]);
        const auto post = ssd2_detect(y, h, sigma2, cfg).diagnostics.slot_posterior;
        tv += 0.5 * (std::abs(post[0] - exact0) + std::abs(post[1] - (1.0 - exact0)));
    }
    tv /= trials;
    return {tv < kPosteriorTvMax, "mean total variation " + fmt("%.4f", tv) + " over 1000 trials"};
}

Outcome rayleigh() {
    SweepSpec s;
    s.detector = DetectorKind::ml;
    s.cfg = stim_cfg(1, 1, 4, 4, AlphabetKind::bpsk, 1);
    s.snr_points = {5.0, 10.0, 15.0};
    s.min_frames = 1000;
    s.max_frames = 2'000'000;
    s.min_bit_errors = 4000;
    s.seed = 10;
    s.workers = 0;
    const auto records = run_sweep(s);
    bool pass = true;
    std::string detail;
    for (const auto& r : records) {
        const double g = std::pow(10.0, r.snr_db / 10.0);
        const double p = 0.5 * (1.0 - std::sqrt(g / (1.0 + g)));
        const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(r.bits_total));
        const double z = (r.ber() - p) / se;
        pass = pass && std::abs(z) < kRayleighSigmas;
        detail += std::string(detail.empty() ? "" : ", ") + fmt("%.0f dB: ", r.snr_db) + fmt("%.4e", r.ber()) +
                  " vs " + fmt("%.4e", p) + fmt(" (z=%+.2f)", z);
    }
    return {pass, detail};
}

Outcome determinism() {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "stim_acceptance";
    fs::create_directories(dir);
    auto read = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    auto run = [&](const std::vector<std::string>& extra, const fs::path& out, const std::string& workers) {
        std::vector<std::string> args{"stim", "ber", "--deterministic", "--seed", "123", "--out", out.string(),
                                      "--workers", workers};
        args.insert(args.end(), extra.begin(), extra.end());
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream o, e;
        return cli::run(static_cast<int>(argv.size()), argv.data(), o, e);
    };
    const std::vector<std::vector<std::string>> runs = {
        {"--detector", "3ssd", "--nr", "4", "--snr", "4,7", "--min-frames", "100", "--max-frames", "3000"},
        {"--system", "ofdm", "--detector", "ml", "--nr", "4", "--alphabet", "qam8", "--n", "8", "--snr", "8,10"},
    };
    bool pass = true;
    int compared = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::string reference;
        for (const char* w : {"1", "2", "5"}) {
            const auto path = dir / ("run" + std::to_string(i) + "_w" + w + ".csv");
            if (run(runs[i], path, w) != 0) return {false, "ber run failed"};
            const auto text = read(path);
            if (reference.empty())
                reference = text;
            else {
                pass = pass && text == reference;
                ++compared;
            }
        }
    }
    return {pass, std::to_string(compared) + " CSV pairs across 1/2/5 workers " +
                      (pass ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "golden example frame", golden},
        {2, "rate table", rate_table},
        {3, "optimal k", optimal_k},
        {4, "optimal N", optimal_n},
        {5, "channel oracle", channel_oracle},
        {6, "noiseless consistency", noiseless},
        {7, "STIM-ML vs OFDM gap", ml_vs_ofdm_gap},
        {8, "2SSD/3SSD/OFDM ordering", ssd_ordering},
        {9, "exact posterior oracle", exact_posterior},
        {10, "Rayleigh BPSK oracle", rayleigh},
        {11, "determinism across workers", determinism},
    };

    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2d %s  %-28s %s  [%.2f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
