#include "stim/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "stim/channel.hpp"
#include "stim/ofdm.hpp"

namespace stim {

namespace {

Bits random_bits(Philox4x32& rng, std::size_t n) {
    Bits bits(n);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) word = rng();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
    }
    return bits;
}

std::uint64_t count_errors(const Bits& a, const Bits& b, std::size_t first, std::size_t count) {
    std::uint64_t e = 0;
    for (std::size_t i = first; i < first + count; ++i) e += a[i] != b[i];
    return e;
}

ofdm::OfdmConfig ofdm_config(const StimConfig& cfg) {
    return ofdm::OfdmConfig{cfg.n_slots, cfg.n_taps, cfg.n_rx, cfg.alphabet};
}

template <class Fn>
void parallel_for(std::uint64_t count, unsigned workers, Fn&& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::uint64_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::jthread> pool;
    const auto n_threads = static_cast<unsigned>(std::min<std::uint64_t>(workers, count));
    pool.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w)
        pool.emplace_back([&] {
            try {
                for (auto i = next++; i < count; i = next++) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = count;
            }
        });
    pool.clear();
    if (error) std::rethrow_exception(error);
}

}  // namespace

SystemKind parse_system_kind(std::string_view name) {
    if (name == "stim") return SystemKind::stim;
    if (name == "ofdm") return SystemKind::ofdm;
    throw ConfigError("unknown system '" + std::string(name) + "' (expected stim or ofdm)");
}

std::string_view to_string(SystemKind kind) { return kind == SystemKind::stim ? "stim" : "ofdm"; }

void validate(const SweepSpec& spec) {
    if (spec.snr_points.empty()) throw ConfigError("at least one SNR point is required");
    for (double snr : spec.snr_points)
        if (std::isnan(snr)) throw ConfigError("SNR points must be numbers");
    if (spec.min_frames > spec.max_frames) throw ConfigError("min_frames must not exceed max_frames");
    if (spec.max_frames == 0) throw ConfigError("max_frames must be >= 1");
    if (spec.system == SystemKind::stim) {
        validate(spec.cfg);
        validate(spec.mp);
        if (spec.detector == DetectorKind::ml) {
            const auto total = bit_partition(spec.cfg).total();
            if (total >= 64 || (std::uint64_t{1} << total) > kDefaultMlCandidateCap)
                throw ConfigError("ML enumeration of 2^" + std::to_string(total) +
                                  " frames exceeds the cap; use 2ssd or 3ssd");
        }
    } else {
        ofdm::validate(ofdm_config(spec.cfg));
        if (spec.detector != DetectorKind::ml) throw ConfigError("OFDM supports the ml detector only");
    }
}

TrialOutcome run_trial(const SweepSpec& spec, std::size_t point_index, std::uint64_t trial) {
    auto rng = trial_stream(spec.seed, point_index, trial);
    const double sigma2 = snr_to_sigma2(spec.snr_points.at(point_index), spec.cfg.n_taps);
    TrialOutcome out;

    if (spec.system == SystemKind::ofdm) {
        const auto ocfg = ofdm_config(spec.cfg);
        const auto ch = draw_channel(rng, ocfg.n_rx, 1, ocfg.n_taps);
        const auto bits = random_bits(rng, ofdm::bits_per_block(ocfg));
        const auto rx = ofdm::transmit(ofdm::modulate(bits, ocfg), ch, sigma2, rng);
        const auto detected = ofdm::detect(rx, ch, ocfg);
        out.bits = bits.size();
        out.symbol_errors = count_errors(bits, detected, 0, bits.size());
        return out;
    }

    const auto& cfg = spec.cfg;
    const auto part = bit_partition(cfg);
    const auto ch = draw_channel(rng, cfg);
    const auto bits = random_bits(rng, part.total());
    const auto frame = encode_frame(bits, cfg);
    const auto h = build_block_circulant(ch, cfg.n_slots);
    const auto rx = transmit(frame, h, sigma2, rng);
    const auto det = detect(spec.detector, rx.y, h, sigma2, cfg, spec.mp);

    out.bits = part.total();
    out.antenna_errors = count_errors(bits, det.bits, 0, part.antenna_bits);
    out.slot_errors = count_errors(bits, det.bits, part.antenna_bits, part.slot_bits);
    out.symbol_errors = count_errors(bits, det.bits, part.antenna_bits + part.slot_bits, part.symbol_bits);
    return out;
}

BerRecord run_ber_point(const SweepSpec& spec, std::size_t point_index) {
    validate(spec);
    const unsigned workers = spec.workers ? spec.workers : std::max(1u, std::thread::hardware_concurrency());

    BerRecord rec;
    rec.snr_db = spec.snr_points.at(point_index);
    const std::uint64_t batch = std::max<std::uint64_t>(256, std::uint64_t{64} * workers);
    std::vector<TrialOutcome> outcomes;

    for (std::uint64_t first = 0; first < spec.max_frames;) {
        const auto count = std::min(batch, spec.max_frames - first);
        outcomes.assign(count, TrialOutcome{});
        parallel_for(count, workers, [&](std::uint64_t i) { outcomes[i] = run_trial(spec, point_index, first + i); });

        // Fold in trial order so the stopping point does not depend on scheduling.
        for (const auto& o : outcomes) {
            ++rec.frames;
            rec.bits_total += o.bits;
            rec.bit_errors_antenna += o.antenna_errors;
            rec.bit_errors_slot += o.slot_errors;
            rec.bit_errors_symbol += o.symbol_errors;
            rec.bit_errors_total += o.total_errors();
            rec.frame_errors += o.total_errors() > 0;
            if (rec.frames >= spec.min_frames && rec.bit_errors_total >= spec.min_bit_errors) return rec;
        }
        first += count;
    }
    return rec;
}

std::vector<BerRecord> run_sweep(const SweepSpec& spec) {
    validate(spec);
    std::vector<BerRecord> out;
    out.reserve(spec.snr_points.size());
    for (std::size_t p = 0; p < spec.snr_points.size(); ++p) out.push_back(run_ber_point(spec, p));
    return out;
}

void write_csv(std::ostream& os, const SweepSpec& spec, const std::vector<BerRecord>& records,
               bool deterministic) {
    const auto& c = spec.cfg;
    os << "# stim ber sweep\n";
    os << "# system=" << to_string(spec.system) << '\n';
    os << "# detector=" << to_string(spec.detector) << '\n';
    os << "# n_t=" << (spec.system == SystemKind::stim ? c.n_tx : 1u) << '\n';
    os << "# n_r=" << c.n_rx << '\n';
    os << "# N=" << c.n_slots << '\n';
    os << "# k=" << (spec.system == SystemKind::stim ? c.n_used : c.n_slots) << '\n';
    os << "# L=" << c.n_taps << '\n';
    os << "# alphabet=" << to_string(c.alphabet.kind()) << '\n';
    os << "# iters=" << spec.mp.max_iterations << '\n';
    os << "# damp=" << format_shortest(spec.mp.damping) << '\n';
    os << "# seed=" << spec.seed << '\n';
    os << "# snr_db=";
    for (std::size_t i = 0; i < spec.snr_points.size(); ++i)
        os << (i ? "," : "") << format_shortest(spec.snr_points[i]);
    os << '\n';
    os << "# min_frames=" << spec.min_frames << '\n';
    os << "# max_frames=" << spec.max_frames << '\n';
    os << "# min_bit_errors=" << spec.min_bit_errors << '\n';
    os << "# version=" << kVersion << '\n';
    if (!deterministic) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        os << "# generated=" << buf << '\n';
    }
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        char ber[32];
        std::snprintf(ber, sizeof ber, "%.6e", r.ber());
        os << format_shortest(r.snr_db) << ',' << r.frames << ',' << r.bits_total << ',' << r.bit_errors_total << ','
           << r.bit_errors_antenna << ',' << r.bit_errors_slot << ',' << r.bit_errors_symbol << ','
           << r.frame_errors << ',' << ber << '\n';
    }
}

void write_csv_file(const std::filesystem::path& path, const SweepSpec& spec,
                    const std::vector<BerRecord>& records, bool deterministic) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
    write_csv(f, spec, records, deterministic);
    f.flush();
    if (!f) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace stim
