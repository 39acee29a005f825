#include "stim/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "stim/rate.hpp"

namespace stim::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_integer(std::string_view key, std::string_view text) {
    text = trim(text);
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key) +
                          " (expected a non-negative integer)");
    return v;
}

double parse_real(std::string_view key, std::string_view text) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty() || !std::isfinite(v))
        throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key) +
                          " (expected a number)");
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key) + " (expected true or false)");
}

std::string format_complex(Complex z) {
    if (z == Complex{}) return "0";
    char buf[64];
    if (z.imag() == 0.0)
        std::snprintf(buf, sizeof buf, "%g", z.real());
    else if (z.real() == 0.0)
        std::snprintf(buf, sizeof buf, "%gj", z.imag());
    else
        std::snprintf(buf, sizeof buf, "%g%+gj", z.real(), z.imag());
    return buf;
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"system", [](RunConfig& rc, auto, auto v) { rc.spec.system = parse_system_kind(trim(v)); }},
        {"detector", [](RunConfig& rc, auto, auto v) { rc.spec.detector = parse_detector_kind(trim(v)); }},
        {"nt", [](RunConfig& rc, auto k, auto v) { rc.spec.cfg.n_tx = parse_integer<unsigned>(k, v); }},
        {"nr", [](RunConfig& rc, auto k, auto v) { rc.spec.cfg.n_rx = parse_integer<unsigned>(k, v); }},
        {"n_slots", [](RunConfig& rc, auto k, auto v) { rc.spec.cfg.n_slots = parse_integer<unsigned>(k, v); }},
        {"k", [](RunConfig& rc, auto k, auto v) { rc.spec.cfg.n_used = parse_integer<unsigned>(k, v); }},
        {"l_taps", [](RunConfig& rc, auto k, auto v) { rc.spec.cfg.n_taps = parse_integer<unsigned>(k, v); }},
        {"alphabet",
         [](RunConfig& rc, auto, auto v) { rc.spec.cfg.alphabet = Alphabet::build(parse_alphabet_kind(trim(v))); }},
        {"snr_db", [](RunConfig& rc, auto, auto v) { rc.spec.snr_points = parse_snr_list(v); }},
        {"seed", [](RunConfig& rc, auto k, auto v) { rc.spec.seed = parse_integer<std::uint64_t>(k, v); }},
        {"iters", [](RunConfig& rc, auto k, auto v) { rc.spec.mp.max_iterations = parse_integer<unsigned>(k, v); }},
        {"damp", [](RunConfig& rc, auto k, auto v) { rc.spec.mp.damping = parse_real(k, v); }},
        {"out",
         [](RunConfig& rc, auto k, auto v) {
             if (trim(v).empty()) throw ConfigError(std::string(k) + " needs a path");
             rc.out = std::filesystem::path(std::string(trim(v)));
         }},
        {"min_frames",
         [](RunConfig& rc, auto k, auto v) {
             rc.spec.min_frames = parse_integer<std::uint64_t>(k, v);
             rc.min_frames_set = true;
         }},
        {"max_frames", [](RunConfig& rc, auto k, auto v) { rc.spec.max_frames = parse_integer<std::uint64_t>(k, v); }},
        {"min_bit_errors",
         [](RunConfig& rc, auto k, auto v) { rc.spec.min_bit_errors = parse_integer<std::uint64_t>(k, v); }},
        {"workers", [](RunConfig& rc, auto k, auto v) { rc.spec.workers = parse_integer<unsigned>(k, v); }},
        {"deterministic", [](RunConfig& rc, auto k, auto v) { rc.deterministic = parse_bool(k, v); }},
    };
    return table;
}

void set_key(RunConfig& rc, std::string_view key, std::string_view value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown configuration key '" + std::string(key) + "'");
    it->second(rc, key, value);
}

rate::RateParams rate_params(const RunConfig& rc) {
    const auto& c = rc.spec.cfg;
    rate::RateParams p{c.n_slots, c.n_taps, c.n_tx, static_cast<unsigned>(c.alphabet.size())};
    rate::validate(p);
    return p;
}

void print_matrix(std::ostream& os, std::string_view name, const Eigen::MatrixXcd& m) {
    os << name << " =\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        os << "  [";
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const auto cell = format_complex(m(r, c));
            os << (c ? " " : "") << std::string(cell.size() < 6 ? 6 - cell.size() : 0, ' ') << cell;
        }
        os << " ]\n";
    }
}

// Writes to the --out file when one is configured, otherwise to `fallback`.
template <class Fn>
void emit(const RunConfig& rc, std::ostream& fallback, Fn&& write) {
    if (!rc.out) {
        write(fallback);
        return;
    }
    std::ofstream f(*rc.out);
    if (!f) throw IoError("cannot open '" + rc.out->string() + "' for writing");
    write(f);
    f.flush();
    if (!f) throw IoError("failed writing '" + rc.out->string() + "'");
}

int cmd_rate(const RunConfig& rc, std::ostream& out) {
    auto p = rate_params(rc);
    if (rc.sweep != "k" && rc.sweep != "n")
        throw ConfigError("--sweep must be k or n, got '" + rc.sweep + "'");
    echo_config(out, rc);
    emit(rc, out, [&](std::ostream& os) {
        char line[160];
        if (rc.sweep == "k") {
            os << "k,rate_stim,rate_ofdm,rate_improvement_pct\n";
            const double r_ofdm = rate::ofdm_rate(p.n_slots, p.n_taps, p.alphabet_size);
            for (const auto& [k, r] : rate::rate_curve(p, 1, p.n_slots, rc.analytic)) {
                std::snprintf(line, sizeof line, "%u,%.6f,%.6f,%.6f\n", k, r, r_ofdm,
                              rate::rate_improvement(p, k, rc.analytic));
                os << line;
            }
        } else {
            if (rc.n_max < 2) throw ConfigError("--n-max must be >= 2");
            os << "N,k,rate_stim,rate_ofdm,rate_improvement_pct\n";
            for (unsigned n = std::max(2u, p.n_taps); n <= rc.n_max; ++n) {
                auto q = p;
                q.n_slots = n;
                std::snprintf(line, sizeof line, "%u,%u,%.6f,%.6f,%.6f\n", n, n - 1,
                              rate::stim_rate(q, n - 1, rc.analytic), rate::ofdm_rate(n, q.n_taps, q.alphabet_size),
                              rate::rate_improvement(q, n - 1, rc.analytic));
                os << line;
            }
        }
    });
    return 0;
}

int cmd_optimal_k(const RunConfig& rc, std::ostream& out) {
    const auto p = rate_params(rc);
    const auto kb = rate::k_bounds(p);
    echo_config(out, rc);
    char line[160];
    std::snprintf(line, sizeof line, "# k_l = %.4f\n# k_u = %.4f\n# k_m = %.4f\n", kb.k_l, kb.k_u, kb.k_m);
    out << line;
    std::snprintf(line, sizeof line, "# rate at k_star = %.6f bpcu\n", rate::stim_rate(p, kb.k_star, true));
    out << line << kb.k_star << '\n';
    return 0;
}

int cmd_optimal_n(const RunConfig& rc, std::ostream& out) {
    const auto& c = rc.spec.cfg;
    const auto size = static_cast<unsigned>(c.alphabet.size());
    const auto n = rate::optimal_n(c.n_tx, size);
    echo_config(out, rc);
    out << "# brute force argmax over N in [2, " << rc.n_max
        << "] = " << rate::brute_force_optimal_n(c.n_tx, size, rc.n_max) << '\n';
    out << n << '\n';
    return 0;
}

int cmd_golden(std::ostream& out) {
    const auto report = golden_check();
    out << "# golden example: nt = 2, n_slots = 8, k = 7, l_taps = 2, alphabet = qam4 (unnormalized)\n";
    out << "# bits = ";
    for (auto b : golden_bits()) out << int(b);
    out << '\n';
    print_matrix(out, "A", report.frame.activation.cast<Complex>());
    print_matrix(out, "B", report.frame.signal);
    print_matrix(out, "X", report.frame.with_cp);
    if (!report.pass) {
        out << "expected:\n";
        print_matrix(out, "A", report.expected_a.cast<Complex>());
        print_matrix(out, "B", report.expected_b);
        print_matrix(out, "X", report.expected_x);
    }
    out << (report.pass ? "PASS" : "FAIL") << '\n';
    return report.pass ? 0 : 1;
}

int cmd_roundtrip(const RunConfig& rc, std::ostream& out) {
    if (rc.golden) return cmd_golden(out);

    auto spec = rc.spec;
    if (spec.snr_points.empty()) spec.snr_points = {std::numeric_limits<double>::infinity()};
    validate(spec);
    echo_config(out, rc);
    out << "snr_db,frames,bits_total,bit_errors_antenna,bit_errors_slot,bit_errors_symbol,frame_errors\n";
    for (std::size_t p = 0; p < spec.snr_points.size(); ++p) {
        BerRecord r;
        for (std::uint64_t t = 0; t < rc.frames; ++t) {
            const auto o = run_trial(spec, p, t);
            ++r.frames;
            r.bits_total += o.bits;
            r.bit_errors_antenna += o.antenna_errors;
            r.bit_errors_slot += o.slot_errors;
            r.bit_errors_symbol += o.symbol_errors;
            r.frame_errors += o.total_errors() > 0;
        }
        const double snr = spec.snr_points[p];
        out << (std::isinf(snr) ? std::string("noiseless") : format_shortest(snr)) << ',' << r.frames << ','
            << r.bits_total << ',' << r.bit_errors_antenna << ',' << r.bit_errors_slot << ','
            << r.bit_errors_symbol << ',' << r.frame_errors << '\n';
    }
    return 0;
}

int cmd_ber(const RunConfig& rc, std::ostream& out) {
    validate(rc.spec);
    if (rc.out) echo_config(out, rc);
    const auto records = run_sweep(rc.spec);
    if (rc.out) {
        write_csv_file(*rc.out, rc.spec, records, rc.deterministic);
        for (const auto& r : records) {
            char line[160];
            std::snprintf(line, sizeof line, "snr %s dB: %llu frames, %llu bit errors, ber %.3e\n",
                          format_shortest(r.snr_db).c_str(), static_cast<unsigned long long>(r.frames),
                          static_cast<unsigned long long>(r.bit_errors_total), r.ber());
            out << line;
        }
        out << "wrote " << rc.out->string() << '\n';
    } else {
        write_csv(out, rc.spec, records, rc.deterministic);
    }
    return 0;
}

}  // namespace

void apply_config_text(std::string_view text, RunConfig& rc) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        const auto raw = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;

        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        try {
            set_key(rc, key, trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void apply_config_file(const std::filesystem::path& path, RunConfig& rc) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    apply_config_text(ss.str(), rc);
}

std::vector<double> parse_snr_list(std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        const auto item = trim(text.substr(0, comma));
        if (item.empty()) throw ConfigError("empty entry in SNR list");
        const auto c1 = item.find(':');
        if (c1 == std::string_view::npos) {
            out.push_back(parse_real("snr_db", item));
        } else {
            const auto c2 = item.find(':', c1 + 1);
            if (c2 == std::string_view::npos) throw ConfigError("SNR range must be start:step:stop");
            const double start = parse_real("snr_db", item.substr(0, c1));
            const double step = parse_real("snr_db", item.substr(c1 + 1, c2 - c1 - 1));
            const double stop = parse_real("snr_db", item.substr(c2 + 1));
            if (!(step > 0.0) || stop < start) throw ConfigError("SNR range needs step > 0 and stop >= start");
            const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
            if (count > 10000) throw ConfigError("SNR range has too many points");
            for (std::size_t i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
        }
        if (comma == std::string_view::npos) break;
        text = text.substr(comma + 1);
    }
    return out;
}

void echo_config(std::ostream& os, const RunConfig& rc) {
    const auto& s = rc.spec;
    const auto& c = s.cfg;
    os << "# command = " << rc.command << '\n';
    os << "# system = " << to_string(s.system) << '\n';
    os << "# detector = " << to_string(s.detector) << '\n';
    os << "# nt = " << c.n_tx << '\n';
    os << "# nr = " << c.n_rx << '\n';
    os << "# n_slots = " << c.n_slots << '\n';
    os << "# k = " << c.n_used << '\n';
    os << "# l_taps = " << c.n_taps << '\n';
    os << "# alphabet = " << to_string(c.alphabet.kind()) << '\n';
    os << "# snr_db = ";
    for (std::size_t i = 0; i < s.snr_points.size(); ++i) os << (i ? "," : "") << format_shortest(s.snr_points[i]);
    os << '\n';
    os << "# seed = " << s.seed << '\n';
    os << "# iters = " << s.mp.max_iterations << '\n';
    os << "# damp = " << format_shortest(s.mp.damping) << '\n';
    os << "# min_frames = " << s.min_frames << '\n';
    os << "# max_frames = " << s.max_frames << '\n';
    os << "# min_bit_errors = " << s.min_bit_errors << '\n';
    os << "# workers = " << s.workers << '\n';
    os << "# deterministic = " << (rc.deterministic ? "true" : "false") << '\n';
    if (rc.out) os << "# out = " << rc.out->string() << '\n';
}

Bits golden_bits() {
    const char* text = "011010100101001111000110";
    Bits bits;
    for (const char* p = text; *p; ++p) bits.push_back(static_cast<std::uint8_t>(*p - '0'));
    return bits;
}

GoldenReport golden_check() {
    StimConfig cfg;
    cfg.n_tx = 2;
    cfg.n_rx = 1;
    cfg.n_slots = 8;
    cfg.n_used = 7;
    cfg.n_taps = 2;
    cfg.alphabet = Alphabet::build(AlphabetKind::qam4, false);

    GoldenReport r;
    r.expected_a.resize(2, 8);
    r.expected_a << 1, 0, 0, 1, 0, 1, 0, 0,
                    0, 1, 1, 0, 1, 0, 0, 1;
    const Complex j{0.0, 1.0};
    r.expected_b.resize(2, 8);
    r.expected_b << 1.0 - j, 0, 0, -1.0 - j, 0, 1.0 - j, 0, 0,
                    0, 1.0 + j, -1.0 - j, 0, 1.0 + j, 0, 0, -1.0 + j;
    r.expected_x.resize(2, 9);
    r.expected_x << 0, 1.0 - j, 0, 0, -1.0 - j, 0, 1.0 - j, 0, 0,
                    -1.0 + j, 0, 1.0 + j, -1.0 - j, 0, 1.0 + j, 0, 0, -1.0 + j;

    const auto bits = golden_bits();
    r.frame = encode_frame(bits, cfg);
    std::vector<Complex> symbols;
    for (auto l : r.frame.labels) symbols.push_back(cfg.alphabet.point(l));
    const auto decoded = decode_frame(r.frame.sap, r.frame.antennas, symbols, cfg);
    r.decode_ok = decoded.bits == bits && !decoded.sap_repaired;
    r.pass = r.decode_ok && r.frame.activation == r.expected_a && r.frame.signal == r.expected_b &&
             r.frame.with_cp == r.expected_x;
    return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Space-time index modulation link simulator and rate calculator", "stim"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(kVersion));

    std::string config_path;
    app.add_option("--config", config_path, "Flat key = value config file; flags override it");

    // Flags map onto config keys so both paths share one parser.
    struct Flag {
        const char* name;
        const char* key;
        const char* help;
        std::string value;
        CLI::Option* opt = nullptr;
    };
    std::vector<Flag> flags = {
        {"--system", "system", "stim or ofdm", {}},
        {"--detector", "detector", "ml, mmse, 2ssd or 3ssd", {}},
        {"--nt", "nt", "transmit antennas (power of two)", {}},
        {"--nr", "nr", "receive antennas", {}},
        {"--n", "n_slots", "slots per frame N (OFDM: subcarriers)", {}},
        {"--k", "k", "used slots per frame", {}},
        {"--l", "l_taps", "channel taps L", {}},
        {"--alphabet", "alphabet", "bpsk (qam2), qam4, qam8 or qam16", {}},
        {"--snr", "snr_db", "SNR list in dB: 0,2,4 or start:step:stop", {}},
        {"--seed", "seed", "64-bit seed (default 0)", {}},
        {"--iters", "iters", "message passing iterations", {}},
        {"--damp", "damp", "damping factor in (0, 1]", {}},
        {"--out", "out", "output file", {}},
        {"--min-frames", "min_frames", "minimum frames per SNR point", {}},
        {"--max-frames", "max_frames", "maximum frames per SNR point", {}},
        {"--min-errors", "min_bit_errors", "bit errors required before stopping", {}},
        {"--workers", "workers", "worker threads, 0 = all cores (results do not depend on it)", {}},
    };
    for (auto& f : flags) f.opt = app.add_option(f.name, f.value, f.help);

    bool deterministic = false, analytic = false, golden = false;
    std::string sweep;
    unsigned n_max = 0;
    std::uint64_t frames = 0;
    auto* det_opt = app.add_flag("--deterministic", deterministic, "omit the timestamp from CSV output");
    auto* sweep_opt = app.add_option("--sweep", sweep, "rate: sweep k (fixed N) or n (k = N - 1)");
    app.add_flag("--analytic", analytic, "rate: drop the floor on the slot-index bits");
    auto* nmax_opt = app.add_option("--n-max", n_max, "rate --sweep n / optimal-n: largest N");
    app.add_flag("--golden", golden, "roundtrip: check the documented example frame");
    auto* frames_opt = app.add_option("--frames", frames, "roundtrip: frames per SNR point");

    app.add_subcommand("rate", "rate table over k or N as CSV");
    app.add_subcommand("optimal-k", "k maximizing the rate for the given N");
    app.add_subcommand("optimal-n", "N maximizing the rate improvement over OFDM with k = N - 1");
    app.add_subcommand("roundtrip", "encode, transmit, detect and decode; or --golden");
    app.add_subcommand("ber", "Monte-Carlo BER sweep written as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig rc;
        rc.command = app.get_subcommands().front()->get_name();
        if (!config_path.empty()) apply_config_file(config_path, rc);
        for (const auto& f : flags)
            if (f.opt->count()) set_key(rc, f.key, f.value);
        if (det_opt->count()) rc.deterministic = deterministic;
        if (sweep_opt->count()) rc.sweep = sweep;
        if (nmax_opt->count()) rc.n_max = n_max;
        if (frames_opt->count()) rc.frames = frames;
        if (!rc.min_frames_set) rc.spec.min_frames = std::min(rc.spec.min_frames, rc.spec.max_frames);
        rc.analytic = analytic;
        rc.golden = golden;

        if (rc.command == "rate") return cmd_rate(rc, out);
        if (rc.command == "optimal-k") return cmd_optimal_k(rc, out);
        if (rc.command == "optimal-n") return cmd_optimal_n(rc, out);
        if (rc.command == "roundtrip") return cmd_roundtrip(rc, out);
        return cmd_ber(rc, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace stim::cli
