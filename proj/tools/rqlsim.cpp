// rqlsim: command-line front end over the C API.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rql/rql.h"

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kCheckFailed = 1, kUsage = 2, kIoError = 3 };

struct CliError : std::runtime_error {
    CliError(int code, const std::string& msg) : std::runtime_error(msg), code(code) {}
    int code;
};

[[noreturn]] void usage(const std::string& msg) { throw CliError(kUsage, msg); }

void check(rql_status s) {
    if (s == RQL_OK) return;
    throw CliError(s == RQL_ERR_IO ? kIoError : kUsage, std::string(rql_status_name(s)) + ": " + rql_last_error());
}

json take_json(char* s) {
    json j = json::parse(s);
    rql_string_free(s);
    return j;
}

struct TableDeleter { void operator()(rql_gate_table* p) const { rql_gate_table_free(p); } };
struct NetlistDeleter { void operator()(rql_netlist* p) const { rql_netlist_free(p); } };
struct TraceDeleter { void operator()(rql_trace* p) const { rql_trace_free(p); } };
struct TransformerDeleter { void operator()(rql_transformer* p) const { rql_transformer_free(p); } };
using TablePtr = std::unique_ptr<rql_gate_table, TableDeleter>;
using NetlistPtr = std::unique_ptr<rql_netlist, NetlistDeleter>;
using TracePtr = std::unique_ptr<rql_trace, TraceDeleter>;
using TransformerPtr = std::unique_ptr<rql_transformer, TransformerDeleter>;

// ---- number formatting and parsing ----

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string sig(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// 559.5e-9, "W" -> "559.5 nW"
std::string si(double v, const std::string& unit) {
    static const std::pair<double, const char*> prefixes[] = {
        {1e9, "G"}, {1e6, "M"}, {1e3, "k"}, {1.0, ""}, {1e-3, "m"}, {1e-6, "u"}, {1e-9, "n"}, {1e-12, "p"}};
    if (v == 0.0 || !std::isfinite(v)) return sig(v) + " " + unit;
    for (const auto& [scale, p] : prefixes) {
        if (std::abs(v) >= scale * 0.9995) return sig(v / scale) + " " + p + unit;
    }
    return sig(v / 1e-15) + " f" + unit;
}

const std::map<std::string, double> kFrequencyUnits{{"hz", 1.0}, {"khz", 1e3}, {"mhz", 1e6}, {"ghz", 1e9}};

std::optional<double> parse_number(std::string_view s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// "10GHz", "259 kHz", "6.21e9" -> Hz. Empty unit when none is given.
std::pair<double, std::string> split_frequency(std::string s) {
    s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
    std::size_t cut = s.size();
    while (cut > 0 && std::isalpha(static_cast<unsigned char>(s[cut - 1]))) --cut;
    std::string unit = s.substr(cut);
    std::transform(unit.begin(), unit.end(), unit.begin(), [](unsigned char c) { return std::tolower(c); });
    const auto v = parse_number(std::string_view(s).substr(0, cut));
    if (!v) usage("bad frequency '" + s + "'");
    if (!unit.empty() && !kFrequencyUnits.count(unit)) usage("unknown frequency unit '" + unit + "'");
    return {*v, unit};
}

double parse_frequency(const std::string& s) {
    const auto [v, unit] = split_frequency(s);
    return v * (unit.empty() ? 1.0 : kFrequencyUnits.at(unit));
}

// "1:20GHz" -> (1e9, 20e9); a unit on the upper bound carries to the lower.
std::pair<double, double> parse_frequency_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) usage("expected a range 'lo:hi', got '" + s + "'");
    const auto [lo, lo_unit] = split_frequency(s.substr(0, colon));
    const auto [hi, hi_unit] = split_frequency(s.substr(colon + 1));
    const double hi_scale = hi_unit.empty() ? 1.0 : kFrequencyUnits.at(hi_unit);
    const double lo_scale = lo_unit.empty() ? hi_scale : kFrequencyUnits.at(lo_unit);
    if (!(lo * lo_scale < hi * hi_scale)) usage("range '" + s + "' must have lo < hi");
    return {lo * lo_scale, hi * hi_scale};
}

std::pair<std::size_t, std::size_t> parse_pair(const std::string& s) {
    const auto colon = s.find(':');
    const auto a = colon == std::string::npos ? std::nullopt : parse_number(s.substr(0, colon));
    const auto b = colon == std::string::npos ? std::nullopt : parse_number(s.substr(colon + 1));
    if (!a || !b || *a < 1 || *b < 1 || *a != std::floor(*a) || *b != std::floor(*b)) {
        usage("expected 'active:zero' block lengths, got '" + s + "'");
    }
    return {static_cast<std::size_t>(*a), static_cast<std::size_t>(*b)};
}

std::uint16_t parse_u16(const std::string& s) {
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(s, &used, 0);
        if (used != s.size() || v > 0xFFFF) throw std::out_of_range(s);
        return static_cast<std::uint16_t>(v);
    } catch (const std::exception&) {
        usage("expected a 16-bit value, got '" + s + "'");
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 1) usage("need at least one sweep point");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

// ---- shared state ----

struct Globals {
    std::string config;
    std::string out = ".";
    std::string seed = "0xACE1";
    std::string format = "table";
};

struct Report {
    json result = json::object();
    std::vector<std::pair<std::string, std::string>> rows;
    std::string csv;  // primary CSV; rows are used when empty
    bool passed = true;
};

TablePtr load_table(const Globals& g) {
    rql_gate_table* t = nullptr;
    if (g.config.empty()) check(rql_gate_table_new(&t));
    else check(rql_gate_table_load(g.config.c_str(), &t));
    return TablePtr(t);
}

// Netlist from a file, or a freshly generated adder.
struct NetlistSource {
    std::string path;
    int width = 8;
    int idle = 1;

    void add_to(CLI::App* sub) {
        sub->add_option("netlist", path, "Netlist file (default: generate an adder)");
        sub->add_option("--width", width, "Adder width when no netlist is given")->capture_default_str();
        sub->add_option("--idle", idle, "Idle phases when no netlist is given")->capture_default_str();
    }

    NetlistPtr get(const Globals& g, json& result) const {
        rql_netlist* nl = nullptr;
        if (!path.empty()) {
            check(rql_netlist_load(path.c_str(), &nl));
            result["netlist"] = path;
        } else {
            auto table = load_table(g);
            rql_adder_options o;
            rql_adder_options_init(&o);
            o.n_bits = width;
            o.idle_phases = idle;
            check(rql_netlist_generate(&o, table.get(), &nl));
            result["netlist"] = {{"generated_width", width}, {"idle_phases", idle}};
        }
        return NetlistPtr(nl);
    }
};

std::string out_path(const Globals& g, const std::string& name) { return (fs::path(g.out) / name).string(); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << text)) throw CliError(kIoError, "cannot write '" + path + "'");
}

// ---- subcommands ----

struct GenCmd {
    int width = 8, idle = 1, idle_before = -1, max_fanout = 4;
    bool chip = false;
    double ptl_um = 0.0;
    std::string clock = "10GHz";
    std::string name;

    void setup(CLI::App* sub) {
        sub->add_option("--width", width, "Adder width (power of two, 2..64)")->capture_default_str();
        sub->add_option("--idle", idle, "Idle phases")->capture_default_str();
        sub->add_option("--idle-before", idle_before, "Logic stage the idle phases precede (-1: last CLA column)")
            ->capture_default_str();
        sub->add_flag("--chip", chip, "Omit the carry-out");
        sub->add_option("--max-fanout", max_fanout, "Fanout limit")->capture_default_str();
        sub->add_option("--ptl-um", ptl_um, "Route long wires as passive lines of this length (um)");
        sub->add_option("--clock", clock, "Clock frequency for the latency report")->capture_default_str();
        sub->add_option("--name", name, "Netlist file name inside --out (default adder<width>.rqlnet)");
    }

    Report run(const Globals& g) const {
        auto table = load_table(g);
        rql_adder_options o;
        rql_adder_options_init(&o);
        o.n_bits = width;
        o.chip_mode = chip ? 1 : 0;
        o.idle_phases = idle;
        o.idle_before_stage = idle_before;
        o.max_fanout = max_fanout;
        o.ptl_length_um = ptl_um;
        rql_netlist* raw = nullptr;
        check(rql_netlist_generate(&o, table.get(), &raw));
        NetlistPtr nl(raw);

        const std::string file = name.empty() ? "adder" + std::to_string(width) + ".rqlnet" : name;
        check(rql_netlist_save(nl.get(), out_path(g, file).c_str()));
        char* js = nullptr;
        check(rql_netlist_report_json(nl.get(), parse_frequency(clock), &js));

        Report r;
        r.result = take_json(js);
        r.result["netlist_file"] = file;
        const auto& st = r.result["stats"];
        const auto& lat = r.result["latency"];
        r.rows = {{"netlist", file},
                  {"width", std::to_string(width)},
                  {"carry_out", r.result["carry_out"].get<bool>() ? "yes" : "no"},
                  {"gates", st["gates"].dump()},
                  {"junctions", st["jj_total"].dump()},
                  {"ic_avg", st["ic_avg_ua"].is_null() ? "-" : sig(st["ic_avg_ua"].get<double>()) + " uA"},
                  {"max_fanout", st["max_fanout"].dump()},
                  {"logic_stages", r.result["logic_stages"].dump()},
                  {"idle_phases", r.result["idle_phases"].dump()},
                  {"phases", lat["phases"].dump()},
                  {"latency_cycles", sig(lat["cycles"].get<double>())},
                  {"latency", sig(lat["picoseconds"].get<double>()) + " ps @ " + si(parse_frequency(clock), "Hz")}};
        for (const auto& [region, frac] : st["region_fraction"].items()) {
            r.rows.emplace_back("region " + region, sig(100.0 * frac.get<double>(), 3) + " % of Ic");
        }
        return r;
    }
};

struct ValidateCmd {
    std::string path;
    int max_fanout = 4;

    void setup(CLI::App* sub) {
        sub->add_option("netlist", path, "Netlist file")->required();
        sub->add_option("--max-fanout", max_fanout, "Fanout limit")->capture_default_str();
    }

    Report run(const Globals&) const {
        rql_netlist* raw = nullptr;
        check(rql_netlist_load(path.c_str(), &raw));
        NetlistPtr nl(raw);
        std::size_t n = 0;
        char* js = nullptr;
        check(rql_netlist_validate(nl.get(), max_fanout, &n, &js));
        Report r;
        r.result["netlist"] = path;
        r.result["diagnostics"] = take_json(js);
        r.result["count"] = n;
        r.passed = n == 0;
        r.rows.emplace_back("netlist", path);
        r.rows.emplace_back("diagnostics", std::to_string(n));
        for (const auto& d : r.result["diagnostics"]) {
            r.rows.emplace_back(d["kind"].get<std::string>() + " @" + d["gate"].dump(), d["message"].get<std::string>());
        }
        return r;
    }
};

struct SimCmd {
    NetlistSource src;
    std::string vectors, serial, prbs, chop;
    bool exhaustive = false;
    std::size_t random = 0, cycles = 0, length = 65535, periods = 1;
    bool timed = false, do_check = false;
    std::string clock = "10GHz";
    double bias = 1.0;
    double window_frac = -1.0;
    std::string trace_name = "trace.csv";

    void setup(CLI::App* sub) {
        src.add_to(sub);
        sub->add_option("--vectors", vectors, "File of hex A,B pairs");
        sub->add_option("--serial", serial, "Serial bit-string file for the shift-register harness");
        sub->add_option("--prbs", prbs, "LFSR seed for a pseudo-random serial program");
        sub->add_flag("--exhaustive", exhaustive, "Every A,B pair (width <= 10)");
        sub->add_option("--random", random, "Uniform random pairs drawn with --seed");
        sub->add_option("--cycles", cycles, "Harness cycles (0: one per serial bit)");
        sub->add_option("--length", length, "PRBS program length in bits")->capture_default_str();
        sub->add_option("--chop", chop, "Alternate active:zero blocks of the PRBS program");
        sub->add_option("--periods", periods, "Chop periods")->capture_default_str();
        sub->add_flag("--timed", timed, "Apply static timing at --clock/--bias");
        sub->add_option("--clock", clock, "Clock frequency")->capture_default_str();
        sub->add_option("--bias", bias, "Relative clock amplitude")->capture_default_str();
        sub->add_option("--window-frac", window_frac, "Extra receiver window as a fraction of T");
        sub->add_flag("--check", do_check, "Compare against integer addition");
        sub->add_option("--trace", trace_name, "Trace CSV name inside --out")->capture_default_str();
    }

    Report run(const Globals& g) const {
        Report r;
        auto nl = src.get(g, r.result);
        rql_netlist_info info;
        check(rql_netlist_info_get(nl.get(), &info));
        const int width = info.width;

        const int n_sources = !vectors.empty() + !serial.empty() + !prbs.empty() + exhaustive + (random > 0);
        if (n_sources != 1) usage("sim needs exactly one of --vectors, --serial, --prbs, --exhaustive, --random");
        if (!chop.empty() && prbs.empty()) usage("--chop applies to --prbs only");

        std::vector<std::uint64_t> a, b;
        std::size_t n = 0;
        auto from_serial = [&](const std::vector<std::uint8_t>& bits) {
            check(rql_harness_vectors(bits.data(), bits.size(), cycles, width, nullptr, nullptr, 0, &n));
            a.resize(n);
            b.resize(n);
            check(rql_harness_vectors(bits.data(), bits.size(), cycles, width, a.data(), b.data(), n, &n));
        };
        if (!vectors.empty()) {
            check(rql_load_vectors(vectors.c_str(), width, nullptr, nullptr, 0, &n));
            a.resize(n);
            b.resize(n);
            check(rql_load_vectors(vectors.c_str(), width, a.data(), b.data(), n, &n));
            r.result["source"] = {{"vectors", vectors}};
        } else if (!serial.empty()) {
            check(rql_load_serial(serial.c_str(), nullptr, 0, &n));
            std::vector<std::uint8_t> bits(n);
            check(rql_load_serial(serial.c_str(), bits.data(), n, &n));
            from_serial(bits);
            r.result["source"] = {{"serial", serial}, {"bits", bits.size()}};
        } else if (!prbs.empty()) {
            const std::uint16_t seed = parse_u16(prbs);
            std::vector<std::uint8_t> bits;
            if (!chop.empty()) {
                const auto [active, zero] = parse_pair(chop);
                check(rql_chopped_prbs(seed, active, zero, periods, nullptr, 0, &n));
                bits.resize(n);
                check(rql_chopped_prbs(seed, active, zero, periods, bits.data(), n, &n));
                r.result["source"] = {{"prbs_seed", seed}, {"chop", {active, zero}}, {"periods", periods}};
            } else {
                bits.resize(length);
                check(rql_prbs_bits(seed, length, bits.data()));
                r.result["source"] = {{"prbs_seed", seed}, {"length", length}};
            }
            from_serial(bits);
        } else if (exhaustive) {
            if (width > 10) usage("--exhaustive supports widths up to 10 bits");
            const std::uint64_t top = 1ULL << width;
            for (std::uint64_t x = 0; x < top; ++x) {
                for (std::uint64_t y = 0; y < top; ++y) {
                    a.push_back(x);
                    b.push_back(y);
                }
            }
            r.result["source"] = "exhaustive";
        } else {
            std::mt19937_64 rng(parse_u16(g.seed));
            const std::uint64_t mask = width >= 64 ? ~0ULL : (1ULL << width) - 1;
            a.resize(random);
            b.resize(random);
            for (std::size_t i = 0; i < random; ++i) {
                a[i] = rng() & mask;
                b[i] = rng() & mask;
            }
            r.result["source"] = {{"random", random}};
        }

        const double f = parse_frequency(clock);
        rql_clock ck;
        rql_clock_init(&ck);
        ck.frequency_hz = f;
        ck.bias_rel = bias;
        if (window_frac >= 0.0) ck.receiver_window_frac = window_frac;
        rql_trace* raw = nullptr;
        check(rql_simulate(nl.get(), a.data(), b.data(), a.size(), timed ? &ck : nullptr, &raw));
        TracePtr trace(raw);

        check(rql_trace_write_csv(trace.get(), out_path(g, trace_name).c_str()));
        char* js = nullptr;
        check(rql_trace_summary_json(trace.get(), do_check ? 1 : 0, &js));
        r.result["trace"] = take_json(js);
        r.result["trace_file"] = trace_name;
        double p_total = 0, p_i = 0, p_q = 0;
        check(rql_trace_power(trace.get(), nl.get(), f, &p_total, &p_i, &p_q));
        r.result["clock_hz"] = f;
        r.result["activity_power_w"] = {{"total", p_total}, {"I", p_i}, {"Q", p_q}};
        if (timed) r.result["bias_rel"] = bias;

        const auto& t = r.result["trace"];
        r.rows = {{"width", std::to_string(width)},
                  {"cycles", t["cycles"].dump()},
                  {"latency_cycles", t["latency_cycles"].dump()},
                  {"events", t["total_events"].dump()},
                  {"activity_power", si(p_total, "W") + " @ " + si(f, "Hz")},
                  {"trace", trace_name}};
        if (timed) r.rows.emplace_back("violations", t["violations"].dump());
        if (do_check) {
            const auto& c = t["check"];
            r.passed = c["passed"].get<bool>();
            r.rows.emplace_back("check", c["checked"].dump() + " vectors, " + c["failures"].dump() + " failures");
            r.rows.emplace_back("result", r.passed ? "PASS" : "FAIL");
        }
        return r;
    }
};

struct MarginsCmd {
    NetlistSource src;
    std::string fmin = "4GHz", fmax = "16GHz";
    int steps = 13;
    double ceiling = 0.0;
    std::optional<double> calibrate;
    std::string cal_freq = "10GHz";
    double window_frac = -1.0;
    double grid_min = 0.01, grid_max = 2.0;
    int grid_points = 200;
    bool do_check = false;
    std::string csv_name = "margins.csv";

    void setup(CLI::App* sub) {
        src.add_to(sub);
        sub->add_option("--fmin", fmin, "Lowest frequency")->capture_default_str();
        sub->add_option("--fmax", fmax, "Highest frequency")->capture_default_str();
        sub->add_option("--steps", steps, "Frequency points")->capture_default_str();
        sub->add_option("--ceiling", ceiling, "Over-bias ceiling (relative clock amplitude)");
        sub->add_option("--calibrate", calibrate, "Set the ceiling so the margin at --cal-freq is this many dB");
        sub->add_option("--cal-freq", cal_freq, "Calibration frequency")->capture_default_str();
        sub->add_option("--window-frac", window_frac, "Extra receiver window as a fraction of T");
        sub->add_option("--grid-min", grid_min, "Lowest bias on the search grid")->capture_default_str();
        sub->add_option("--grid-max", grid_max, "Highest bias on the search grid")->capture_default_str();
        sub->add_option("--grid-points", grid_points, "Bias grid points")->capture_default_str();
        sub->add_flag("--check", do_check, "Require a flat upper limit and a non-increasing width");
        sub->add_option("--csv", csv_name, "Margin CSV name inside --out")->capture_default_str();
    }

    Report run(const Globals& g) const {
        Report r;
        auto nl = src.get(g, r.result);
        rql_margin_options opt;
        rql_margin_options_init(&opt);
        if (window_frac >= 0.0) opt.receiver_window_frac = window_frac;
        if (ceiling > 0.0) opt.bias_ceiling = ceiling;
        if (calibrate) {
            const double fc = parse_frequency(cal_freq);
            check(rql_calibrate_bias_ceiling(nl.get(), fc, *calibrate, &opt, &opt.bias_ceiling));
            r.result["calibration"] = {{"frequency_hz", fc}, {"width_db", *calibrate}};
        }
        const auto freqs = linspace(parse_frequency(fmin), parse_frequency(fmax), steps);
        const auto grid = linspace(grid_min, grid_max, grid_points);
        std::vector<rql_margin_point> pts(freqs.size());
        check(rql_margin_sweep(nl.get(), freqs.data(), freqs.size(), grid.data(), grid.size(), &opt, pts.data()));

        std::ostringstream csv;
        csv << "frequency_hz,lower_db,upper_db,width_db\n";
        json arr = json::array();
        bool flat = true, non_increasing = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            csv << num(p.frequency_hz) << ',';
            if (p.operable) csv << num(p.lower_db) << ',' << num(p.upper_db) << ',' << num(p.width_db);
            else csv << ",,";
            csv << '\n';
            arr.push_back({{"frequency_hz", p.frequency_hz},
                           {"operable", p.operable != 0},
                           {"bias_min", p.bias_min},
                           {"bias_max", p.bias_max},
                           {"lower_db", p.lower_db},
                           {"upper_db", p.upper_db},
                           {"width_db", p.width_db}});
            if (i > 0) {
                flat = flat && p.upper_db == pts[0].upper_db;
                non_increasing = non_increasing && p.width_db <= pts[i - 1].width_db + 1e-9;
            }
            r.rows.emplace_back(si(p.frequency_hz, "Hz"),
                                p.operable ? sig(p.lower_db) + " .. " + sig(p.upper_db) + " dB (width " +
                                                 sig(p.width_db) + " dB)"
                                           : "not operable");
        }
        write_text(out_path(g, csv_name), csv.str());
        r.csv = csv.str();
        r.result["bias_ceiling"] = opt.bias_ceiling;
        r.result["receiver_window_frac"] = opt.receiver_window_frac;
        r.result["points"] = arr;
        r.result["csv_file"] = csv_name;
        r.result["checks"] = {{"upper_flat", flat}, {"width_non_increasing", non_increasing}};
        if (do_check) r.passed = flat && non_increasing;
        r.rows.insert(r.rows.begin(), {"bias_ceiling", sig(opt.bias_ceiling, 8)});
        return r;
    }
};

struct PowerCmd {
    NetlistSource src;
    std::optional<double> n_jj, ic;
    std::string freq = "10GHz";
    bool budget = false;
    std::string scenario;
    std::size_t activity_cycles = 0;
    std::optional<int> feed_lines;
    double line_amplitude = 2e-3, z_line = 32.0, z_feed = 50.0;

    void setup(CLI::App* sub) {
        src.add_to(sub);
        sub->add_option("--n", n_jj, "Junction count (with --ic, skips the netlist)");
        sub->add_option("--ic", ic, "Average critical current, A");
        sub->add_option("--f", freq, "Clock frequency")->capture_default_str();
        sub->add_flag("--budget", budget, "Clock budget of the scaling scenario");
        sub->add_option("--scenario", scenario, "Scaling scenario file (implies --budget)");
        sub->add_option("--activity", activity_cycles, "Also run this many PRBS harness cycles (seeded by --seed)");
        sub->add_option("--feed-lines", feed_lines, "Clock lines recombined onto one feed");
        sub->add_option("--line-amplitude", line_amplitude, "Peak current per line, A")->capture_default_str();
        sub->add_option("--z-line", z_line, "Line impedance, ohm")->capture_default_str();
        sub->add_option("--z-feed", z_feed, "Feed impedance, ohm")->capture_default_str();
    }

    Report run(const Globals& g) const {
        Report r;
        const double f = parse_frequency(freq);
        double n = 0.0, ic_a = 0.0;
        NetlistPtr nl;
        if (n_jj.has_value() != ic.has_value()) usage("--n and --ic go together");
        if (n_jj) {
            n = *n_jj;
            ic_a = *ic;
        } else {
            nl = src.get(g, r.result);
            rql_netlist_info info;
            check(rql_netlist_info_get(nl.get(), &info));
            n = info.jj_total;
            ic_a = info.ic_avg_ua * 1e-6;
        }
        double p = 0.0;
        check(rql_dynamic_power(ic_a, n, f, &p));
        double p_dbm = 0.0;
        check(rql_watts_to_dbm(p, &p_dbm));
        double rsfq = 0.0;
        check(rql_rsfq_static_equivalent(200e-6, 2.6e-3, &rsfq));
        r.result["junctions"] = n;
        r.result["ic_avg_a"] = ic_a;
        r.result["frequency_hz"] = f;
        r.result["p_dynamic_w"] = p;
        r.result["p_dynamic_dbm"] = p_dbm;
        r.result["rsfq_static_per_bias_w"] = rsfq;
        r.rows = {{"junctions", sig(n, 8)},
                  {"ic_avg", si(ic_a, "A")},
                  {"frequency", si(f, "Hz")},
                  {"p_dynamic", si(p, "W") + " (" + sig(p_dbm) + " dBm)"},
                  {"rsfq_static_per_bias", si(rsfq, "W")}};

        if (activity_cycles > 0) {
            if (!nl) usage("--activity needs a netlist");
            rql_netlist_info info;
            check(rql_netlist_info_get(nl.get(), &info));
            const std::uint16_t seed = parse_u16(g.seed);
            std::vector<std::uint8_t> bits(activity_cycles);
            check(rql_prbs_bits(seed, bits.size(), bits.data()));
            std::size_t nv = 0;
            check(rql_harness_vectors(bits.data(), bits.size(), 0, info.width, nullptr, nullptr, 0, &nv));
            std::vector<std::uint64_t> a(nv), b(nv);
            check(rql_harness_vectors(bits.data(), bits.size(), 0, info.width, a.data(), b.data(), nv, &nv));
            rql_trace* raw = nullptr;
            check(rql_simulate(nl.get(), a.data(), b.data(), nv, nullptr, &raw));
            TracePtr trace(raw);
            double total = 0, pi = 0, pq = 0;
            check(rql_trace_power(trace.get(), nl.get(), f, &total, &pi, &pq));
            r.result["activity"] = {{"cycles", nv}, {"prbs_seed", seed}, {"total_w", total}, {"I_w", pi}, {"Q_w", pq}};
            r.rows.emplace_back("activity_power", si(total, "W") + " (I " + si(pi, "W") + ", Q " + si(pq, "W") + ")");
        }

        if (budget || !scenario.empty()) {
            rql_scenario sc;
            rql_scenario_init(&sc);
            if (!scenario.empty()) check(rql_scenario_load(scenario.c_str(), &sc));
            rql_clock_budget cb;
            check(rql_clock_budget_compute(&sc, &cb));
            r.result["budget"] = {{"scenario",
                                   {{"n_devices", sc.n_devices},
                                    {"ic_avg_a", sc.ic_avg_a},
                                    {"frequency_hz", sc.frequency_hz},
                                    {"margin_frac", sc.margin_frac},
                                    {"line_impedance_ohm", sc.line_impedance_ohm},
                                    {"phase_chain_junctions", sc.phase_chain_junctions},
                                    {"d0_ps", sc.d0_ps}}},
                                  {"p_dissipated_w", cb.p_dissipated_w},
                                  {"p_applied_w", cb.p_applied_w},
                                  {"line_current_rms_a", cb.line_current_rms_a},
                                  {"timing_variation_ps", cb.timing_variation_ps}};
            r.rows.emplace_back("budget_dissipated", si(cb.p_dissipated_w, "W"));
            r.rows.emplace_back("budget_applied", si(cb.p_applied_w, "W"));
            r.rows.emplace_back("budget_line_current", si(cb.line_current_rms_a, "A") + " rms");
            r.rows.emplace_back("budget_timing_spread", sig(cb.timing_variation_ps) + " ps");
        }

        if (feed_lines) {
            double i_feed = 0.0;
            check(rql_clock_feed_current(*feed_lines, line_amplitude, z_line, z_feed, &i_feed));
            r.result["feed"] = {{"lines", *feed_lines},
                                {"line_amplitude_a", line_amplitude},
                                {"z_line_ohm", z_line},
                                {"z_feed_ohm", z_feed},
                                {"current_rms_a", i_feed}};
            r.rows.emplace_back("feed_current", si(i_feed, "A") + " rms");
        }
        return r;
    }
};

struct SidebandsCmd {
    std::optional<double> q, i, p0q, p0i, cla_frac;
    double fraction = 0.5;
    std::vector<std::string> regions;
    std::string measurement;
    std::string fclock, chop;
    std::string spectrum, fmod = "259kHz", tol = "1kHz", line = "Q";
    std::optional<double> ratio, dt_ps;
    std::string fc = "6GHz";

    void setup(CLI::App* sub) {
        sub->add_option("--q", q, "Q-line SSB ratio, dB");
        sub->add_option("--i", i, "I-line SSB ratio, dB");
        sub->add_option("--p0q", p0q, "Q-line carrier at the chip, dBm");
        sub->add_option("--p0i", p0i, "I-line carrier at the chip, dBm");
        sub->add_option("--fraction", fraction, "Share of sideband power that is AM")->capture_default_str();
        sub->add_option("--cla-frac", cla_frac, "Critical-current share of the CLA region");
        sub->add_option("--region", regions, "Extra region share, name=fraction");
        sub->add_option("--measurement", measurement, "Measurement descriptor file");
        sub->add_option("--fclock", fclock, "Clock frequency for the chop fundamental");
        sub->add_option("--chop", chop, "Chop block lengths active:zero");
        sub->add_option("--spectrum", spectrum, "Analyser CSV; its SSB replaces the --line ratio");
        sub->add_option("--fmod", fmod, "Modulation frequency in the spectrum")->capture_default_str();
        sub->add_option("--tol", tol, "Frequency tolerance when locating sidebands")->capture_default_str();
        sub->add_option("--line", line, "Line the spectrum belongs to")->capture_default_str();
        sub->add_option("--ratio", ratio, "Low/high power ratio for the AM depth");
        sub->add_option("--dt-ps", dt_ps, "Delay swing for the PM depth, ps");
        sub->add_option("--fc", fc, "Carrier for the PM depth")->capture_default_str();
    }

    Report run(const Globals&) const {
        Report r;
        std::optional<double> spectrum_ssb;
        if (!spectrum.empty()) {
            double carrier_hz = 0, carrier_dbm = 0, ssb = 0;
            check(rql_spectrum_ssb(spectrum.c_str(), parse_frequency(fmod), parse_frequency(tol), &carrier_hz,
                                   &carrier_dbm, &ssb));
            spectrum_ssb = ssb;
            r.result["spectrum"] = {{"file", spectrum},
                                    {"line", line},
                                    {"carrier_hz", carrier_hz},
                                    {"carrier_dbm", carrier_dbm},
                                    {"ssb_db", ssb}};
        }

        char* js = nullptr;
        if (!measurement.empty()) {
            if (q || i || spectrum_ssb) usage("--measurement replaces --q/--i/--spectrum");
            check(rql_sideband_chain_file(measurement.c_str(), &js));
            r.result["measurement"] = measurement;
        } else {
            std::vector<std::string> names;
            std::vector<rql_line_observation> obs;
            auto add = [&](const std::string& name, std::optional<double> ssb, std::optional<double> p0) {
                if (spectrum_ssb && name == line) ssb = spectrum_ssb;
                if (!ssb) return;
                if (!p0) usage("line " + name + " needs its carrier power (--p0" + std::string(1, std::tolower(name[0])) + ")");
                obs.push_back({nullptr, *p0, *ssb});
                names.push_back(name);
            };
            add("Q", q, p0q);
            add("I", i, p0i);
            if (obs.empty()) usage("sidebands needs --q/--i, --spectrum or --measurement");
            for (std::size_t k = 0; k < obs.size(); ++k) obs[k].line = names[k].c_str();

            std::vector<std::string> region_names;
            std::vector<double> fracs;
            if (cla_frac) {
                region_names.push_back("cla");
                fracs.push_back(*cla_frac);
            }
            for (const auto& s : regions) {
                const auto eq = s.find('=');
                const auto v = eq == std::string::npos ? std::nullopt : parse_number(s.substr(eq + 1));
                if (!v) usage("--region expects name=fraction, got '" + s + "'");
                region_names.push_back(s.substr(0, eq));
                fracs.push_back(*v);
            }
            std::vector<rql_region_share> shares;
            for (std::size_t k = 0; k < fracs.size(); ++k) shares.push_back({region_names[k].c_str(), fracs[k]});

            double active = 0, zero = 0, fck = 0;
            if (!chop.empty()) {
                if (fclock.empty()) usage("--chop needs --fclock");
                const auto [a, z] = parse_pair(chop);
                active = static_cast<double>(a);
                zero = static_cast<double>(z);
            }
            if (!fclock.empty()) fck = parse_frequency(fclock);
            check(rql_sideband_chain(obs.data(), obs.size(), shares.data(), shares.size(), fraction, fck, active,
                                     zero, &js));
        }
        r.result["chain"] = take_json(js);
        const auto& c = r.result["chain"];
        for (const auto& l : c["lines"]) {
            const std::string name = l["line"].get<std::string>();
            r.rows.emplace_back("line " + name,
                                "P0 " + sig(l["p0_dbm"].get<double>()) + " dBm, SSB " + sig(l["ssb_db"].get<double>()) +
                                    " dB -> dP/P0 " + sig(l["ratio_db"].get<double>()) + " dB (printed form " +
                                    sig(l["ratio_db_rounded"].get<double>()) + " dB) -> " +
                                    si(l["dissipated_w"].get<double>(), "W"));
        }
        r.rows.emplace_back("total", si(c["total_w"].get<double>(), "W"));
        for (const auto& [region, w] : c["regions_w"].items()) {
            r.rows.emplace_back("region " + region, si(w.get<double>(), "W"));
        }
        if (!c["chop_fundamental_hz"].is_null()) {
            r.rows.emplace_back("chop_fundamental", si(c["chop_fundamental_hz"].get<double>(), "Hz"));
        }
        if (ratio) {
            double ma = 0;
            check(rql_extract_ma(*ratio, &ma));
            r.result["m_a"] = ma;
            r.rows.emplace_back("m_a", sig(ma, 3));
        }
        if (dt_ps) {
            double mp = 0;
            check(rql_extract_mp(*dt_ps * 1e-12, parse_frequency(fc), &mp));
            r.result["m_p"] = mp;
            r.rows.emplace_back("m_p", sig(mp, 3));
        }
        return r;
    }
};

struct ClocknetCmd {
    int sections = 6;
    double zs = 50.0, zl = 4.0, ripple = -30.0;
    std::string f0 = "7.5GHz", band, sweep = "1:20GHz";
    bool binomial = false;
    int points = 191;
    double rl_min = 30.0;
    std::optional<double> require_rl;

    void setup(CLI::App* sub) {
        sub->add_option("--sections", sections, "Quarter-wave sections")->capture_default_str();
        sub->add_option("--zs", zs, "Source impedance, ohm")->capture_default_str();
        sub->add_option("--zl", zl, "Load impedance, ohm")->capture_default_str();
        sub->add_option("--f0", f0, "Centre frequency")->capture_default_str();
        sub->add_option("--ripple", ripple, "Equal-ripple reflection level, dB")->capture_default_str();
        sub->add_option("--band", band, "Band lo:hi the design must hold at --ripple");
        sub->add_flag("--binomial", binomial, "Maximally flat instead of equal ripple");
        sub->add_option("--sweep", sweep, "Evaluation range lo:hi")->capture_default_str();
        sub->add_option("--points", points, "Sweep points")->capture_default_str();
        sub->add_option("--rl-min", rl_min, "Return loss defining the matched band, dB")->capture_default_str();
        sub->add_option("--require-rl", require_rl, "Fail unless the exact return loss over --band reaches this");
    }

    Report run(const Globals& g) const {
        Report r;
        rql_transformer_spec spec;
        rql_transformer_spec_init(&spec);
        spec.z_source_ohm = zs;
        spec.z_load_ohm = zl;
        spec.n_sections = sections;
        spec.f_center_hz = parse_frequency(f0);
        spec.ripple_db = ripple;
        spec.binomial = binomial ? 1 : 0;
        std::optional<std::pair<double, double>> band_hz;
        if (!band.empty()) {
            band_hz = parse_frequency_range(band);
            spec.band_lo_hz = band_hz->first;
            spec.band_hi_hz = band_hz->second;
        }
        if (require_rl && !band_hz) usage("--require-rl needs --band");

        rql_transformer* raw = nullptr;
        double achievable = 0.0;
        const rql_status s = rql_transformer_design(&spec, &raw, &achievable);
        if (s == RQL_ERR_DESIGN) {
            r.passed = false;
            r.result["error"] = rql_last_error();
            r.result["achievable_ripple_db"] = achievable;
            r.rows = {{"design", "infeasible"}, {"achievable_ripple", sig(achievable) + " dB"}};
            return r;
        }
        check(s);
        TransformerPtr design(raw);

        const auto [lo, hi] = parse_frequency_range(sweep);
        const auto freqs = linspace(lo, hi, points);
        check(rql_transformer_write_csv(design.get(), out_path(g, "transformer.csv").c_str()));
        check(rql_transformer_write_sparams(design.get(), freqs.data(), freqs.size(), out_path(g, "sparams.csv").c_str()));
        char* js = nullptr;
        check(rql_transformer_report_json(design.get(), freqs.data(), freqs.size(), rl_min, &js));
        r.result["design"] = take_json(js);
        r.result["files"] = {"transformer.csv", "sparams.csv"};

        std::vector<rql_sparam> sp(freqs.size());
        check(rql_transformer_sweep(design.get(), freqs.data(), freqs.size(), sp.data()));
        std::ostringstream csv;
        csv << "frequency_hz,return_loss_db,s21_db\n";
        for (const auto& p : sp) {
            const double s21 = 10.0 * std::log10(p.s21_re * p.s21_re + p.s21_im * p.s21_im);
            csv << num(p.frequency_hz) << ',' << num(p.return_loss_db) << ',' << num(s21) << '\n';
        }
        r.csv = csv.str();

        const auto& d = r.result["design"];
        std::size_t k = 0;
        for (const auto& z : d["section_impedances_ohm"]) {
            r.rows.emplace_back("Z" + std::to_string(++k), sig(z.get<double>()) + " ohm");
        }
        if (d.contains("design_band_hz")) {
            r.rows.emplace_back("design_band", si(d["design_band_hz"][0].get<double>(), "Hz") + " .. " +
                                                   si(d["design_band_hz"][1].get<double>(), "Hz") + " at " +
                                                   sig(ripple) + " dB");
        }
        const auto& sw = d["sweep"];
        r.rows.emplace_back("worst_return_loss", sig(sw["worst_return_loss_db"].get<double>()) + " dB over sweep");
        r.rows.emplace_back("matched_band", sw["matched_band_hz"].is_null()
                                                ? "none"
                                                : si(sw["matched_band_hz"][0].get<double>(), "Hz") + " .. " +
                                                      si(sw["matched_band_hz"][1].get<double>(), "Hz") +
                                                      " at RL >= " + sig(rl_min) + " dB (exact)");
        if (band_hz) {
            const auto in_band = linspace(band_hz->first, band_hz->second, 201);
            std::vector<rql_sparam> bp(in_band.size());
            check(rql_transformer_sweep(design.get(), in_band.data(), in_band.size(), bp.data()));
            double worst = INFINITY;
            for (const auto& p : bp) worst = std::min(worst, p.return_loss_db);
            r.result["band"] = {{"lo_hz", band_hz->first}, {"hi_hz", band_hz->second}, {"worst_return_loss_db", worst}};
            r.rows.emplace_back("band_return_loss", sig(worst) + " dB worst over " + band);
            if (require_rl) {
                r.passed = worst >= *require_rl;
                r.result["band"]["required_db"] = *require_rl;
                r.rows.emplace_back("result", r.passed ? "PASS" : "FAIL");
            }
        }
        return r;
    }
};

// ---- output ----

std::string render_table(const Report& r) {
    std::size_t w = 0;
    for (const auto& row : r.rows) w = std::max(w, row.first.size());
    std::ostringstream os;
    for (const auto& [k, v] : r.rows) os << k << std::string(w - k.size() + 2, ' ') << v << '\n';
    return os.str();
}

std::string render_csv(const Report& r) {
    if (!r.csv.empty()) return r.csv;
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& [k, v] : r.rows) {
        const bool quote = v.find(',') != std::string::npos;
        os << k << ',' << (quote ? "\"" + v + "\"" : v) << '\n';
    }
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kogge-Stone adder toolkit for reciprocal quantum logic", "rqlsim"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.set_version_flag("--version", rql_version());

    Globals g;
    app.add_option("--config", g.config, "Gate table file");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Seed for pseudo-random inputs")->capture_default_str();
    app.add_option("--format", g.format, "stdout format")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();

    GenCmd gen;
    ValidateCmd validate;
    SimCmd sim;
    MarginsCmd margins;
    PowerCmd power;
    SidebandsCmd sidebands;
    ClocknetCmd clocknet;
    std::map<std::string, std::function<Report()>> commands;
    auto add = [&](auto& cmd, const char* name, const char* help) {
        cmd.setup(app.add_subcommand(name, help));
        commands[name] = [&cmd, &g] { return cmd.run(g); };
    };
    add(gen, "gen", "Generate an adder netlist and report its latency");
    add(validate, "validate", "Check a netlist's structure");
    add(sim, "sim", "Simulate a netlist");
    add(margins, "margins", "Clock-power operating margins over frequency");
    add(power, "power", "Dynamic power and clock budget");
    add(sidebands, "sidebands", "Dissipated power from clock sidebands");
    add(clocknet, "clocknet", "Clock feed impedance transformer");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        std::error_code ec;
        fs::create_directories(g.out, ec);
        if (ec) throw CliError(kIoError, "cannot create output directory '" + g.out + "': " + ec.message());

        const Report r = commands.at(name)();

        json args = json::array();
        for (int k = 1; k < argc; ++k) args.push_back(argv[k]);
        json doc;
        doc["manifest"] = {{"tool", "rqlsim"},
                           {"version", rql_version()},
                           {"subcommand", name},
                           {"args", args},
                           {"seed", parse_u16(g.seed)},
                           {"config", g.config.empty() ? json(nullptr) : json(g.config)},
                           {"out", g.out}};
        doc["passed"] = r.passed;
        doc["result"] = r.result;
        const std::string text = doc.dump(2) + "\n";
        write_text(out_path(g, name + ".json"), text);

        if (g.format == "json") std::cout << text;
        else if (g.format == "csv") std::cout << render_csv(r);
        else std::cout << render_table(r);
        return r.passed ? kOk : kCheckFailed;
    } catch (const CliError& e) {
        std::cerr << "rqlsim " << name << ": " << e.what() << '\n';
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "rqlsim " << name << ": " << e.what() << '\n';
        return kUsage;
    }
}
