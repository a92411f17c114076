#include "rql/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "rql/error.hpp"

namespace rql {

using nlohmann::json;

namespace {

std::string num(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string hex(std::uint64_t v) {
    char buf[24];
    const auto r = std::to_chars(buf, buf + sizeof buf, v, 16);
    return "0x" + std::string(buf, r.ptr);
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view s) {
    const auto p = s.find('#');
    return p == std::string_view::npos ? s : s.substr(0, p);
}

std::optional<double> parse_double(std::string_view s) {
    s = trim(s);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

std::uint64_t parse_hex_word(std::string_view s, std::size_t line, int width) {
    s = trim(s);
    if (s.starts_with("0x") || s.starts_with("0X")) s.remove_prefix(2);
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (s.empty() || r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
        throw ConfigError("vectors line " + std::to_string(line) + ": bad hex word '" + std::string(s) + "'");
    }
    if (width < 64 && (v >> width) != 0) {
        throw ParameterError("vectors line " + std::to_string(line) + ": word wider than " +
                             std::to_string(width) + " bits");
    }
    return v;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

std::uint64_t width_mask(int width) { return width >= 64 ? ~0ULL : (1ULL << width) - 1; }

}  // namespace

std::vector<AdderVector> parse_vectors(std::istream& in, int width) {
    if (width < 1 || width > 64) throw ParameterError("vector width must be 1..64");
    std::vector<AdderVector> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto s = trim(strip_comment(raw));
        if (s.empty()) continue;
        const auto comma = s.find(',');
        if (comma == std::string_view::npos || s.find(',', comma + 1) != std::string_view::npos) {
            throw ConfigError("vectors line " + std::to_string(line) + ": expected 'A,B'");
        }
        out.push_back({parse_hex_word(s.substr(0, comma), line, width),
                       parse_hex_word(s.substr(comma + 1), line, width)});
    }
    return out;
}

std::vector<AdderVector> load_vectors(const std::string& path, int width) {
    auto in = open_in(path);
    return parse_vectors(in, width);
}

void write_vectors(std::ostream& out, std::span<const AdderVector> vectors, int width) {
    const std::uint64_t mask = width_mask(width);
    for (const auto& v : vectors) out << hex(v.a & mask) << ',' << hex(v.b & mask) << '\n';
}

std::vector<std::uint8_t> parse_serial(std::istream& in) {
    std::vector<std::uint8_t> bits;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        for (char c : strip_comment(raw)) {
            if (c == '0' || c == '1') bits.push_back(static_cast<std::uint8_t>(c - '0'));
            else if (c != ' ' && c != '\t' && c != '\r' && c != '_') {
                throw ConfigError("serial line " + std::to_string(line) + ": unexpected '" + std::string(1, c) + "'");
            }
        }
    }
    if (bits.empty()) throw ConfigError("serial program is empty");
    return bits;
}

std::vector<std::uint8_t> load_serial(const std::string& path) {
    auto in = open_in(path);
    return parse_serial(in);
}

std::vector<SpectrumPoint> parse_spectrum_csv(std::istream& in) {
    std::vector<SpectrumPoint> out;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto s = trim(strip_comment(raw));
        if (s.empty()) continue;
        const auto comma = s.find(',');
        const auto f = comma == std::string_view::npos ? std::nullopt : parse_double(s.substr(0, comma));
        const auto p = comma == std::string_view::npos ? std::nullopt : parse_double(s.substr(comma + 1));
        if (!f || !p) {
            if (out.empty() && line == 1) continue;  // header
            throw ConfigError("spectrum line " + std::to_string(line) + ": expected 'frequency_hz,power_dbm'");
        }
        out.push_back({*f, *p});
    }
    if (out.empty()) throw ConfigError("spectrum file has no data");
    return out;
}

std::vector<SpectrumPoint> load_spectrum_csv(const std::string& path) {
    auto in = open_in(path);
    return parse_spectrum_csv(in);
}

void write_spectrum_csv(std::ostream& out, std::span<const SpectrumPoint> spectrum) {
    out << "frequency_hz,power_dbm\n";
    for (const auto& p : spectrum) out << num(p.frequency_hz) << ',' << num(p.power_dbm) << '\n';
}

AdditionCheck check_addition(const SimTrace& trace) {
    AdditionCheck c;
    const std::uint64_t mask = width_mask(trace.width);
    for (std::size_t i = 0; i < trace.cycles(); ++i) {
        const auto& v = trace.inputs[i];
        const std::uint64_t a = v.a & mask, b = v.b & mask;
        const std::uint64_t sum = (a + b) & mask;
        bool ok = trace.sums[i] == sum;
        if (trace.has_carry_out) {
            const bool carry = trace.width >= 64 ? (a + b) < a : ((a + b) >> trace.width) & 1U;
            ok = ok && (trace.carry_outs[i] != 0) == carry;
        }
        ++c.checked;
        if (!ok) {
            ++c.failures;
            if (!c.first_failure) c.first_failure = i;
        }
    }
    return c;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    out << "cycle,a,b,sum,cout,events\n";
    for (std::size_t i = 0; i < trace.cycles(); ++i) {
        out << i << ',' << hex(trace.inputs[i].a) << ',' << hex(trace.inputs[i].b) << ','
            << hex(trace.sums[i]) << ',';
        if (trace.has_carry_out) out << int(trace.carry_outs[i]);
        out << ',' << trace.cycle_events[i] << '\n';
    }
}

json trace_summary(const SimTrace& trace, const std::optional<AdditionCheck>& check) {
    json j;
    j["width"] = trace.width;
    j["carry_out"] = trace.has_carry_out;
    j["cycles"] = trace.cycles();
    j["latency_cycles"] = trace.latency_cycles;
    j["total_events"] = trace.total_events();
    j["timed"] = trace.arrival_ps.has_value();
    j["violations"] = trace.violations.size();
    if (check) {
        j["check"] = {{"checked", check->checked},
                      {"failures", check->failures},
                      {"passed", check->passed()}};
        if (check->first_failure) j["check"]["first_failure_cycle"] = *check->first_failure;
    }
    return j;
}

json to_json(const NetlistStats& s) {
    json j;
    j["gates"] = s.gate_count;
    j["jj_total"] = s.jj_total;
    j["ic_total_ua"] = s.ic_total_ua;
    j["ic_avg_ua"] = s.ic_avg_ua ? json(*s.ic_avg_ua) : json(nullptr);
    j["line_ic_ua"] = {{"I", s.line_ic_ua[0]}, {"Q", s.line_ic_ua[1]}};
    j["region_ic_ua"] = s.region_ic_ua;
    j["region_fraction"] = s.region_fraction;
    json kinds = json::object();
    for (const auto& [k, n] : s.kind_counts) kinds[std::string(to_string(k))] = n;
    j["kind_counts"] = kinds;
    j["max_fanout"] = s.max_fanout;
    return j;
}

json to_json(const Latency& l) {
    return {{"phases", l.phases}, {"cycles", l.cycles}, {"picoseconds", l.picoseconds}};
}

json to_json(const std::vector<Diagnostic>& diagnostics) {
    json arr = json::array();
    for (const auto& d : diagnostics) {
        arr.push_back({{"kind", std::string(to_string(d.kind))}, {"gate", d.gate}, {"message", d.message}});
    }
    return arr;
}

json to_json(const MarginCurve& curve) {
    json arr = json::array();
    for (const auto& p : curve.points) {
        arr.push_back({{"frequency_hz", p.frequency_hz},
                       {"operable", p.operable},
                       {"bias_min", p.bias_min},
                       {"bias_max", p.bias_max},
                       {"lower_db", p.lower_db},
                       {"upper_db", p.upper_db},
                       {"width_db", p.width_db}});
    }
    return arr;
}

void write_margin_csv(std::ostream& out, const MarginCurve& curve) {
    out << "frequency_hz,lower_db,upper_db,width_db\n";
    for (const auto& p : curve.points) {
        out << num(p.frequency_hz) << ',';
        if (p.operable) out << num(p.lower_db) << ',' << num(p.upper_db) << ',' << num(p.width_db);
        else out << ",,";
        out << '\n';
    }
}

json to_json(const PowerReport& r) {
    json j;
    j["p_dynamic_w"] = r.p_dynamic_w;
    j["p_dynamic_dbm"] = r.p_dynamic_w > 0.0 ? json(watts_to_dbm(r.p_dynamic_w)) : json(nullptr);
    j["per_line_w"] = r.per_line_w;
    j["per_region_w"] = r.per_region_w;
    j["region_fraction"] = r.region_fraction;
    j["ic_avg_a"] = r.ic_avg_a;
    j["junctions"] = r.junctions;
    j["frequency_hz"] = r.frequency_hz;
    return j;
}

json to_json(const ClockBudget& b) {
    return {{"p_dissipated_w", b.p_dissipated_w},
            {"p_applied_w", b.p_applied_w},
            {"line_current_rms_a", b.line_current_rms_a},
            {"timing_variation_ps", b.timing_variation_ps}};
}

void write_power_table(std::ostream& out, const PowerReport& r) {
    auto row = [&](const std::string& k, double w) {
        out << "  " << k << std::string(k.size() < 20 ? 20 - k.size() : 1, ' ') << num(w) << " W";
        if (w > 0.0) out << "  (" << num(std::round(watts_to_dbm(w) * 100.0) / 100.0) << " dBm)";
        out << '\n';
    };
    out << "power\n";
    row("dynamic", r.p_dynamic_w);
    for (const auto& [k, w] : r.per_line_w) row("line " + k, w);
    for (const auto& [k, w] : r.per_region_w) row("region " + k, w);
}

SidebandChain sideband_chain(const MeasurementDescriptor& m) {
    SidebandChain c;
    c.am_fraction = m.am_fraction;
    std::map<std::string, double> per_line;
    for (const auto& obs : m.lines) {
        SidebandMeasurement sm;
        sm.p0_dbm = obs.p0_dbm;
        sm.ssb_db = obs.ssb_db;
        sm.f_carrier_hz = m.f_clock_hz;
        sm.f_mod_hz = 0.0;
        LineDissipation d;
        d.line = obs.line;
        d.p0_dbm = obs.p0_dbm;
        d.ssb_db = obs.ssb_db;
        d.estimate = am_pm_corrected_power(sm, m.am_fraction);
        d.upper_bound = ssb_power_upper_bound(sm);
        d.ratio_db_rounded = corrected_ratio_db_rounded(obs.ssb_db);
        if (!per_line.emplace(obs.line, d.estimate.watts).second) {
            throw ConfigError("clock line '" + obs.line + "' listed twice");
        }
        c.total_w += d.estimate.watts;
        c.lines.push_back(d);
    }
    c.attribution = attribute_power(per_line, m.regions);
    if (m.chop) {
        if (!(m.f_clock_hz > 0.0)) throw ConfigError("chop lengths need f_clock");
        c.chop_fundamental_hz = chop_fundamental(m.f_clock_hz, m.chop->first, m.chop->second);
    }
    return c;
}

json to_json(const SidebandChain& c) {
    json j;
    j["am_fraction"] = c.am_fraction;
    json lines = json::array();
    for (const auto& d : c.lines) {
        lines.push_back({{"line", d.line},
                         {"p0_dbm", d.p0_dbm},
                         {"ssb_db", d.ssb_db},
                         {"ratio", d.estimate.ratio},
                         {"ratio_db", d.estimate.ratio_db()},
                         {"ratio_db_rounded", d.ratio_db_rounded},
                         {"dissipated_w", d.estimate.watts},
                         {"upper_bound_w", d.upper_bound.watts}});
    }
    j["lines"] = lines;
    j["total_w"] = c.total_w;
    j["regions_w"] = c.attribution.per_region_w;
    j["region_fraction"] = c.attribution.region_fraction;
    j["chop_fundamental_hz"] = c.chop_fundamental_hz ? json(*c.chop_fundamental_hz) : json(nullptr);
    return j;
}

void write_transformer_csv(std::ostream& out, const TransformerDesign& d) {
    out << "section,impedance_ohm\n";
    for (std::size_t k = 0; k < d.section_impedances_ohm.size(); ++k) {
        out << k + 1 << ',' << num(d.section_impedances_ohm[k]) << '\n';
    }
}

void write_sparam_csv(std::ostream& out, std::span<const SParamPoint> sweep) {
    out << "frequency_hz,s11_re,s11_im,s21_re,s21_im,s12_re,s12_im,s22_re,s22_im\n";
    for (const auto& p : sweep) {
        out << num(p.frequency_hz);
        for (const auto& s : {p.s11, p.s21, p.s21, p.s22}) out << ',' << num(s.real()) << ',' << num(s.imag());
        out << '\n';
    }
}

json to_json(const TransformerDesign& d) {
    json j;
    j["z_source_ohm"] = d.z_source_ohm;
    j["z_load_ohm"] = d.z_load_ohm;
    j["sections"] = d.n_sections;
    j["f_center_hz"] = d.f_center_hz;
    j["synthesis"] = d.synthesis == Synthesis::Binomial ? "binomial" : "chebyshev";
    j["section_impedances_ohm"] = d.section_impedances_ohm;
    j["reflections"] = d.reflections;
    if (d.synthesis == Synthesis::Chebyshev) {
        j["fractional_bandwidth"] = d.fractional_bandwidth;
        j["design_band_hz"] = {d.f_center_hz * (1.0 - 0.5 * d.fractional_bandwidth),
                               d.f_center_hz * (1.0 + 0.5 * d.fractional_bandwidth)};
    }
    return j;
}

std::optional<std::pair<double, double>> matched_band(std::span<const SParamPoint> sweep,
                                                      double f_center_hz, double rl_min_db) {
    if (sweep.empty()) return std::nullopt;
    std::size_t mid = 0;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        if (std::abs(sweep[i].frequency_hz - f_center_hz) < std::abs(sweep[mid].frequency_hz - f_center_hz)) mid = i;
    }
    if (sweep[mid].return_loss_db() < rl_min_db) return std::nullopt;
    std::size_t lo = mid, hi = mid;
    while (lo > 0 && sweep[lo - 1].return_loss_db() >= rl_min_db) --lo;
    while (hi + 1 < sweep.size() && sweep[hi + 1].return_loss_db() >= rl_min_db) ++hi;
    return std::make_pair(sweep[lo].frequency_hz, sweep[hi].frequency_hz);
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << contents;
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace rql
