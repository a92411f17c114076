#include "rql/rql.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include "rql/adder.hpp"
#include "rql/config.hpp"
#include "rql/error.hpp"
#include "rql/power.hpp"
#include "rql/report.hpp"
#include "rql/rf.hpp"
#include "rql/transformer.hpp"
#include "rql/wavesim.hpp"

struct rql_gate_table {
    rql::GateTable table;
};

struct rql_netlist {
    rql::Netlist netlist;
};

struct rql_trace {
    rql::SimTrace trace;
};

struct rql_transformer {
    rql::TransformerDesign design;
};

namespace {

thread_local std::string g_last_error;

rql_status fail(rql_status s, const std::string& msg) {
    g_last_error = msg;
    return s;
}

// Runs fn, translating library exceptions into status codes.
template <typename Fn>
rql_status guard(Fn&& fn) noexcept {
    try {
        g_last_error.clear();
        return fn();
    } catch (const rql::ParameterError& e) {
        return fail(RQL_ERR_ARGUMENT, e.what());
    } catch (const rql::StructuralError& e) {
        return fail(RQL_ERR_STRUCTURE, e.what());
    } catch (const rql::DomainError& e) {
        return fail(RQL_ERR_DOMAIN, e.what());
    } catch (const rql::ConfigError& e) {
        return fail(RQL_ERR_CONFIG, e.what());
    } catch (const rql::IoError& e) {
        return fail(RQL_ERR_IO, e.what());
    } catch (const rql::DesignError& e) {
        return fail(RQL_ERR_DESIGN, e.what());
    } catch (const std::bad_alloc&) {
        return fail(RQL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(RQL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(RQL_ERR_INTERNAL, "unknown error");
    }
}

#define RQL_REQUIRE(p)                                                    \
    do {                                                                  \
        if (!(p)) return fail(RQL_ERR_ARGUMENT, #p " must not be NULL"); \
    } while (0)

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

rql::GateKind kind_from(const char* name) {
    if (!name) throw rql::ParameterError("gate kind must not be NULL");
    const auto k = rql::parse_gate_kind(name);
    if (!k) throw rql::ParameterError(std::string("unknown gate kind '") + name + "'");
    return *k;
}

rql::ClockConfig clock_from(const rql_clock& c) {
    rql::ClockConfig cc;
    cc.frequency_hz = c.frequency_hz;
    cc.bias_rel = c.bias_rel;
    cc.receiver_window_frac = c.receiver_window_frac;
    return cc;
}

rql::MarginOptions margin_from(const rql_margin_options* o) {
    rql::MarginOptions m;
    if (o) {
        m.bias_ceiling = o->bias_ceiling;
        m.receiver_window_frac = o->receiver_window_frac;
        m.d0_ps = o->d0_ps;
    }
    return m;
}

rql::ScalingScenario scenario_from(const rql_scenario& s) {
    rql::ScalingScenario out;
    out.n_devices = s.n_devices;
    out.ic_avg_a = s.ic_avg_a;
    out.frequency_hz = s.frequency_hz;
    out.margin_frac = s.margin_frac;
    out.line_impedance_ohm = s.line_impedance_ohm;
    out.phase_chain_junctions = s.phase_chain_junctions;
    out.d0_ps = s.d0_ps;
    return out;
}

void scenario_to(const rql::ScalingScenario& s, rql_scenario* out) {
    out->n_devices = s.n_devices;
    out->ic_avg_a = s.ic_avg_a;
    out->frequency_hz = s.frequency_hz;
    out->margin_frac = s.margin_frac;
    out->line_impedance_ohm = s.line_impedance_ohm;
    out->phase_chain_junctions = s.phase_chain_junctions;
    out->d0_ps = s.d0_ps;
}

template <typename T>
rql_status copy_out(const std::vector<T>& src, T* dst, std::size_t capacity, std::size_t* n) {
    *n = src.size();
    if (!dst) return RQL_OK;
    if (capacity < src.size()) {
        return fail(RQL_ERR_CAPACITY, "array needs " + std::to_string(src.size()) + " elements");
    }
    std::copy(src.begin(), src.end(), dst);
    return RQL_OK;
}

rql_status copy_vectors(const std::vector<rql::AdderVector>& v, uint64_t* a, uint64_t* b, std::size_t capacity,
                        std::size_t* n) {
    *n = v.size();
    if (!a && !b) return RQL_OK;
    RQL_REQUIRE(a && b);
    if (capacity < v.size()) return fail(RQL_ERR_CAPACITY, "arrays need " + std::to_string(v.size()) + " elements");
    for (std::size_t i = 0; i < v.size(); ++i) {
        a[i] = v[i].a;
        b[i] = v[i].b;
    }
    return RQL_OK;
}

}  // namespace

extern "C" {

const char* rql_last_error(void) { return g_last_error.c_str(); }

const char* rql_status_name(rql_status s) {
    switch (s) {
        case RQL_OK: return "ok";
        case RQL_ERR_ARGUMENT: return "argument error";
        case RQL_ERR_STRUCTURE: return "structural error";
        case RQL_ERR_DOMAIN: return "domain error";
        case RQL_ERR_CONFIG: return "configuration error";
        case RQL_ERR_IO: return "i/o error";
        case RQL_ERR_DESIGN: return "design error";
        case RQL_ERR_CAPACITY: return "capacity error";
        case RQL_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* rql_version(void) { return "1.0.0"; }

void rql_string_free(char* s) { std::free(s); }

// ---- gate table ----

rql_status rql_gate_table_new(rql_gate_table** out) {
    return guard([&] {
        RQL_REQUIRE(out);
        *out = new rql_gate_table{};
        return RQL_OK;
    });
}

rql_status rql_gate_table_load(const char* path, rql_gate_table** out) {
    return guard([&] {
        RQL_REQUIRE(path && out);
        *out = new rql_gate_table{rql::load_gate_table(path)};
        return RQL_OK;
    });
}

rql_status rql_gate_table_save(const rql_gate_table* table, const char* path) {
    return guard([&] {
        RQL_REQUIRE(table && path);
        std::ostringstream os;
        rql::write_gate_table(os, table->table);
        rql::write_file(path, os.str());
        return RQL_OK;
    });
}

rql_status rql_gate_table_get(const rql_gate_table* table, const char* kind, int* jj_count, double* ic_avg_ua,
                              int* seq_depth) {
    return guard([&] {
        RQL_REQUIRE(table);
        const auto& s = table->table[kind_from(kind)];
        if (jj_count) *jj_count = s.jj_count;
        if (ic_avg_ua) *ic_avg_ua = s.ic_avg_ua;
        if (seq_depth) *seq_depth = s.seq_depth;
        return RQL_OK;
    });
}

rql_status rql_gate_table_set(rql_gate_table* table, const char* kind, int jj_count, double ic_avg_ua,
                              int seq_depth) {
    return guard([&] {
        RQL_REQUIRE(table);
        rql::GateSpec s{kind_from(kind), jj_count, ic_avg_ua, seq_depth};
        table->table.set(s);
        return RQL_OK;
    });
}

void rql_gate_table_free(rql_gate_table* table) { delete table; }

// ---- netlists ----

void rql_adder_options_init(rql_adder_options* o) {
    if (!o) return;
    const rql::AdderOptions d;
    o->n_bits = d.n_bits;
    o->chip_mode = d.chip_mode ? 1 : 0;
    o->idle_phases = d.idle_phases;
    o->idle_before_stage = d.idle_before_stage;
    o->max_fanout = d.max_fanout;
    o->ptl_length_um = d.ptl_length_um;
}

rql_status rql_netlist_generate(const rql_adder_options* options, const rql_gate_table* table, rql_netlist** out) {
    return guard([&] {
        RQL_REQUIRE(options && out);
        rql::AdderOptions o;
        o.n_bits = options->n_bits;
        o.chip_mode = options->chip_mode != 0;
        o.idle_phases = options->idle_phases;
        o.idle_before_stage = options->idle_before_stage;
        o.max_fanout = options->max_fanout;
        o.ptl_length_um = options->ptl_length_um;
        *out = new rql_netlist{rql::generate_adder(o, table ? table->table : rql::GateTable{})};
        return RQL_OK;
    });
}

rql_status rql_netlist_load(const char* path, rql_netlist** out) {
    return guard([&] {
        RQL_REQUIRE(path && out);
        *out = new rql_netlist{rql::load_netlist(path)};
        return RQL_OK;
    });
}

rql_status rql_netlist_save(const rql_netlist* netlist, const char* path) {
    return guard([&] {
        RQL_REQUIRE(netlist && path);
        rql::save_netlist(path, netlist->netlist);
        return RQL_OK;
    });
}

rql_status rql_netlist_info_get(const rql_netlist* netlist, rql_netlist_info* out) {
    return guard([&] {
        RQL_REQUIRE(netlist && out);
        const auto& nl = netlist->netlist;
        const auto st = rql::netlist_stats(nl);
        out->width = nl.width;
        out->carry_out = nl.has_carry_out() ? 1 : 0;
        out->gates = st.gate_count;
        out->jj_total = st.jj_total;
        out->logic_stages = nl.layout.n_logic_stages;
        out->idle_phases = nl.layout.idle_phases;
        out->phases = nl.phases_assigned ? rql::latency(nl, 1e9).phases : 0;
        out->max_fanout = st.max_fanout;
        out->ic_avg_ua = st.ic_avg_ua.value_or(0.0);
        return RQL_OK;
    });
}

rql_status rql_netlist_report_json(const rql_netlist* netlist, double clock_hz, char** out_json) {
    return guard([&] {
        RQL_REQUIRE(netlist && out_json);
        const auto& nl = netlist->netlist;
        nlohmann::json j;
        j["width"] = nl.width;
        j["carry_out"] = nl.has_carry_out();
        j["chip_mode"] = nl.chip_mode;
        j["logic_stages"] = nl.layout.n_logic_stages;
        j["idle_phases"] = nl.layout.idle_phases;
        j["idle_before_stage"] = nl.layout.idle_before_stage;
        j["stats"] = rql::to_json(rql::netlist_stats(nl));
        if (nl.phases_assigned) {
            j["clock_hz"] = clock_hz;
            j["latency"] = rql::to_json(rql::latency(nl, clock_hz));
        }
        *out_json = dup_string(j.dump(2));
        return RQL_OK;
    });
}

rql_status rql_netlist_validate(const rql_netlist* netlist, int max_fanout, size_t* n_diagnostics, char** out_json) {
    return guard([&] {
        RQL_REQUIRE(netlist && n_diagnostics);
        const auto diags = rql::validate(netlist->netlist, max_fanout);
        *n_diagnostics = diags.size();
        if (out_json) *out_json = dup_string(rql::to_json(diags).dump(2));
        return RQL_OK;
    });
}

void rql_netlist_free(rql_netlist* netlist) { delete netlist; }

rql_status rql_latency(int phases, double frequency_hz, double* cycles, double* picoseconds) {
    return guard([&] {
        const auto l = rql::latency_for_phases(phases, frequency_hz);
        if (cycles) *cycles = l.cycles;
        if (picoseconds) *picoseconds = l.picoseconds;
        return RQL_OK;
    });
}

// ---- simulation ----

void rql_clock_init(rql_clock* c) {
    if (!c) return;
    const rql::ClockConfig d;
    c->frequency_hz = d.frequency_hz;
    c->bias_rel = d.bias_rel;
    c->receiver_window_frac = d.receiver_window_frac;
    c->d0_ps = rql::kNominalJunctionDelayPs;
}

rql_status rql_simulate(const rql_netlist* netlist, const uint64_t* a, const uint64_t* b, size_t n,
                        const rql_clock* timed, rql_trace** out) {
    return guard([&] {
        RQL_REQUIRE(netlist && out);
        if (n > 0) RQL_REQUIRE(a && b);
        std::vector<rql::AdderVector> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = {a[i], b[i]};
        auto t = timed ? rql::simulate_timed(netlist->netlist, clock_from(*timed), v, timed->d0_ps)
                       : rql::simulate_logic(netlist->netlist, v);
        *out = new rql_trace{std::move(t)};
        return RQL_OK;
    });
}

rql_status rql_prbs_bits(uint16_t seed, size_t count, uint8_t* out_bits) {
    return guard([&] {
        if (count > 0) RQL_REQUIRE(out_bits);
        const auto bits = rql::prbs_bits(seed, count);
        std::copy(bits.begin(), bits.end(), out_bits);
        return RQL_OK;
    });
}

rql_status rql_chopped_prbs(uint16_t seed, size_t active_len, size_t zero_len, size_t periods, uint8_t* out_bits,
                            size_t capacity, size_t* n_bits) {
    return guard([&] {
        RQL_REQUIRE(n_bits);
        const auto p = rql::chopped_prbs(seed, active_len, zero_len, periods);
        return copy_out(p.serial_bits, out_bits, capacity, n_bits);
    });
}

rql_status rql_load_serial(const char* path, uint8_t* out_bits, size_t capacity, size_t* n_bits) {
    return guard([&] {
        RQL_REQUIRE(path && n_bits);
        return copy_out(rql::load_serial(path), out_bits, capacity, n_bits);
    });
}

rql_status rql_load_vectors(const char* path, int width, uint64_t* a, uint64_t* b, size_t capacity,
                            size_t* n_vectors) {
    return guard([&] {
        RQL_REQUIRE(path && n_vectors);
        return copy_vectors(rql::load_vectors(path, width), a, b, capacity, n_vectors);
    });
}

rql_status rql_harness_vectors(const uint8_t* serial, size_t n_bits, size_t cycles, int width, uint64_t* a,
                               uint64_t* b, size_t capacity, size_t* n_vectors) {
    return guard([&] {
        RQL_REQUIRE(serial && n_vectors);
        const auto v = rql::shift_register_harness({serial, n_bits}, cycles, width);
        return copy_vectors(v, a, b, capacity, n_vectors);
    });
}

rql_status rql_trace_cycles(const rql_trace* trace, size_t* cycles) {
    return guard([&] {
        RQL_REQUIRE(trace && cycles);
        *cycles = trace->trace.cycles();
        return RQL_OK;
    });
}

rql_status rql_trace_row(const rql_trace* trace, size_t cycle, uint64_t* sum, int* carry_out, uint64_t* events) {
    return guard([&] {
        RQL_REQUIRE(trace);
        const auto& t = trace->trace;
        if (cycle >= t.cycles()) return fail(RQL_ERR_ARGUMENT, "cycle out of range");
        if (sum) *sum = t.sums[cycle];
        if (carry_out) *carry_out = t.has_carry_out ? t.carry_outs[cycle] : -1;
        if (events) *events = t.cycle_events[cycle];
        return RQL_OK;
    });
}

rql_status rql_trace_total_events(const rql_trace* trace, uint64_t* events) {
    return guard([&] {
        RQL_REQUIRE(trace && events);
        *events = trace->trace.total_events();
        return RQL_OK;
    });
}

rql_status rql_trace_violations(const rql_trace* trace, size_t* violations) {
    return guard([&] {
        RQL_REQUIRE(trace && violations);
        *violations = trace->trace.violations.size();
        return RQL_OK;
    });
}

rql_status rql_trace_check(const rql_trace* trace, size_t* checked, size_t* failures) {
    return guard([&] {
        RQL_REQUIRE(trace);
        const auto c = rql::check_addition(trace->trace);
        if (checked) *checked = c.checked;
        if (failures) *failures = c.failures;
        return RQL_OK;
    });
}

rql_status rql_trace_write_csv(const rql_trace* trace, const char* path) {
    return guard([&] {
        RQL_REQUIRE(trace && path);
        std::ostringstream os;
        rql::write_trace_csv(os, trace->trace);
        rql::write_file(path, os.str());
        return RQL_OK;
    });
}

rql_status rql_trace_summary_json(const rql_trace* trace, int with_check, char** out_json) {
    return guard([&] {
        RQL_REQUIRE(trace && out_json);
        std::optional<rql::AdditionCheck> check;
        if (with_check) check = rql::check_addition(trace->trace);
        *out_json = dup_string(rql::trace_summary(trace->trace, check).dump(2));
        return RQL_OK;
    });
}

rql_status rql_trace_power(const rql_trace* trace, const rql_netlist* netlist, double frequency_hz,
                           double* total_w, double* line_i_w, double* line_q_w) {
    return guard([&] {
        RQL_REQUIRE(trace && netlist);
        const auto p = rql::activity_power(trace->trace, netlist->netlist, frequency_hz);
        if (total_w) *total_w = p.total_w;
        if (line_i_w) *line_i_w = p.per_line_w[0];
        if (line_q_w) *line_q_w = p.per_line_w[1];
        return RQL_OK;
    });
}

void rql_trace_free(rql_trace* trace) { delete trace; }

// ---- timing and margins ----

rql_status rql_timing(const rql_netlist* netlist, const rql_clock* clock, double* worst_arrival_ps,
                      int* worst_path_junctions, size_t* violations) {
    return guard([&] {
        RQL_REQUIRE(netlist && clock);
        const auto r = rql::analyze_timing(netlist->netlist, clock_from(*clock), clock->d0_ps);
        if (worst_arrival_ps) *worst_arrival_ps = r.worst_arrival_ps;
        if (worst_path_junctions) *worst_path_junctions = r.worst_path_junctions;
        if (violations) *violations = r.violations.size();
        return RQL_OK;
    });
}

void rql_margin_options_init(rql_margin_options* o) {
    if (!o) return;
    const rql::MarginOptions d;
    o->bias_ceiling = d.bias_ceiling;
    o->receiver_window_frac = d.receiver_window_frac;
    o->d0_ps = d.d0_ps;
}

rql_status rql_margin_sweep(const rql_netlist* netlist, const double* freqs, size_t n_freq, const double* grid,
                            size_t n_grid, const rql_margin_options* options, rql_margin_point* out) {
    return guard([&] {
        RQL_REQUIRE(netlist && freqs && grid && out);
        const auto curve = rql::margin_sweep(netlist->netlist, {freqs, n_freq}, {grid, n_grid}, margin_from(options));
        for (std::size_t i = 0; i < curve.points.size(); ++i) {
            const auto& p = curve.points[i];
            out[i] = {p.frequency_hz, p.bias_min, p.bias_max, p.lower_db, p.upper_db, p.width_db, p.operable ? 1 : 0};
        }
        return RQL_OK;
    });
}

rql_status rql_calibrate_bias_ceiling(const rql_netlist* netlist, double frequency_hz, double target_width_db,
                                      const rql_margin_options* options, double* ceiling) {
    return guard([&] {
        RQL_REQUIRE(netlist && ceiling);
        *ceiling = rql::calibrate_bias_ceiling(netlist->netlist, frequency_hz, target_width_db, margin_from(options));
        return RQL_OK;
    });
}

rql_status rql_chain_delay_spread(int junctions, double bias_lo, double bias_hi, double d0_ps, double* spread_ps) {
    return guard([&] {
        RQL_REQUIRE(spread_ps);
        *spread_ps = rql::chain_delay_spread(junctions, bias_lo, bias_hi, d0_ps);
        return RQL_OK;
    });
}

// ---- power ----

rql_status rql_dynamic_power(double ic_avg_a, double junctions, double frequency_hz, double* watts) {
    return guard([&] {
        RQL_REQUIRE(watts);
        *watts = rql::dynamic_power(ic_avg_a, junctions, frequency_hz);
        return RQL_OK;
    });
}

void rql_scenario_init(rql_scenario* s) {
    if (s) scenario_to(rql::ScalingScenario{}, s);
}

rql_status rql_scenario_load(const char* path, rql_scenario* out) {
    return guard([&] {
        RQL_REQUIRE(path && out);
        scenario_to(rql::load_scenario(path), out);
        return RQL_OK;
    });
}

rql_status rql_clock_budget_compute(const rql_scenario* scenario, rql_clock_budget* out) {
    return guard([&] {
        RQL_REQUIRE(scenario && out);
        const auto b = rql::clock_budget(scenario_from(*scenario));
        *out = {b.p_dissipated_w, b.p_applied_w, b.line_current_rms_a, b.timing_variation_ps};
        return RQL_OK;
    });
}

rql_status rql_clock_feed_current(int n_lines, double amplitude_a, double z_line_ohm, double z_feed_ohm,
                                  double* rms_a) {
    return guard([&] {
        RQL_REQUIRE(rms_a);
        *rms_a = rql::clock_feed_current_rms(n_lines, amplitude_a, z_line_ohm, z_feed_ohm);
        return RQL_OK;
    });
}

rql_status rql_rsfq_static_equivalent(double bias_current_a, double bus_voltage_v, double* watts) {
    return guard([&] {
        RQL_REQUIRE(watts);
        *watts = rql::rsfq_static_equivalent(bias_current_a, bus_voltage_v);
        return RQL_OK;
    });
}

// ---- sidebands ----

rql_status rql_dbm_to_watts(double dbm, double* watts) {
    return guard([&] {
        RQL_REQUIRE(watts);
        *watts = rql::dbm_to_watts(dbm);
        return RQL_OK;
    });
}

rql_status rql_watts_to_dbm(double watts, double* dbm) {
    return guard([&] {
        RQL_REQUIRE(dbm);
        *dbm = rql::watts_to_dbm(watts);
        return RQL_OK;
    });
}

rql_status rql_dissipation(double p0_dbm, double ssb_db, double am_fraction, double* ratio, double* watts) {
    return guard([&] {
        rql::SidebandMeasurement m;
        m.p0_dbm = p0_dbm;
        m.ssb_db = ssb_db;
        const auto e = rql::am_pm_corrected_power(m, am_fraction);
        if (ratio) *ratio = e.ratio;
        if (watts) *watts = e.watts;
        return RQL_OK;
    });
}

rql_status rql_sideband_chain(const rql_line_observation* lines, size_t n_lines, const rql_region_share* regions,
                              size_t n_regions, double am_fraction, double f_clock_hz, double chop_active,
                              double chop_zero, char** out_json) {
    return guard([&] {
        RQL_REQUIRE(out_json);
        if (n_lines > 0) RQL_REQUIRE(lines);
        if (n_regions > 0) RQL_REQUIRE(regions);
        rql::MeasurementDescriptor m;
        m.f_clock_hz = f_clock_hz;
        m.am_fraction = am_fraction;
        for (std::size_t i = 0; i < n_lines; ++i) {
            RQL_REQUIRE(lines[i].line);
            m.lines.push_back({lines[i].line, lines[i].p0_dbm, lines[i].ssb_db});
        }
        for (std::size_t i = 0; i < n_regions; ++i) {
            RQL_REQUIRE(regions[i].region);
            m.regions.emplace_back(regions[i].region, regions[i].fraction);
        }
        if (chop_active > 0.0 || chop_zero > 0.0) m.chop = std::make_pair(chop_active, chop_zero);
        if (m.lines.empty()) return fail(RQL_ERR_ARGUMENT, "no clock lines given");
        *out_json = dup_string(rql::to_json(rql::sideband_chain(m)).dump(2));
        return RQL_OK;
    });
}

rql_status rql_sideband_chain_file(const char* path, char** out_json) {
    return guard([&] {
        RQL_REQUIRE(path && out_json);
        *out_json = dup_string(rql::to_json(rql::sideband_chain(rql::load_measurement(path))).dump(2));
        return RQL_OK;
    });
}

rql_status rql_extract_ma(double r, double* m_a) {
    return guard([&] {
        RQL_REQUIRE(m_a);
        *m_a = rql::extract_ma(r);
        return RQL_OK;
    });
}

rql_status rql_extract_mp(double delta_t_s, double f_carrier_hz, double* m_p) {
    return guard([&] {
        RQL_REQUIRE(m_p);
        *m_p = rql::extract_mp(delta_t_s, f_carrier_hz);
        return RQL_OK;
    });
}

rql_status rql_chop_fundamental(double f_clock_hz, double active_len, double zero_len, double* hz) {
    return guard([&] {
        RQL_REQUIRE(hz);
        *hz = rql::chop_fundamental(f_clock_hz, active_len, zero_len);
        return RQL_OK;
    });
}

rql_status rql_spectrum_ssb(const char* csv_path, double f_mod_hz, double tolerance_hz, double* carrier_hz,
                            double* carrier_dbm, double* ssb_db) {
    return guard([&] {
        RQL_REQUIRE(csv_path);
        const auto spectrum = rql::load_spectrum_csv(csv_path);
        const auto r = rql::measure_ssb(spectrum, f_mod_hz, tolerance_hz);
        if (carrier_hz) *carrier_hz = r.carrier_hz;
        if (carrier_dbm) *carrier_dbm = r.carrier_dbm;
        if (ssb_db) *ssb_db = r.ssb_db;
        return RQL_OK;
    });
}

rql_status rql_modulation_roundtrip(double m_a, double m_p, double f_carrier_hz, double f_mod_hz, double duration_s,
                                    double sample_rate_hz, double* ssb_ratio, double* m_a_out, double* m_p_out) {
    return guard([&] {
        const auto x = rql::synthesize_modulated(1.0, {m_a, m_p}, f_carrier_hz, f_mod_hz, duration_s, sample_rate_hz);
        const auto s = rql::spectrum_sidebands(x, sample_rate_hz, f_carrier_hz, f_mod_hz);
        if (ssb_ratio) *ssb_ratio = s.ssb_ratio();
        if (m_a_out) *m_a_out = s.factors.m_a;
        if (m_p_out) *m_p_out = s.factors.m_p;
        return RQL_OK;
    });
}

// ---- clock network ----

void rql_transformer_spec_init(rql_transformer_spec* s) {
    if (!s) return;
    const rql::TransformerSpec d;
    s->z_source_ohm = d.z_source_ohm;
    s->z_load_ohm = d.z_load_ohm;
    s->n_sections = d.n_sections;
    s->f_center_hz = d.f_center_hz;
    s->ripple_db = d.ripple_db;
    s->band_lo_hz = 0.0;
    s->band_hi_hz = 0.0;
    s->binomial = 0;
}

rql_status rql_transformer_design(const rql_transformer_spec* spec, rql_transformer** out,
                                  double* achievable_ripple_db) {
    return guard([&] {
        RQL_REQUIRE(spec && out);
        rql::TransformerSpec s;
        s.z_source_ohm = spec->z_source_ohm;
        s.z_load_ohm = spec->z_load_ohm;
        s.n_sections = spec->n_sections;
        s.f_center_hz = spec->f_center_hz;
        s.ripple_db = spec->ripple_db;
        if (spec->band_lo_hz != 0.0 || spec->band_hi_hz != 0.0) {
            s.band_lo_hz = spec->band_lo_hz;
            s.band_hi_hz = spec->band_hi_hz;
        }
        s.synthesis = spec->binomial ? rql::Synthesis::Binomial : rql::Synthesis::Chebyshev;
        try {
            *out = new rql_transformer{rql::design_transformer(s)};
        } catch (const rql::DesignError& e) {
            if (achievable_ripple_db) *achievable_ripple_db = e.achievable_ripple_db();
            throw;
        }
        return RQL_OK;
    });
}

rql_status rql_transformer_sections(const rql_transformer* design, double* impedances_ohm, size_t capacity,
                                    size_t* n_sections) {
    return guard([&] {
        RQL_REQUIRE(design && n_sections);
        return copy_out(design->design.section_impedances_ohm, impedances_ohm, capacity, n_sections);
    });
}

rql_status rql_transformer_sweep(const rql_transformer* design, const double* freqs, size_t n, rql_sparam* out) {
    return guard([&] {
        RQL_REQUIRE(design && freqs && out);
        const auto sweep = rql::cascade_sparams(design->design, {freqs, n});
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            const auto& p = sweep[i];
            out[i] = {p.frequency_hz, p.s11.real(), p.s11.imag(), p.s21.real(), p.s21.imag(),
                      p.s22.real(),   p.s22.imag(), p.return_loss_db()};
        }
        return RQL_OK;
    });
}

rql_status rql_transformer_write_csv(const rql_transformer* design, const char* path) {
    return guard([&] {
        RQL_REQUIRE(design && path);
        std::ostringstream os;
        rql::write_transformer_csv(os, design->design);
        rql::write_file(path, os.str());
        return RQL_OK;
    });
}

rql_status rql_transformer_write_sparams(const rql_transformer* design, const double* freqs, size_t n,
                                         const char* path) {
    return guard([&] {
        RQL_REQUIRE(design && freqs && path);
        std::ostringstream os;
        rql::write_sparam_csv(os, rql::cascade_sparams(design->design, {freqs, n}));
        rql::write_file(path, os.str());
        return RQL_OK;
    });
}

rql_status rql_transformer_report_json(const rql_transformer* design, const double* freqs, size_t n,
                                       double rl_min_db, char** out_json) {
    return guard([&] {
        RQL_REQUIRE(design && out_json);
        if (n > 0) RQL_REQUIRE(freqs);
        auto j = rql::to_json(design->design);
        if (n > 0) {
            const auto sweep = rql::cascade_sparams(design->design, {freqs, n});
            double worst = std::numeric_limits<double>::infinity();
            double unitarity = 0.0;
            for (const auto& p : sweep) {
                worst = std::min(worst, p.return_loss_db());
                unitarity = std::max(unitarity, std::abs(std::norm(p.s11) + std::norm(p.s21) - 1.0));
            }
            j["sweep"] = {{"points", n},
                          {"f_lo_hz", sweep.front().frequency_hz},
                          {"f_hi_hz", sweep.back().frequency_hz},
                          {"worst_return_loss_db", worst},
                          {"max_unitarity_error", unitarity},
                          {"rl_min_db", rl_min_db}};
            const auto band = rql::matched_band(sweep, design->design.f_center_hz, rl_min_db);
            j["sweep"]["matched_band_hz"] = band ? nlohmann::json{band->first, band->second} : nlohmann::json(nullptr);
        }
        *out_json = dup_string(j.dump(2));
        return RQL_OK;
    });
}

void rql_transformer_free(rql_transformer* design) { delete design; }

}  // extern "C"
