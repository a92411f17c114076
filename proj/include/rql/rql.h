/* C interface to the RQL adder toolkit. All functions return an rql_status;
 * on failure rql_last_error() holds a message for the calling thread.
 * Strings returned through char** are owned by the caller and released with
 * rql_string_free(). Functions that fill caller arrays take a capacity and
 * report the required length; pass a NULL array to query the length. */
#ifndef RQL_RQL_H
#define RQL_RQL_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(RQL_BUILDING)
#define RQL_API __declspec(dllexport)
#else
#define RQL_API __declspec(dllimport)
#endif
#else
#define RQL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rql_status {
    RQL_OK = 0,
    RQL_ERR_ARGUMENT = 1, /* null pointer, out-of-range parameter */
    RQL_ERR_STRUCTURE = 2, /* malformed or cyclic netlist */
    RQL_ERR_DOMAIN = 3,    /* value outside a formula's domain */
    RQL_ERR_CONFIG = 4,    /* unparsable configuration or data file */
    RQL_ERR_IO = 5,        /* file could not be opened or written */
    RQL_ERR_DESIGN = 6,    /* matching network cannot meet its specification */
    RQL_ERR_CAPACITY = 7,  /* caller array too small; required length reported */
    RQL_ERR_INTERNAL = 8
} rql_status;

RQL_API const char* rql_last_error(void);
RQL_API const char* rql_status_name(rql_status status);
RQL_API const char* rql_version(void);
RQL_API void rql_string_free(char* s);

typedef struct rql_gate_table rql_gate_table;
typedef struct rql_netlist rql_netlist;
typedef struct rql_trace rql_trace;
typedef struct rql_transformer rql_transformer;

/* ---- gate table ---- */

RQL_API rql_status rql_gate_table_new(rql_gate_table** out);
RQL_API rql_status rql_gate_table_load(const char* path, rql_gate_table** out);
RQL_API rql_status rql_gate_table_save(const rql_gate_table* table, const char* path);
/* kind: AndOr, AnotB, Split, Delay, PtlDriver, PtlReceiver, Source, Sink */
RQL_API rql_status rql_gate_table_get(const rql_gate_table* table, const char* kind, int* jj_count,
                                      double* ic_avg_ua, int* seq_depth);
RQL_API rql_status rql_gate_table_set(rql_gate_table* table, const char* kind, int jj_count,
                                      double ic_avg_ua, int seq_depth);
RQL_API void rql_gate_table_free(rql_gate_table* table);

/* ---- adder netlists ---- */

typedef struct rql_adder_options {
    int n_bits;
    int chip_mode; /* nonzero: no carry-out */
    int idle_phases;
    int idle_before_stage; /* -1: last CLA column */
    int max_fanout;
    double ptl_length_um; /* > 0: long wires become passive lines */
} rql_adder_options;

typedef struct rql_netlist_info {
    int width;
    int carry_out;
    int gates;
    int jj_total;
    int logic_stages;
    int idle_phases;
    int phases;
    int max_fanout;
    double ic_avg_ua;
} rql_netlist_info;

RQL_API void rql_adder_options_init(rql_adder_options* options);
/* table may be NULL for the built-in defaults. */
RQL_API rql_status rql_netlist_generate(const rql_adder_options* options, const rql_gate_table* table,
                                        rql_netlist** out);
RQL_API rql_status rql_netlist_load(const char* path, rql_netlist** out);
RQL_API rql_status rql_netlist_save(const rql_netlist* netlist, const char* path);
RQL_API rql_status rql_netlist_info_get(const rql_netlist* netlist, rql_netlist_info* out);
/* Statistics and latency at clock_hz as a JSON object. */
RQL_API rql_status rql_netlist_report_json(const rql_netlist* netlist, double clock_hz, char** out_json);
/* Diagnostics count; out_json (may be NULL) receives the list. */
RQL_API rql_status rql_netlist_validate(const rql_netlist* netlist, int max_fanout,
                                        size_t* n_diagnostics, char** out_json);
RQL_API void rql_netlist_free(rql_netlist* netlist);

RQL_API rql_status rql_latency(int phases, double frequency_hz, double* cycles, double* picoseconds);

/* ---- simulation ---- */

typedef struct rql_clock {
    double frequency_hz;
    double bias_rel;
    double receiver_window_frac;
    double d0_ps;
} rql_clock;

RQL_API void rql_clock_init(rql_clock* clock);

/* timed == NULL: logical simulation; otherwise cells that miss their
 * window at that clock point emit nothing. */
RQL_API rql_status rql_simulate(const rql_netlist* netlist, const uint64_t* a, const uint64_t* b,
                                size_t n_vectors, const rql_clock* timed, rql_trace** out);

RQL_API rql_status rql_prbs_bits(uint16_t seed, size_t count, uint8_t* out_bits);
/* periods x (active LFSR bits, zero bits). */
RQL_API rql_status rql_chopped_prbs(uint16_t seed, size_t active_len, size_t zero_len, size_t periods,
                                    uint8_t* out_bits, size_t capacity, size_t* n_bits);
RQL_API rql_status rql_load_serial(const char* path, uint8_t* out_bits, size_t capacity, size_t* n_bits);
RQL_API rql_status rql_load_vectors(const char* path, int width, uint64_t* a, uint64_t* b,
                                    size_t capacity, size_t* n_vectors);
/* Addend pairs tapped from a 2*width-stage shift register fed cyclically
 * with the serial program; cycles == 0 gives one pair per serial bit. */
RQL_API rql_status rql_harness_vectors(const uint8_t* serial, size_t n_bits, size_t cycles, int width,
                                       uint64_t* a, uint64_t* b, size_t capacity, size_t* n_vectors);

RQL_API rql_status rql_trace_cycles(const rql_trace* trace, size_t* cycles);
RQL_API rql_status rql_trace_row(const rql_trace* trace, size_t cycle, uint64_t* sum, int* carry_out,
                                 uint64_t* events);
RQL_API rql_status rql_trace_total_events(const rql_trace* trace, uint64_t* events);
RQL_API rql_status rql_trace_violations(const rql_trace* trace, size_t* violations);
/* Compare against integer addition. */
RQL_API rql_status rql_trace_check(const rql_trace* trace, size_t* checked, size_t* failures);
RQL_API rql_status rql_trace_write_csv(const rql_trace* trace, const char* path);
RQL_API rql_status rql_trace_summary_json(const rql_trace* trace, int with_check, char** out_json);
/* Activity-weighted dissipation at frequency_hz. */
RQL_API rql_status rql_trace_power(const rql_trace* trace, const rql_netlist* netlist, double frequency_hz,
                                   double* total_w, double* line_i_w, double* line_q_w);
RQL_API void rql_trace_free(rql_trace* trace);

/* ---- timing and margins ---- */

typedef struct rql_margin_options {
    double bias_ceiling;
    double receiver_window_frac;
    double d0_ps;
} rql_margin_options;

typedef struct rql_margin_point {
    double frequency_hz;
    double bias_min;
    double bias_max;
    double lower_db;
    double upper_db;
    double width_db;
    int operable;
} rql_margin_point;

RQL_API rql_status rql_timing(const rql_netlist* netlist, const rql_clock* clock, double* worst_arrival_ps,
                              int* worst_path_junctions, size_t* violations);
RQL_API void rql_margin_options_init(rql_margin_options* options);
RQL_API rql_status rql_margin_sweep(const rql_netlist* netlist, const double* frequencies_hz, size_t n_freq,
                                    const double* bias_grid, size_t n_grid, const rql_margin_options* options,
                                    rql_margin_point* out);
RQL_API rql_status rql_calibrate_bias_ceiling(const rql_netlist* netlist, double frequency_hz,
                                              double target_width_db, const rql_margin_options* options,
                                              double* ceiling);
RQL_API rql_status rql_chain_delay_spread(int junctions, double bias_lo, double bias_hi, double d0_ps,
                                          double* spread_ps);

/* ---- power ---- */

typedef struct rql_scenario {
    double n_devices;
    double ic_avg_a;
    double frequency_hz;
    double margin_frac;
    double line_impedance_ohm;
    int phase_chain_junctions;
    double d0_ps;
} rql_scenario;

typedef struct rql_clock_budget {
    double p_dissipated_w;
    double p_applied_w;
    double line_current_rms_a;
    double timing_variation_ps;
} rql_clock_budget;

RQL_API rql_status rql_dynamic_power(double ic_avg_a, double junctions, double frequency_hz, double* watts);
RQL_API void rql_scenario_init(rql_scenario* scenario);
RQL_API rql_status rql_scenario_load(const char* path, rql_scenario* out);
RQL_API rql_status rql_clock_budget_compute(const rql_scenario* scenario, rql_clock_budget* out);
RQL_API rql_status rql_clock_feed_current(int n_lines, double amplitude_a, double z_line_ohm,
                                          double z_feed_ohm, double* rms_a);
RQL_API rql_status rql_rsfq_static_equivalent(double bias_current_a, double bus_voltage_v, double* watts);

/* ---- sideband analysis ---- */

typedef struct rql_line_observation {
    const char* line;
    double p0_dbm;
    double ssb_db;
} rql_line_observation;

typedef struct rql_region_share {
    const char* region;
    double fraction;
} rql_region_share;

RQL_API rql_status rql_dbm_to_watts(double dbm, double* watts);
RQL_API rql_status rql_watts_to_dbm(double watts, double* dbm);
RQL_API rql_status rql_dissipation(double p0_dbm, double ssb_db, double am_fraction, double* ratio,
                                   double* watts);
/* SSB -> per-line power -> total -> regions. chop lengths <= 0 skip the
 * chop fundamental; f_clock_hz may then be 0. */
RQL_API rql_status rql_sideband_chain(const rql_line_observation* lines, size_t n_lines,
                                      const rql_region_share* regions, size_t n_regions, double am_fraction,
                                      double f_clock_hz, double chop_active, double chop_zero,
                                      char** out_json);
RQL_API rql_status rql_sideband_chain_file(const char* measurement_path, char** out_json);
RQL_API rql_status rql_extract_ma(double p_lo_over_p_hi, double* m_a);
RQL_API rql_status rql_extract_mp(double delta_t_s, double f_carrier_hz, double* m_p);
RQL_API rql_status rql_chop_fundamental(double f_clock_hz, double active_len, double zero_len, double* hz);
RQL_API rql_status rql_spectrum_ssb(const char* csv_path, double f_mod_hz, double tolerance_hz,
                                    double* carrier_hz, double* carrier_dbm, double* ssb_db);
/* Synthesizes a modulated carrier and measures it back. */
RQL_API rql_status rql_modulation_roundtrip(double m_a, double m_p, double f_carrier_hz, double f_mod_hz,
                                            double duration_s, double sample_rate_hz, double* ssb_ratio,
                                            double* m_a_out, double* m_p_out);

/* ---- clock network ---- */

typedef struct rql_transformer_spec {
    double z_source_ohm;
    double z_load_ohm;
    int n_sections;
    double f_center_hz;
    double ripple_db;
    double band_lo_hz; /* both 0: no band requirement */
    double band_hi_hz;
    int binomial;
} rql_transformer_spec;

typedef struct rql_sparam {
    double frequency_hz;
    double s11_re, s11_im;
    double s21_re, s21_im;
    double s22_re, s22_im;
    double return_loss_db;
} rql_sparam;

RQL_API void rql_transformer_spec_init(rql_transformer_spec* spec);
/* RQL_ERR_DESIGN when the band cannot be held; achievable_ripple_db (may be
 * NULL) then receives the best ripple the section count allows. */
RQL_API rql_status rql_transformer_design(const rql_transformer_spec* spec, rql_transformer** out,
                                          double* achievable_ripple_db);
RQL_API rql_status rql_transformer_sections(const rql_transformer* design, double* impedances_ohm,
                                            size_t capacity, size_t* n_sections);
RQL_API rql_status rql_transformer_sweep(const rql_transformer* design, const double* frequencies_hz,
                                         size_t n, rql_sparam* out);
RQL_API rql_status rql_transformer_write_csv(const rql_transformer* design, const char* path);
RQL_API rql_status rql_transformer_write_sparams(const rql_transformer* design, const double* frequencies_hz,
                                                 size_t n, const char* path);
/* Design summary plus the contiguous band around f0 where the exact cascade
 * keeps return loss >= rl_min_db. */
RQL_API rql_status rql_transformer_report_json(const rql_transformer* design, const double* frequencies_hz,
                                               size_t n, double rl_min_db, char** out_json);
RQL_API void rql_transformer_free(rql_transformer* design);

#ifdef __cplusplus
}
#endif

#endif
