#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rql/adder.hpp"
#include "rql/config.hpp"
#include "rql/power.hpp"
#include "rql/rf.hpp"
#include "rql/transformer.hpp"
#include "rql/wavesim.hpp"

namespace rql {

// ---- input files ----

/// One `A,B` pair of hex words per line (optional 0x prefix); blank lines
/// and `#` comments are skipped. Words wider than `width` bits are rejected.
std::vector<AdderVector> parse_vectors(std::istream& in, int width);
std::vector<AdderVector> load_vectors(const std::string& path, int width);
void write_vectors(std::ostream& out, std::span<const AdderVector> vectors, int width);

/// Bit string of '0'/'1'; whitespace, '_' separators and `#` comments ignored.
std::vector<std::uint8_t> parse_serial(std::istream& in);
std::vector<std::uint8_t> load_serial(const std::string& path);

/// Analyser trace, `frequency_hz,power_dbm` per line. A non-numeric first
/// line is taken as a header.
std::vector<SpectrumPoint> parse_spectrum_csv(std::istream& in);
std::vector<SpectrumPoint> load_spectrum_csv(const std::string& path);
void write_spectrum_csv(std::ostream& out, std::span<const SpectrumPoint> spectrum);

// ---- simulation output ----

struct AdditionCheck {
    std::size_t checked = 0;
    std::size_t failures = 0;
    /// Input cycle of the first mismatch.
    std::optional<std::size_t> first_failure;

    bool passed() const noexcept { return failures == 0; }
};

/// Compares every sum (and carry-out, if present) with integer addition.
AdditionCheck check_addition(const SimTrace& trace);

/// `cycle,a,b,sum,cout,events`: one row per input cycle, words in hex, the
/// output cycle is cycle + latency.
void write_trace_csv(std::ostream& out, const SimTrace& trace);

nlohmann::json trace_summary(const SimTrace& trace, const std::optional<AdditionCheck>& check);

// ---- netlist / margins ----

nlohmann::json to_json(const NetlistStats& stats);
nlohmann::json to_json(const Latency& latency);
nlohmann::json to_json(const std::vector<Diagnostic>& diagnostics);
nlohmann::json to_json(const MarginCurve& curve);
void write_margin_csv(std::ostream& out, const MarginCurve& curve);

// ---- power ----

nlohmann::json to_json(const PowerReport& report);
nlohmann::json to_json(const ClockBudget& budget);
void write_power_table(std::ostream& out, const PowerReport& report);

struct LineDissipation {
    std::string line;
    double p0_dbm = 0.0;
    double ssb_db = 0.0;
    DissipationEstimate estimate;
    DissipationEstimate upper_bound;
    /// 8 + (SSB - 3)/2 dB, the printed shorthand (half-AM case only).
    double ratio_db_rounded = 0.0;
};

struct SidebandChain {
    double am_fraction = 0.5;
    std::vector<LineDissipation> lines;
    double total_w = 0.0;
    PowerReport attribution;
    std::optional<double> chop_fundamental_hz;
};

/// SSB per line -> dissipated power per line -> total -> region shares.
SidebandChain sideband_chain(const MeasurementDescriptor& measurement);
nlohmann::json to_json(const SidebandChain& chain);

// ---- clock network ----

/// `section,impedance_ohm`
void write_transformer_csv(std::ostream& out, const TransformerDesign& design);
/// Two-port sweep, real/imaginary column pairs:
/// `frequency_hz,s11_re,s11_im,s21_re,s21_im,s12_re,s12_im,s22_re,s22_im`
void write_sparam_csv(std::ostream& out, std::span<const SParamPoint> sweep);
nlohmann::json to_json(const TransformerDesign& design);

/// Widest contiguous run of sweep points around f_center with return loss of
/// at least rl_min_db; empty if the point nearest f_center already fails.
std::optional<std::pair<double, double>> matched_band(std::span<const SParamPoint> sweep,
                                                      double f_center_hz, double rl_min_db);

/// Opens `path` for writing or throws IoError.
void write_file(const std::string& path, const std::string& contents);

}  // namespace rql
