#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rql/core.hpp"
#include "rql/power.hpp"

namespace rql {

// All configuration files share one INI layout: `[section]` headers and
// `key = value` lines, `;` or `#` comments, SI units unless a key says
// otherwise (ic_avg is in uA).

/// Gate table. One section per kind, e.g.
///
///   [AndOr]
///   jj_count = 10
///   ic_avg = 162      ; uA
///   seq_depth = 4
///
/// Kinds or keys that are absent keep their defaults.
GateTable parse_gate_table(std::istream& in);
GateTable load_gate_table(const std::string& path);
void write_gate_table(std::ostream& out, const GateTable& table);

/// Scaling scenario, section [scenario]: n_devices, ic_avg (A), frequency
/// (Hz), margin_frac, line_impedance (ohm), phase_chain_junctions, d0 (ps).
ScalingScenario parse_scenario(std::istream& in);
ScalingScenario load_scenario(const std::string& path);

struct LineObservation {
    std::string line;
    double p0_dbm = 0.0;
    double ssb_db = 0.0;
};

/// Sideband measurement descriptor:
///
///   [measurement]
///   f_clock = 6.2e9
///   chop_active = 12000     ; bits
///   chop_zero = 12000
///   am_fraction = 0.5
///   [line:Q]
///   p0_dbm = -2.0           ; or applied_dbm + returned_dbm
///   ssb_db = -69.3
///   [regions]
///   cla = 0.42
struct MeasurementDescriptor {
    double f_clock_hz = 0.0;
    std::optional<std::pair<double, double>> chop;
    double am_fraction = 0.5;
    std::vector<LineObservation> lines;
    std::vector<std::pair<std::string, double>> regions;
};

MeasurementDescriptor parse_measurement(std::istream& in);
MeasurementDescriptor load_measurement(const std::string& path);

}  // namespace rql
