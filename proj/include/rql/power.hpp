#pragma once

#include <array>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rql/core.hpp"
#include "rql/netlist.hpp"
#include "rql/wavesim.hpp"

namespace rql {

/// Flux quantum h/2e in V*s.
inline constexpr double kFluxQuantum = 2.068e-15;
/// Empirical energy prefactor of the RQL dynamic power model.
inline constexpr double kPowerPrefactor = 0.33;

/// P = 0.33 * Ic * Phi0 * N * f, all SI (A, count, Hz) -> W.
double dynamic_power(double ic_avg_a, double junctions, double frequency_hz);

/// Energy dissipated when one junction of critical current ic_a switches.
double switching_energy(double ic_a);

struct ActivityPower {
    double total_w = 0.0;
    std::array<double, 2> per_line_w{};  // indexed by ClockLine
    std::size_t cycles = 0;
};

/// Activity-weighted power. A gate output carrying a one switches
/// jj_count / (loaded outputs) of the gate's junctions, so a trace where every
/// output fires every cycle reproduces dynamic_power exactly.
ActivityPower activity_power(const SimTrace& trace, const Netlist& netlist, double frequency_hz);

struct PowerReport {
    double p_dynamic_w = 0.0;
    std::map<std::string, double> per_line_w;
    std::map<std::string, double> per_region_w;
    std::map<std::string, double> region_fraction;
    // Echoed model parameters (0 when not applicable).
    double ic_avg_a = 0.0;
    double junctions = 0.0;
    double frequency_hz = 0.0;
};

/// Splits a measured total over regions by their share of critical current.
/// Line totals pass through unchanged. Throws ParameterError if any fraction
/// is outside [0, 1] or they sum above 1.
PowerReport attribute_power(const std::map<std::string, double>& per_line_w,
                            const std::vector<std::pair<std::string, double>>& region_fractions);

struct ScalingScenario {
    double n_devices = 2e6;
    double ic_avg_a = 100e-6;
    double frequency_hz = 10e9;
    /// Tolerated clock-current excursion, +/-.
    double margin_frac = 0.10;
    double line_impedance_ohm = 50.0;
    /// Junctions on the longest single-phase path.
    int phase_chain_junctions = 8;
    double d0_ps = kNominalJunctionDelayPs;
};

void check_scenario(const ScalingScenario& s);

struct ClockBudget {
    double p_dissipated_w = 0.0;
    double p_applied_w = 0.0;
    double line_current_rms_a = 0.0;
    double timing_variation_ps = 0.0;
};

/// Applied power such that the clock current seen by the first and last
/// gate on a series-powered line stays within (1 +/- margin) of nominal while
/// the circuit draws p_dissipated from it:
///   P_applied = P_dissipated / (1 - ((1 - m) / (1 + m))^2).
double applied_power_for(double p_dissipated_w, double margin_frac);

/// rms current of `power_w` on a matched line of impedance z_ohm.
double line_current_rms(double power_w, double z_ohm);

ClockBudget clock_budget(const ScalingScenario& scenario);

/// rms feed current when n_lines lines of impedance z_line each carry a
/// sinusoid of peak amplitude `amplitude_a`, recombined onto a z_feed line.
double clock_feed_current_rms(int n_lines, double amplitude_a, double z_line_ohm, double z_feed_ohm);

/// Static dissipation of one RSFQ bias resistor: I * V.
double rsfq_static_equivalent(double bias_current_a = 200e-6, double bus_voltage_v = 2.6e-3);

/// Room-temperature wall-plug multiplier for 4 K cooling, report text only.
inline constexpr double kCryocoolerWattsPerWatt = 1000.0;

}  // namespace rql
