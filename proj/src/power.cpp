#include "rql/power.hpp"

#include <cmath>

#include "rql/error.hpp"

namespace rql {

double dynamic_power(double ic_avg_a, double junctions, double frequency_hz) {
    if (ic_avg_a < 0.0 || junctions < 0.0 || frequency_hz < 0.0) {
        throw ParameterError("dynamic_power arguments must be non-negative");
    }
    return kPowerPrefactor * ic_avg_a * kFluxQuantum * junctions * frequency_hz;
}

double switching_energy(double ic_a) { return kPowerPrefactor * ic_a * kFluxQuantum; }

ActivityPower activity_power(const SimTrace& trace, const Netlist& nl, double frequency_hz) {
    if (!(frequency_hz > 0.0)) throw ParameterError("frequency must be positive");
    if (trace.gate_events.size() != nl.gates.size()) {
        throw ParameterError("trace does not belong to this netlist");
    }
    ActivityPower p;
    p.cycles = trace.cycles();
    if (p.cycles == 0) return p;
    const auto loads = nl.loads();
    for (const auto& g : nl.gates) {
        const std::uint64_t events = trace.gate_events[g.id];
        if (events == 0 || g.spec.jj_count == 0) continue;
        int loaded = 0;
        for (const auto& pin : loads[g.id]) loaded += pin.empty() ? 0 : 1;
        if (loaded == 0) continue;
        const double jj_per_event = static_cast<double>(g.spec.jj_count) / loaded;
        const double energy = static_cast<double>(events) * jj_per_event * switching_energy(g.spec.ic_avg_ua * 1e-6);
        const double watts = energy * frequency_hz / static_cast<double>(p.cycles);
        p.total_w += watts;
        const ClockLine line = g.phase >= 0 ? PhaseSlot::from_index(g.phase).line : ClockLine::I;
        p.per_line_w[static_cast<std::size_t>(line)] += watts;
    }
    return p;
}

PowerReport attribute_power(const std::map<std::string, double>& per_line_w,
                            const std::vector<std::pair<std::string, double>>& region_fractions) {
    PowerReport rep;
    for (const auto& [line, w] : per_line_w) {
        rep.per_line_w[line] = w;
        rep.p_dynamic_w += w;
    }
    double sum = 0.0;
    for (const auto& [region, frac] : region_fractions) {
        if (!(frac >= 0.0 && frac <= 1.0)) {
            throw ParameterError("region fraction for '" + region + "' must lie in [0, 1]");
        }
        sum += frac;
    }
    if (sum > 1.0 + 1e-12) throw ParameterError("region fractions sum above 1");
    for (const auto& [region, frac] : region_fractions) {
        rep.region_fraction[region] = frac;
        rep.per_region_w[region] = frac * rep.p_dynamic_w;
    }
    return rep;
}

void check_scenario(const ScalingScenario& s) {
    if (!(s.n_devices > 0 && s.ic_avg_a > 0 && s.frequency_hz > 0 && s.line_impedance_ohm > 0 &&
          s.d0_ps > 0 && s.phase_chain_junctions > 0)) {
        throw ParameterError("scaling scenario values must be positive");
    }
    if (!(s.margin_frac > 0.0 && s.margin_frac < 1.0)) {
        throw ParameterError("margin_frac must lie in (0, 1)");
    }
}

double applied_power_for(double p_dissipated_w, double margin_frac) {
    if (!(margin_frac > 0.0 && margin_frac < 1.0)) throw ParameterError("margin_frac must lie in (0, 1)");
    const double tail = (1.0 - margin_frac) / (1.0 + margin_frac);
    return p_dissipated_w / (1.0 - tail * tail);
}

double line_current_rms(double power_w, double z_ohm) {
    if (power_w < 0.0 || !(z_ohm > 0.0)) throw ParameterError("line current needs P >= 0 and Z > 0");
    return std::sqrt(power_w / z_ohm);
}

ClockBudget clock_budget(const ScalingScenario& s) {
    check_scenario(s);
    ClockBudget b;
    b.p_dissipated_w = dynamic_power(s.ic_avg_a, s.n_devices, s.frequency_hz);
    b.p_applied_w = applied_power_for(b.p_dissipated_w, s.margin_frac);
    b.line_current_rms_a = line_current_rms(b.p_applied_w, s.line_impedance_ohm);
    b.timing_variation_ps =
        chain_delay_spread(s.phase_chain_junctions, 1.0 - s.margin_frac, 1.0 + s.margin_frac, s.d0_ps);
    return b;
}

double clock_feed_current_rms(int n_lines, double amplitude_a, double z_line_ohm, double z_feed_ohm) {
    if (n_lines < 1 || !(amplitude_a >= 0.0) || !(z_line_ohm > 0.0) || !(z_feed_ohm > 0.0)) {
        throw ParameterError("clock feed needs positive line count and impedances");
    }
    const double i_rms = amplitude_a / std::sqrt(2.0);
    const double power = n_lines * i_rms * i_rms * z_line_ohm;
    return std::sqrt(power / z_feed_ohm);
}

double rsfq_static_equivalent(double bias_current_a, double bus_voltage_v) {
    return bias_current_a * bus_voltage_v;
}

}  // namespace rql
