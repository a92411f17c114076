#include "rql/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "rql/error.hpp"
#include "rql/rf.hpp"

namespace rql {

namespace pt = boost::property_tree;

namespace {

pt::ptree read_ini(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return tree;
}

template <typename T>
T value_as(const std::string& section, const std::string& key, const pt::ptree& node) {
    // the INI reader only strips whole-line comments
    std::string raw = node.data();
    raw = raw.substr(0, raw.find_first_of(";#"));
    raw.erase(raw.find_last_not_of(" \t\r") + 1);
    try {
        return pt::ptree(raw).get_value<T>();
    } catch (const pt::ptree_bad_data&) {
        throw ConfigError("[" + section + "] " + key + ": bad value '" + node.data() + "'");
    }
}

void reject_unknown(const std::string& section, const pt::ptree& node,
                    const std::set<std::string>& allowed) {
    for (const auto& [key, child] : node) {
        if (!allowed.count(key)) throw ConfigError("[" + section + "] unknown key '" + key + "'");
    }
}

std::ifstream open(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

}  // namespace

GateTable parse_gate_table(std::istream& in) {
    const pt::ptree tree = read_ini(in);
    GateTable table;
    for (const auto& [section, node] : tree) {
        const auto kind = parse_gate_kind(section);
        if (!kind) throw ConfigError("unknown gate kind section [" + section + "]");
        reject_unknown(section, node, {"jj_count", "ic_avg", "seq_depth"});
        GateSpec spec = table[*kind];
        if (auto v = node.get_child_optional("jj_count")) spec.jj_count = value_as<int>(section, "jj_count", *v);
        if (auto v = node.get_child_optional("ic_avg")) spec.ic_avg_ua = value_as<double>(section, "ic_avg", *v);
        if (auto v = node.get_child_optional("seq_depth")) spec.seq_depth = value_as<int>(section, "seq_depth", *v);
        table.set(spec);
    }
    return table;
}

GateTable load_gate_table(const std::string& path) {
    auto in = open(path);
    return parse_gate_table(in);
}

void write_gate_table(std::ostream& out, const GateTable& table) {
    out << "; RQL gate table: jj_count, ic_avg (uA), seq_depth (junctions on the signal path)\n";
    for (GateKind kind : kAllGateKinds) {
        const GateSpec& s = table[kind];
        out << '[' << to_string(kind) << "]\n"
            << "jj_count = " << s.jj_count << '\n'
            << "ic_avg = " << s.ic_avg_ua << '\n'
            << "seq_depth = " << s.seq_depth << "\n\n";
    }
}

ScalingScenario parse_scenario(std::istream& in) {
    const pt::ptree tree = read_ini(in);
    ScalingScenario s;
    for (const auto& [section, node] : tree) {
        if (section != "scenario") throw ConfigError("unknown scenario section [" + section + "]");
        reject_unknown(section, node,
                       {"n_devices", "ic_avg", "frequency", "margin_frac", "line_impedance",
                        "phase_chain_junctions", "d0"});
        for (const auto& [key, child] : node) {
            if (key == "n_devices") s.n_devices = value_as<double>(section, key, child);
            else if (key == "ic_avg") s.ic_avg_a = value_as<double>(section, key, child);
            else if (key == "frequency") s.frequency_hz = value_as<double>(section, key, child);
            else if (key == "margin_frac") s.margin_frac = value_as<double>(section, key, child);
            else if (key == "line_impedance") s.line_impedance_ohm = value_as<double>(section, key, child);
            else if (key == "phase_chain_junctions") s.phase_chain_junctions = value_as<int>(section, key, child);
            else if (key == "d0") s.d0_ps = value_as<double>(section, key, child);
        }
    }
    check_scenario(s);
    return s;
}

ScalingScenario load_scenario(const std::string& path) {
    auto in = open(path);
    return parse_scenario(in);
}

MeasurementDescriptor parse_measurement(std::istream& in) {
    const pt::ptree tree = read_ini(in);
    MeasurementDescriptor m;
    std::optional<double> active, zero;
    for (const auto& [section, node] : tree) {
        if (section == "measurement") {
            reject_unknown(section, node, {"f_clock", "chop_active", "chop_zero", "am_fraction"});
            for (const auto& [key, child] : node) {
                const double v = value_as<double>(section, key, child);
                if (key == "f_clock") m.f_clock_hz = v;
                else if (key == "chop_active") active = v;
                else if (key == "chop_zero") zero = v;
                else if (key == "am_fraction") m.am_fraction = v;
            }
        } else if (section.rfind("line:", 0) == 0) {
            reject_unknown(section, node, {"p0_dbm", "applied_dbm", "returned_dbm", "ssb_db"});
            LineObservation obs;
            obs.line = section.substr(5);
            const auto p0 = node.get_child_optional("p0_dbm");
            const auto applied = node.get_child_optional("applied_dbm");
            const auto returned = node.get_child_optional("returned_dbm");
            if (p0) {
                obs.p0_dbm = value_as<double>(section, "p0_dbm", *p0);
            } else if (applied && returned) {
                obs.p0_dbm = geometric_mean_dbm(value_as<double>(section, "applied_dbm", *applied),
                                                value_as<double>(section, "returned_dbm", *returned));
            } else {
                throw ConfigError("[" + section + "] needs p0_dbm or applied_dbm + returned_dbm");
            }
            const auto ssb = node.get_child_optional("ssb_db");
            if (!ssb) throw ConfigError("[" + section + "] missing ssb_db");
            obs.ssb_db = value_as<double>(section, "ssb_db", *ssb);
            m.lines.push_back(obs);
        } else if (section == "regions") {
            for (const auto& [key, child] : node) m.regions.emplace_back(key, value_as<double>(section, key, child));
        } else {
            throw ConfigError("unknown measurement section [" + section + "]");
        }
    }
    if (active.has_value() != zero.has_value()) throw ConfigError("chop needs both chop_active and chop_zero");
    if (active) m.chop = std::make_pair(*active, *zero);
    if (m.lines.empty()) throw ConfigError("measurement descriptor lists no clock lines");
    return m;
}

MeasurementDescriptor load_measurement(const std::string& path) {
    auto in = open(path);
    return parse_measurement(in);
}

}  // namespace rql
