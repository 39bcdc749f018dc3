#include "sizer/sim/export.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sizer/util/error.hpp"

namespace sizer::sim {

std::string engineering(double value) {
    if (value == 0.0 || !std::isfinite(value)) {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, value);
        return std::string(buf, res.ptr);
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific);
    const std::string sci(buf, res.ptr);  // [-]d[.ddd]e±XX

    const std::size_t e_pos = sci.find('e');
    std::string mantissa = sci.substr(0, e_pos);
    int exponent = std::stoi(sci.substr(e_pos + 1));
    std::string sign;
    if (mantissa.front() == '-') {
        sign = "-";
        mantissa.erase(0, 1);
    }
    std::string digits;
    for (char ch : mantissa) {
        if (ch != '.') {
            digits += ch;
        }
    }
    const int shift = ((exponent % 3) + 3) % 3;
    const int exp3 = exponent - shift;
    while (static_cast<int>(digits.size()) < shift + 1) {
        digits += '0';
    }
    std::string out = sign + digits.substr(0, shift + 1);
    if (static_cast<int>(digits.size()) > shift + 1) {
        out += '.' + digits.substr(shift + 1);
    }
    return out + "e" + std::to_string(exp3);
}

namespace {

std::string_view unit_of(std::string_view param) {
    if (param == "W" || param == "L") {
        return "m";
    }
    if (param == "r") {
        return "ohm";
    }
    if (param == "c") {
        return "F";
    }
    return "";
}

std::string format_value(std::string_view param, double v) {
    if (param == "M") {
        char buf[32];
        const auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    }
    return engineering(v) + std::string(unit_of(param));
}

}  // namespace

std::string export_netlist(const circuit::CircuitTopology& topology, const params::DesignPoint& design,
                           const circuit::TechnologyNode& tech) {
    if (design.values.size() != topology.size()) {
        throw DimensionError("design does not match topology " + topology.name());
    }
    std::ostringstream out;
    out << "# technology " << tech.name() << "\n";
    out << "# units: W, L in m; M count; r in ohm; c in F\n";
    out << ".title " << topology.name() << "\n";
    if (!topology.global_nets().empty()) {
        out << ".global";
        for (const auto& n : topology.global_nets()) {
            out << ' ' << n;
        }
        out << "\n";
    }
    for (const auto& s : topology.stages()) {
        out << ".stage " << s.name << " driver=";
        for (std::size_t i = 0; i < s.drivers.size(); ++i) {
            out << (i ? "," : "") << s.drivers[i];
        }
        if (!s.loads.empty()) {
            out << " load=";
            for (std::size_t i = 0; i < s.loads.size(); ++i) {
                out << (i ? "," : "") << s.loads[i];
            }
        }
        out << "\n";
    }
    for (const auto& c : topology.components()) {
        out << c.name << ' ' << circuit::kind_token(c.kind);
        for (const auto& n : c.nets) {
            out << ' ' << n;
        }
        if (c.matching_group) {
            out << " group=" << *c.matching_group;
        }
        out << "\n";
    }
    for (const auto& c : topology.components()) {
        out << "param " << c.name;
        const auto names = circuit::parameter_names(c.kind);
        const auto& row = design.values[c.id];
        if (row.size() != names.size()) {
            throw DimensionError("component " + c.name + " has the wrong number of parameters");
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
            out << ' ' << names[i] << '=' << format_value(names[i], row[i]);
        }
        out << "\n";
    }
    return out.str();
}

params::DesignPoint design_from_param_lines(const circuit::NetlistDocument& doc) {
    const auto& topo = doc.topology;
    params::DesignPoint d;
    d.values.resize(topo.size());
    for (const auto& c : topo.components()) {
        const auto it = doc.params.find(c.name);
        if (it == doc.params.end()) {
            throw ConfigError("no param line for component " + c.name);
        }
        for (std::string_view name : circuit::parameter_names(c.kind)) {
            const auto p = it->second.find(std::string(name));
            if (p == it->second.end()) {
                throw ConfigError("component " + c.name + " lacks parameter " + std::string(name));
            }
            d.values[c.id].push_back(p->second);
        }
    }
    return d;
}

}  // namespace sizer::sim
