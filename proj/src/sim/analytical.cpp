#include "sizer/sim/analytical.hpp"

#include <cmath>
#include <numbers>

#include "sizer/util/error.hpp"

namespace sizer::sim {

using circuit::ComponentKind;

namespace {

bool is_mos(ComponentKind k) { return k == ComponentKind::Nmos || k == ComponentKind::Pmos; }

}  // namespace

double mos_gm(double w, double l, double m, const AnalyticalConstants& c) {
    return c.k_gm * std::sqrt((w / l) * m);
}

double mos_ro(double w, double l, double m, const AnalyticalConstants& c) { return c.k_ro * l / (w * m); }

double mos_current(double w, double l, double m) { return (w / l) * m * 1e-6; }

AnalyticalAmpModel::AnalyticalAmpModel(AnalyticalConstants constants) : constants_(constants) {
    const auto& c = constants_;
    if (!(c.k_gm > 0 && c.k_ro > 0 && c.v_dd > 0 && c.c_load > 0 && c.k_noise > 0)) {
        throw ConfigError("analytical model constants must be positive");
    }
}

std::vector<std::string> AnalyticalAmpModel::metric_names() const {
    return {"BW", "Gain", "Power", "Noise", "GBW"};
}

Metrics AnalyticalAmpModel::evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode&,
                                     const params::DesignPoint& design) {
    if (topology.stages().empty()) {
        throw ConfigError("analytical model needs .stage definitions in netlist " + topology.name());
    }
    if (design.values.size() != topology.size()) {
        throw ConfigError("design does not match topology " + topology.name());
    }
    const auto& k = constants_;

    double power_current = 0.0;
    double inv_gm_sum = 0.0;
    for (const auto& comp : topology.components()) {
        if (!is_mos(comp.kind)) {
            continue;
        }
        const auto& v = design.values[comp.id];
        power_current += mos_current(v[0], v[1], v[2]);
        inv_gm_sum += 1.0 / mos_gm(v[0], v[1], v[2], k);
    }

    double gain = 1.0;
    double tau = 0.0;
    const auto& stages = topology.stages();
    for (std::size_t s = 0; s < stages.size(); ++s) {
        const auto& stage = stages[s];
        double gm_sum = 0.0;
        double ro_sum = 0.0;
        for (const std::string& name : stage.drivers) {
            const auto& comp = topology.component(*topology.find(name));
            if (!is_mos(comp.kind)) {
                throw ConfigError("stage " + stage.name + ": driver " + name + " is not a transistor");
            }
            const auto& v = design.values[comp.id];
            gm_sum += mos_gm(v[0], v[1], v[2], k);
            ro_sum += mos_ro(v[0], v[1], v[2], k);
        }
        const double drivers = static_cast<double>(stage.drivers.size());
        double conductance = drivers / ro_sum;
        double cap = 0.0;
        for (const std::string& name : stage.loads) {
            const auto& comp = topology.component(*topology.find(name));
            const auto& v = design.values[comp.id];
            switch (comp.kind) {
                case ComponentKind::Resistor:
                    conductance += 1.0 / v[0];
                    break;
                case ComponentKind::Capacitor:
                    cap += v[0];
                    break;
                default:
                    conductance += 1.0 / mos_ro(v[0], v[1], v[2], k);
                    break;
            }
        }
        const double r_stage = 1.0 / conductance;
        gain *= (gm_sum / drivers) * r_stage;
        tau += r_stage * (s + 1 == stages.size() ? k.c_load + cap : cap);
    }

    const double bw = 1.0 / (2.0 * std::numbers::pi * tau);
    Metrics m;
    m["BW"] = bw;
    m["Gain"] = gain;
    m["Power"] = k.v_dd * power_current;
    m["Noise"] = k.k_noise * std::sqrt(inv_gm_sum);
    m["GBW"] = gain * bw;
    for (const auto& [name, value] : m) {
        if (!std::isfinite(value) || !(value > 0.0)) {
            throw EvaluationError("analytical model produced invalid " + name);
        }
    }
    return m;
}

}  // namespace sizer::sim
