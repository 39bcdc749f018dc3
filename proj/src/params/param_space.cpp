#include "sizer/params/param_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include <spdlog/spdlog.h>

#include "sizer/util/error.hpp"

namespace sizer::params {

using circuit::CircuitTopology;
using circuit::TechnologyNode;

void ParamSpec::validate() const {
    if (!(lower < upper)) {
        throw ConfigError("parameter " + name + ": lower must be < upper");
    }
    if (!(precision > 0.0)) {
        throw ConfigError("parameter " + name + ": precision must be > 0");
    }
    if (scale == Scale::Log && !(lower > 0.0)) {
        throw ConfigError("parameter " + name + ": log scale needs lower > 0");
    }
}

std::uint64_t DesignPoint::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& row : values) {
        for (double v : row) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &v, sizeof(double));
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ULL;
            }
        }
        h ^= 0xff;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

double denormalize(double raw, const ParamSpec& spec) {
    if (!(raw >= -1.0 && raw <= 1.0)) {
        spdlog::warn("raw action {} for {} outside [-1, 1]; clamping", raw, spec.name);
        raw = std::isnan(raw) ? 0.0 : std::clamp(raw, -1.0, 1.0);
    }
    const double t = (raw + 1.0) / 2.0;
    if (spec.scale == Scale::Linear) {
        return std::lerp(spec.lower, spec.upper, t);
    }
    if (t == 0.0) {
        return spec.lower;
    }
    if (t == 1.0) {
        return spec.upper;
    }
    return std::exp(std::lerp(std::log(spec.lower), std::log(spec.upper), t));
}

double normalized_coordinate(double value, const ParamSpec& spec) {
    if (spec.scale == Scale::Linear) {
        return (value - spec.lower) / (spec.upper - spec.lower);
    }
    return (std::log(value) - std::log(spec.lower)) / (std::log(spec.upper) - std::log(spec.lower));
}

double snap_to_grid(double value, const ParamSpec& spec) {
    const double max_index = std::floor((spec.upper - spec.lower) / spec.precision + 1e-9);
    double k = std::nearbyint((value - spec.lower) / spec.precision);
    k = std::clamp(k, 0.0, max_index);
    return spec.lower + k * spec.precision;
}

DesignPoint refine(const DesignPoint& design, const CircuitTopology& topology, const TechnologyNode& tech) {
    if (design.values.size() != topology.size()) {
        throw DimensionError("design has " + std::to_string(design.values.size()) + " components, topology " +
                             std::to_string(topology.size()));
    }
    DesignPoint out;
    out.values.resize(topology.size());
    for (const auto& c : topology.components()) {
        const auto& src = design.values[topology.representative(c.id)];
        const auto& specs = tech.param_specs(c.kind);
        if (src.size() != specs.size() || design.values[c.id].size() != specs.size()) {
            throw DimensionError("component " + c.name + " has the wrong number of parameters");
        }
        auto& row = out.values[c.id];
        row.resize(specs.size());
        for (std::size_t i = 0; i < specs.size(); ++i) {
            row[i] = snap_to_grid(src[i], specs[i]);
        }
    }
    return out;
}

DesignPoint action_to_design(const ActionMatrix& raw, const CircuitTopology& topology,
                             const TechnologyNode& tech) {
    if (raw.rows() != topology.size() || raw.cols() != circuit::kMaxArity) {
        throw DimensionError("action matrix must be " + std::to_string(topology.size()) + "x" +
                             std::to_string(circuit::kMaxArity));
    }
    DesignPoint d;
    d.values.resize(topology.size());
    for (const auto& c : topology.components()) {
        const auto& specs = tech.param_specs(c.kind);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            d.values[c.id].push_back(denormalize(raw(c.id, i), specs[i]));
        }
    }
    return refine(d, topology, tech);
}

bool is_legal(const DesignPoint& design, const CircuitTopology& topology, const TechnologyNode& tech) {
    if (design.values.size() != topology.size()) {
        return false;
    }
    for (const auto& c : topology.components()) {
        const auto& specs = tech.param_specs(c.kind);
        const auto& row = design.values[c.id];
        if (row.size() != specs.size() || row != design.values[topology.representative(c.id)]) {
            return false;
        }
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const double v = row[i];
            if (!(v >= specs[i].lower && v <= specs[i].upper)) {
                return false;
            }
            const double k = (v - specs[i].lower) / specs[i].precision;
            if (std::fabs(k - std::nearbyint(k)) > 1e-6) {
                return false;
            }
        }
    }
    return true;
}

Json design_to_json(const DesignPoint& design, const CircuitTopology& topology) {
    Json doc = Json::object();
    for (const auto& c : topology.components()) {
        Json entry = Json::object();
        const auto names = circuit::parameter_names(c.kind);
        for (std::size_t i = 0; i < names.size(); ++i) {
            entry[std::string(names[i])] = design.values.at(c.id).at(i);
        }
        doc[c.name] = entry;
    }
    return doc;
}

DesignPoint design_from_json(const Json& doc, const CircuitTopology& topology) {
    DesignPoint d;
    d.values.resize(topology.size());
    try {
        for (const auto& c : topology.components()) {
            const Json& entry = doc.at(c.name);
            for (std::string_view name : circuit::parameter_names(c.kind)) {
                d.values[c.id].push_back(entry.at(std::string(name)).get<double>());
            }
        }
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("design document: ") + e.what());
    }
    return d;
}

ActionMatrix random_action(const CircuitTopology& topology, Rng& rng) {
    ActionMatrix a(topology.size(), circuit::kMaxArity);
    for (const auto& c : topology.components()) {
        for (std::size_t i = 0; i < circuit::action_arity(c.kind); ++i) {
            a(c.id, i) = uniform(rng, -1.0, 1.0);
        }
    }
    return a;
}

}  // namespace sizer::params
