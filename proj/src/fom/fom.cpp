#include "sizer/fom/fom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <spdlog/spdlog.h>

#include "sizer/util/error.hpp"
#include "sizer/util/rng.hpp"

namespace sizer::fom {

void FomConfig::validate() const {
    std::set<std::string> names;
    for (const MetricSpec& m : metrics) {
        if (!names.insert(m.name).second) {
            throw ConfigError("duplicate metric " + m.name);
        }
        if (!(m.m_max > m.m_min)) {
            throw ConfigError("metric " + m.name + ": max must exceed min");
        }
        if (m.m_bound && !(*m.m_bound >= m.m_min)) {
            throw ConfigError("metric " + m.name + ": bound below min");
        }
        if (!std::isfinite(m.weight)) {
            throw ConfigError("metric " + m.name + ": non-finite weight");
        }
    }
    if (!(violation_penalty < 0.0)) {
        throw ConfigError("violation penalty must be negative");
    }
    for (const HardSpec& s : specs) {
        if (!names.contains(s.metric)) {
            throw ConfigError("spec references unknown metric " + s.metric);
        }
    }
}

const MetricSpec* FomConfig::find(const std::string& name) const {
    for (const MetricSpec& m : metrics) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

namespace {

double lookup(const sim::Metrics& measured, const std::string& name) {
    const auto it = measured.find(name);
    if (it == measured.end()) {
        throw ConfigError("measured metrics lack " + name);
    }
    if (!std::isfinite(it->second)) {
        throw NumericError("metric " + name + " is not finite");
    }
    return it->second;
}

}  // namespace

double compute_fom(const sim::Metrics& measured, const FomConfig& config) {
    std::vector<double> values;
    values.reserve(config.metrics.size());
    for (const MetricSpec& m : config.metrics) {
        values.push_back(lookup(measured, m.name));
    }
    for (const HardSpec& s : config.specs) {
        if (!s.satisfied_by(lookup(measured, s.metric))) {
            return config.violation_penalty;
        }
    }
    double total = 0.0;
    for (std::size_t i = 0; i < config.metrics.size(); ++i) {
        const MetricSpec& m = config.metrics[i];
        const double v = m.m_bound ? std::min(values[i], *m.m_bound) : values[i];
        total += m.weight * (v - m.m_min) / (m.m_max - m.m_min);
    }
    return total;
}

Evaluation evaluate_design(sim::SimulatorBackend& backend, const circuit::CircuitTopology& topology,
                           const circuit::TechnologyNode& tech, const params::DesignPoint& design,
                           const FomConfig& config) {
    try {
        return {compute_fom(backend.evaluate(topology, tech, design), config), false};
    } catch (const EvaluationError& e) {
        spdlog::warn("simulation failed ({}), scoring the design with the violation penalty", e.what());
    } catch (const NumericError& e) {
        spdlog::warn("non-finite metric ({}), scoring the design with the violation penalty", e.what());
    }
    return {config.violation_penalty, true};
}

std::map<std::string, NormalizerRange> calibrate_normalizers(sim::SimulatorBackend& backend,
                                                             const circuit::CircuitTopology& topology,
                                                             const circuit::TechnologyNode& tech,
                                                             std::size_t sample_count, std::uint64_t seed) {
    if (sample_count < 2) {
        throw ConfigError("calibration needs at least 2 samples");
    }
    Rng rng(sub_seed(seed, "calibrate"));
    // Draw every design up front so the result is independent of evaluation order.
    std::vector<params::DesignPoint> designs;
    designs.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) {
        designs.push_back(params::action_to_design(params::random_action(topology, rng), topology, tech));
    }

    std::map<std::string, NormalizerRange> ranges;
    for (const std::string& name : backend.metric_names()) {
        ranges[name] = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    }
    std::size_t failures = 0;
    for (const auto& d : designs) {
        sim::Metrics m;
        try {
            m = backend.evaluate(topology, tech, d);
        } catch (const EvaluationError&) {
            ++failures;
            continue;
        }
        for (auto& [name, r] : ranges) {
            const auto it = m.find(name);
            if (it == m.end() || !std::isfinite(it->second)) {
                throw CalibrationError("backend did not report a finite " + name);
            }
            r.m_min = std::min(r.m_min, it->second);
            r.m_max = std::max(r.m_max, it->second);
        }
    }
    if (2 * failures > sample_count) {
        throw CalibrationError("backend failed on " + std::to_string(failures) + " of " +
                               std::to_string(sample_count) + " calibration samples");
    }
    for (const auto& [name, r] : ranges) {
        if (!(r.m_max > r.m_min)) {
            throw CalibrationError("degenerate normalizer for metric " + name + " (min == max)");
        }
    }
    return ranges;
}

FomConfig with_normalizers(FomConfig config, const std::map<std::string, NormalizerRange>& ranges) {
    for (MetricSpec& m : config.metrics) {
        const auto it = ranges.find(m.name);
        if (it == ranges.end()) {
            throw ConfigError("no calibrated range for metric " + m.name);
        }
        m.m_min = it->second.m_min;
        m.m_max = it->second.m_max;
    }
    return config;
}

FomConfig fom_config_from_json(const Json& doc, bool require_normalizers) {
    FomConfig cfg;
    try {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (const Json& m : doc.at("metrics")) {
            MetricSpec spec;
            spec.name = m.at("name").get<std::string>();
            spec.weight = m.value("weight", 1.0);
            if (require_normalizers || (m.contains("min") && m.contains("max"))) {
                spec.m_min = m.at("min").get<double>();
                spec.m_max = m.at("max").get<double>();
            } else {
                spec.m_min = nan;
                spec.m_max = nan;
            }
            if (m.contains("bound") && !m.at("bound").is_null()) {
                spec.m_bound = m.at("bound").get<double>();
            }
            cfg.metrics.push_back(spec);
        }
        if (doc.contains("specs")) {
            for (const Json& s : doc.at("specs")) {
                HardSpec spec;
                spec.metric = s.at("metric").get<std::string>();
                const std::string rel = s.at("relation").get<std::string>();
                if (rel == ">=") {
                    spec.relation = Relation::AtLeast;
                } else if (rel == "<=") {
                    spec.relation = Relation::AtMost;
                } else {
                    throw ConfigError("spec relation must be \">=\" or \"<=\", got " + rel);
                }
                spec.threshold = s.at("threshold").get<double>();
                cfg.specs.push_back(spec);
            }
        }
        cfg.violation_penalty = doc.value("violation_penalty", -1.0);
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("FoM config: ") + e.what());
    }
    if (require_normalizers) {
        cfg.validate();
    }
    return cfg;
}

Json fom_config_to_json(const FomConfig& config) {
    Json doc;
    doc["metrics"] = Json::array();
    for (const MetricSpec& m : config.metrics) {
        Json entry = {{"name", m.name}, {"weight", m.weight}};
        if (std::isfinite(m.m_min) && std::isfinite(m.m_max)) {
            entry["min"] = m.m_min;
            entry["max"] = m.m_max;
        }
        if (m.m_bound) {
            entry["bound"] = *m.m_bound;
        }
        doc["metrics"].push_back(entry);
    }
    doc["specs"] = Json::array();
    for (const HardSpec& s : config.specs) {
        doc["specs"].push_back({{"metric", s.metric},
                                {"relation", s.relation == Relation::AtLeast ? ">=" : "<="},
                                {"threshold", s.threshold}});
    }
    doc["violation_penalty"] = config.violation_penalty;
    return doc;
}

FomConfig load_fom_config(const std::filesystem::path& path, bool require_normalizers) {
    try {
        return fom_config_from_json(read_json_file(path), require_normalizers);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace sizer::fom
