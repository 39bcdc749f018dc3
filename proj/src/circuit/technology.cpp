#include "sizer/circuit/technology.hpp"

#include <cmath>

#include "sizer/util/error.hpp"

namespace sizer::circuit {

TechnologyNode::TechnologyNode(std::string name, std::array<DeviceModelFeatures, kKindCount> features,
                               std::array<std::vector<params::ParamSpec>, kKindCount> param_specs)
    : name_(std::move(name)), features_(features), specs_(std::move(param_specs)) {
    for (ComponentKind k : kAllKinds) {
        const auto& f = features_[kind_index(k)];
        for (double v : f.as_array()) {
            if (!std::isfinite(v)) {
                throw ConfigError(name_ + ": non-finite model feature for " + std::string(kind_token(k)));
            }
        }
        if ((k == ComponentKind::Resistor || k == ComponentKind::Capacitor) && !f.all_zero()) {
            throw ConfigError(name_ + ": model features of " + std::string(kind_token(k)) +
                              " must be zero");
        }
        const auto names = parameter_names(k);
        const auto& specs = specs_[kind_index(k)];
        if (specs.size() != names.size()) {
            throw ConfigError(name_ + ": " + std::string(kind_token(k)) + " needs parameters W/L/M or r/c");
        }
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (specs[i].name != names[i]) {
                throw ConfigError(name_ + ": expected parameter " + std::string(names[i]) + " for " +
                                  std::string(kind_token(k)));
            }
            specs[i].validate();
        }
    }
    if (features_[kind_index(ComponentKind::Nmos)].all_zero() &&
        features_[kind_index(ComponentKind::Pmos)].all_zero()) {
        throw ConfigError(name_ + ": NMOS and PMOS model features are both zero");
    }
}

TechnologyNode technology_from_json(const Json& doc) {
    try {
        const std::string name = doc.at("name").get<std::string>();
        std::array<DeviceModelFeatures, kKindCount> features{};
        std::array<std::vector<params::ParamSpec>, kKindCount> specs{};
        for (ComponentKind k : kAllKinds) {
            const std::string token(kind_token(k));
            const Json& f = doc.at("features").at(token);
            auto& out = features[kind_index(k)];
            out.v_sat = f.at("v_sat").get<double>();
            out.v_th0 = f.at("v_th0").get<double>();
            out.v_fb = f.at("v_fb").get<double>();
            out.mu0 = f.at("mu0").get<double>();
            out.u_c = f.at("u_c").get<double>();

            const Json& p = doc.at("params").at(token);
            for (std::string_view pname : parameter_names(k)) {
                const Json& s = p.at(std::string(pname));
                params::ParamSpec spec;
                spec.name = std::string(pname);
                spec.lower = s.at("lower").get<double>();
                spec.upper = s.at("upper").get<double>();
                spec.precision = s.at("precision").get<double>();
                const std::string scale = s.value("scale", "linear");
                if (scale == "log") {
                    spec.scale = params::Scale::Log;
                } else if (scale == "linear") {
                    spec.scale = params::Scale::Linear;
                } else {
                    throw ConfigError("unknown scale '" + scale + "'");
                }
                specs[kind_index(k)].push_back(spec);
            }
        }
        return TechnologyNode(name, features, std::move(specs));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("technology file: ") + e.what());
    }
}

Json technology_to_json(const TechnologyNode& tech) {
    Json doc;
    doc["name"] = tech.name();
    for (ComponentKind k : kAllKinds) {
        const std::string token(kind_token(k));
        const auto& f = tech.features(k);
        doc["features"][token] = {{"v_sat", f.v_sat}, {"v_th0", f.v_th0}, {"v_fb", f.v_fb},
                                  {"mu0", f.mu0},     {"u_c", f.u_c}};
        for (const auto& s : tech.param_specs(k)) {
            doc["params"][token][s.name] = {{"lower", s.lower},
                                            {"upper", s.upper},
                                            {"precision", s.precision},
                                            {"scale", s.scale == params::Scale::Log ? "log" : "linear"}};
        }
    }
    return doc;
}

TechnologyNode load_technology(const std::filesystem::path& path) {
    try {
        return technology_from_json(read_json_file(path));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

}  // namespace sizer::circuit
