#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "sizer/circuit/topology.hpp"
#include "sizer/params/param_spec.hpp"
#include "sizer/util/json_io.hpp"

namespace sizer::circuit {

inline constexpr std::size_t kFeatureCount = 5;

/// Device model features used in the state vector (zero for R and C).
struct DeviceModelFeatures {
    double v_sat = 0.0;
    double v_th0 = 0.0;
    double v_fb = 0.0;
    double mu0 = 0.0;
    double u_c = 0.0;

    [[nodiscard]] std::array<double, kFeatureCount> as_array() const { return {v_sat, v_th0, v_fb, mu0, u_c}; }
    [[nodiscard]] bool all_zero() const { return v_sat == 0 && v_th0 == 0 && v_fb == 0 && mu0 == 0 && u_c == 0; }
};

class TechnologyNode {
public:
    TechnologyNode() = default;
    TechnologyNode(std::string name, std::array<DeviceModelFeatures, kKindCount> features,
                   std::array<std::vector<params::ParamSpec>, kKindCount> param_specs);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const DeviceModelFeatures& features(ComponentKind k) const {
        return features_[kind_index(k)];
    }
    /// Specs in action order (W, L, M or r or c).
    [[nodiscard]] const std::vector<params::ParamSpec>& param_specs(ComponentKind k) const {
        return specs_[kind_index(k)];
    }
    [[nodiscard]] const params::ParamSpec& param_spec(ComponentKind k, std::size_t index) const {
        return specs_[kind_index(k)].at(index);
    }

private:
    std::string name_;
    std::array<DeviceModelFeatures, kKindCount> features_{};
    std::array<std::vector<params::ParamSpec>, kKindCount> specs_{};
};

TechnologyNode technology_from_json(const Json& doc);
Json technology_to_json(const TechnologyNode& tech);
TechnologyNode load_technology(const std::filesystem::path& path);

}  // namespace sizer::circuit
