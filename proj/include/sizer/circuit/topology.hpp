#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sizer/nn/matrix.hpp"

namespace sizer::circuit {

enum class ComponentKind { Nmos, Pmos, Resistor, Capacitor };

inline constexpr std::array<ComponentKind, 4> kAllKinds{ComponentKind::Nmos, ComponentKind::Pmos,
                                                        ComponentKind::Resistor,
                                                        ComponentKind::Capacitor};
inline constexpr std::size_t kKindCount = kAllKinds.size();
inline constexpr std::size_t kMaxArity = 3;

constexpr std::size_t kind_index(ComponentKind k) { return static_cast<std::size_t>(k); }

/// Number of sized parameters: W, L, M for transistors; r or c otherwise.
constexpr std::size_t action_arity(ComponentKind k) {
    return (k == ComponentKind::Nmos || k == ComponentKind::Pmos) ? 3 : 1;
}

/// Parameter names in action order.
std::vector<std::string_view> parameter_names(ComponentKind k);

/// Netlist token: nmos | pmos | res | cap.
std::string_view kind_token(ComponentKind k);
std::optional<ComponentKind> kind_from_token(std::string_view token);

struct Component {
    std::size_t id = 0;
    ComponentKind kind = ComponentKind::Nmos;
    std::string name;
    std::optional<std::string> matching_group;
    std::vector<std::string> nets;
};

/// Ordered component groups of one amplifier stage, used by the analytical
/// evaluator. Not part of the graph.
struct StageSpec {
    std::string name;
    std::vector<std::string> drivers;
    std::vector<std::string> loads;
};

/// Components as vertices, shared (non-global) nets as edges.
class CircuitTopology {
public:
    CircuitTopology() = default;

    /// Builds the edge set from shared nets (excluding global nets) and
    /// validates ids, names and matching groups. Logs a warning when the
    /// resulting graph is disconnected.
    CircuitTopology(std::string name, std::vector<Component> components,
                    std::vector<std::string> global_nets = {}, std::vector<StageSpec> stages = {});

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] std::size_t size() const noexcept { return components_.size(); }
    [[nodiscard]] const std::vector<Component>& components() const noexcept { return components_; }
    [[nodiscard]] const Component& component(std::size_t id) const { return components_.at(id); }
    [[nodiscard]] const std::vector<std::pair<std::size_t, std::size_t>>& edges() const noexcept {
        return edges_;
    }
    [[nodiscard]] const std::vector<std::string>& global_nets() const noexcept { return global_nets_; }
    [[nodiscard]] const std::vector<StageSpec>& stages() const noexcept { return stages_; }

    [[nodiscard]] std::optional<std::size_t> find(std::string_view component_name) const;
    [[nodiscard]] bool has_edge(std::size_t a, std::size_t b) const;
    [[nodiscard]] bool connected() const;

    /// Lowest-id member of the component's matching group (itself if unmatched).
    [[nodiscard]] std::size_t representative(std::size_t id) const { return representative_.at(id); }

    /// Ids of components of each kind, ascending.
    [[nodiscard]] const std::vector<std::size_t>& ids_of(ComponentKind k) const {
        return ids_by_kind_[kind_index(k)];
    }

private:
    std::string name_;
    std::vector<Component> components_;
    std::vector<std::pair<std::size_t, std::size_t>> edges_;  // (a, b) with a < b, sorted
    std::vector<std::string> global_nets_;
    std::vector<StageSpec> stages_;
    std::vector<std::size_t> representative_;
    std::array<std::vector<std::size_t>, kKindCount> ids_by_kind_;
};

/// Square 0/1 matrix, symmetric with zero diagonal.
nn::Matrix adjacency_matrix(const CircuitTopology& topology);

}  // namespace sizer::circuit
