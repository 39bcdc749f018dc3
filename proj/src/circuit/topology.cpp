#include "sizer/circuit/topology.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <spdlog/spdlog.h>

#include "sizer/util/error.hpp"

namespace sizer::circuit {

std::vector<std::string_view> parameter_names(ComponentKind k) {
    switch (k) {
        case ComponentKind::Nmos:
        case ComponentKind::Pmos:
            return {"W", "L", "M"};
        case ComponentKind::Resistor:
            return {"r"};
        case ComponentKind::Capacitor:
            return {"c"};
    }
    return {};
}

std::string_view kind_token(ComponentKind k) {
    switch (k) {
        case ComponentKind::Nmos:
            return "nmos";
        case ComponentKind::Pmos:
            return "pmos";
        case ComponentKind::Resistor:
            return "res";
        case ComponentKind::Capacitor:
            return "cap";
    }
    return "?";
}

std::optional<ComponentKind> kind_from_token(std::string_view token) {
    for (ComponentKind k : kAllKinds) {
        if (kind_token(k) == token) {
            return k;
        }
    }
    return std::nullopt;
}

CircuitTopology::CircuitTopology(std::string name, std::vector<Component> components,
                                 std::vector<std::string> global_nets, std::vector<StageSpec> stages)
    : name_(std::move(name)),
      components_(std::move(components)),
      global_nets_(std::move(global_nets)),
      stages_(std::move(stages)) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const Component& c = components_[i];
        if (c.id != i) {
            throw ConfigError("component ids must be dense 0..n-1 in order (" + c.name + ")");
        }
        if (!names.insert(c.name).second) {
            throw ConfigError("duplicate component name " + c.name);
        }
        if (c.nets.empty()) {
            throw ConfigError("component " + c.name + " has no nets");
        }
        ids_by_kind_[kind_index(c.kind)].push_back(i);
    }

    representative_.resize(components_.size());
    std::map<std::string, std::size_t> group_first;
    for (std::size_t i = 0; i < components_.size(); ++i) {
        const Component& c = components_[i];
        representative_[i] = i;
        if (!c.matching_group) {
            continue;
        }
        auto [it, inserted] = group_first.emplace(*c.matching_group, i);
        if (!inserted) {
            if (components_[it->second].kind != c.kind) {
                throw ConfigError("matching group " + *c.matching_group + " mixes component kinds");
            }
            representative_[i] = it->second;
        }
    }

    const std::set<std::string> globals(global_nets_.begin(), global_nets_.end());
    std::map<std::string, std::vector<std::size_t>> members;
    for (const Component& c : components_) {
        for (const std::string& net : c.nets) {
            if (!globals.contains(net)) {
                auto& v = members[net];
                if (v.empty() || v.back() != c.id) {
                    v.push_back(c.id);
                }
            }
        }
    }
    std::set<std::pair<std::size_t, std::size_t>> edge_set;
    for (const auto& [net, ids] : members) {
        for (std::size_t a = 0; a < ids.size(); ++a) {
            for (std::size_t b = a + 1; b < ids.size(); ++b) {
                edge_set.emplace(std::min(ids[a], ids[b]), std::max(ids[a], ids[b]));
            }
        }
    }
    edges_.assign(edge_set.begin(), edge_set.end());

    for (const StageSpec& s : stages_) {
        for (const auto* list : {&s.drivers, &s.loads}) {
            for (const std::string& n : *list) {
                if (!find(n)) {
                    throw ConfigError("stage " + s.name + " references unknown component " + n);
                }
            }
        }
    }

    if (!components_.empty() && !connected()) {
        spdlog::warn("topology '{}' is not connected", name_);
    }
}

std::optional<std::size_t> CircuitTopology::find(std::string_view component_name) const {
    for (const Component& c : components_) {
        if (c.name == component_name) {
            return c.id;
        }
    }
    return std::nullopt;
}

bool CircuitTopology::has_edge(std::size_t a, std::size_t b) const {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    return std::binary_search(edges_.begin(), edges_.end(), key);
}

bool CircuitTopology::connected() const {
    const std::size_t n = components_.size();
    if (n <= 1) {
        return true;
    }
    std::vector<std::vector<std::size_t>> nbr(n);
    for (auto [a, b] : edges_) {
        nbr[a].push_back(b);
        nbr[b].push_back(a);
    }
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : nbr[u]) {
            if (!seen[v]) {
                seen[v] = true;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

nn::Matrix adjacency_matrix(const CircuitTopology& topology) {
    nn::Matrix a(topology.size(), topology.size());
    for (auto [i, j] : topology.edges()) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return a;
}

}  // namespace sizer::circuit
