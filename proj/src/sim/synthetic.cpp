#include "sizer/sim/synthetic.hpp"

#include <array>

#include "sizer/util/error.hpp"
#include "sizer/util/rng.hpp"

namespace sizer::sim {

std::optional<SyntheticKind> synthetic_kind_from_name(std::string_view name) {
    if (name == "sphere") {
        return SyntheticKind::Sphere;
    }
    if (name == "graph-quadratic") {
        return SyntheticKind::GraphQuadratic;
    }
    return std::nullopt;
}

SyntheticBenchmark make_benchmark(SyntheticKind kind, const circuit::CircuitTopology& topology,
                                  const circuit::TechnologyNode& tech, std::uint64_t target_seed,
                                  double coupling) {
    Rng rng(sub_seed(target_seed, "synthetic-target"));
    SyntheticBenchmark b;
    b.kind = kind;
    b.coupling = kind == SyntheticKind::Sphere ? 0.0 : coupling;
    b.target = params::action_to_design(params::random_action(topology, rng), topology, tech);
    return b;
}

double synthetic_score(const SyntheticBenchmark& bench, const circuit::CircuitTopology& topology,
                       const circuit::TechnologyNode& tech, const params::DesignPoint& design) {
    if (design.values.size() != topology.size() || bench.target.values.size() != topology.size()) {
        throw ConfigError("synthetic benchmark does not match topology " + topology.name());
    }
    std::vector<std::array<double, circuit::kMaxArity>> diff(topology.size());
    for (const auto& c : topology.components()) {
        const auto& specs = tech.param_specs(c.kind);
        diff[c.id].fill(0.0);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            diff[c.id][i] = params::normalized_coordinate(design.values[c.id][i], specs[i]) -
                            params::normalized_coordinate(bench.target.values[c.id][i], specs[i]);
        }
    }
    double node_term = 0.0;
    for (const auto& d : diff) {
        for (double x : d) {
            node_term += x * x;
        }
    }
    double edge_term = 0.0;
    if (bench.kind == SyntheticKind::GraphQuadratic && bench.coupling != 0.0) {
        for (auto [i, j] : topology.edges()) {
            for (std::size_t p = 0; p < circuit::kMaxArity; ++p) {
                const double e = diff[i][p] - diff[j][p];
                edge_term += e * e;
            }
        }
    }
    return -node_term - bench.coupling * edge_term;
}

Metrics SyntheticBackend::evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                                   const params::DesignPoint& design) {
    return {{"Score", synthetic_score(bench_, topology, tech, design)}};
}

}  // namespace sizer::sim
