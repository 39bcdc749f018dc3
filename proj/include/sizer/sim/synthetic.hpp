#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "sizer/sim/backend.hpp"

namespace sizer::sim {

enum class SyntheticKind { Sphere, GraphQuadratic };

std::optional<SyntheticKind> synthetic_kind_from_name(std::string_view name);

/// Known-optimum test function over normalized parameter coordinates u ∈ [0,1]
/// (see params::normalized_coordinate), with d_k = u_k − u*_k padded to
/// kMaxArity entries:
///
///     Score = −Σ_k ‖d_k‖² − λ·Σ_{(i,j)∈E} ‖d_i − d_j‖²
///
/// Sphere is the λ = 0 case. The maximum 0 is reached only at the target.
struct SyntheticBenchmark {
    SyntheticKind kind = SyntheticKind::GraphQuadratic;
    params::DesignPoint target;
    double coupling = 0.5;
};

/// Target drawn as a random refined design, so it lies inside the design space.
SyntheticBenchmark make_benchmark(SyntheticKind kind, const circuit::CircuitTopology& topology,
                                  const circuit::TechnologyNode& tech, std::uint64_t target_seed,
                                  double coupling = 0.5);

double synthetic_score(const SyntheticBenchmark& bench, const circuit::CircuitTopology& topology,
                       const circuit::TechnologyNode& tech, const params::DesignPoint& design);

class SyntheticBackend final : public SimulatorBackend {
public:
    explicit SyntheticBackend(SyntheticBenchmark bench) : bench_(std::move(bench)) {}

    [[nodiscard]] std::string name() const override { return "synthetic"; }
    [[nodiscard]] std::vector<std::string> metric_names() const override { return {"Score"}; }
    Metrics evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                     const params::DesignPoint& design) override;

    [[nodiscard]] const SyntheticBenchmark& benchmark() const noexcept { return bench_; }

private:
    SyntheticBenchmark bench_;
};

}  // namespace sizer::sim
