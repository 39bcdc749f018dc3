#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

#include "sizer/baselines/trace.hpp"
#include "sizer/circuit/technology.hpp"
#include "sizer/circuit/topology.hpp"
#include "sizer/fom/fom.hpp"
#include "sizer/sim/backend.hpp"

namespace sizer::baselines {

struct Problem {
    const circuit::CircuitTopology* topology = nullptr;
    const circuit::TechnologyNode* tech = nullptr;
    sim::SimulatorBackend* backend = nullptr;
    const fom::FomConfig* fom = nullptr;
};

using StepCallback = std::function<void(const TraceEntry&)>;

/// Uniformly random refined designs, one evaluation per step. Throws
/// EvaluationError if every evaluation fails.
SearchResult random_search(const Problem& problem, std::size_t budget, std::uint64_t seed,
                           const StepCallback& on_step = {});

struct EsConfig {
    std::size_t parents = 8;
    std::size_t offspring = 32;
    double sigma = 0.2;
    bool elitism = true;

    void validate() const;
};

/// (μ, λ) evolution strategy over the raw [-1, 1] action space with
/// elitism: the best design seen so far always stays among the parents.
/// Requires budget ≥ offspring.
SearchResult es_optimize(const Problem& problem, std::size_t budget, std::uint64_t seed, EsConfig config = {},
                         const StepCallback& on_step = {});

}  // namespace sizer::baselines
