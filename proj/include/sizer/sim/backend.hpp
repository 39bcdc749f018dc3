#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "sizer/circuit/technology.hpp"
#include "sizer/circuit/topology.hpp"
#include "sizer/params/param_space.hpp"

namespace sizer::sim {

using Metrics = std::map<std::string, double>;

/// Turns a refined design into performance metrics. Implementations either
/// return every advertised metric or throw EvaluationError.
class SimulatorBackend {
public:
    virtual ~SimulatorBackend() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual std::vector<std::string> metric_names() const = 0;
    virtual Metrics evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                             const params::DesignPoint& design) = 0;
};

/// Wraps a backend and counts evaluate() calls.
class CountingBackend final : public SimulatorBackend {
public:
    explicit CountingBackend(SimulatorBackend& inner) : inner_(inner) {}

    [[nodiscard]] std::string name() const override { return inner_.name(); }
    [[nodiscard]] std::vector<std::string> metric_names() const override { return inner_.metric_names(); }
    Metrics evaluate(const circuit::CircuitTopology& topology, const circuit::TechnologyNode& tech,
                     const params::DesignPoint& design) override;

    [[nodiscard]] std::size_t calls() const noexcept { return calls_; }

private:
    SimulatorBackend& inner_;
    std::size_t calls_ = 0;
};

}  // namespace sizer::sim
