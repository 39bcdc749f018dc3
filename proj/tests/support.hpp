#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "sizer/circuit/netlist.hpp"
#include "sizer/circuit/technology.hpp"
#include "sizer/circuit/topology.hpp"
#include "sizer/nn/tape.hpp"
#include "sizer/sim/backend.hpp"
#include "sizer/util/rng.hpp"

namespace sizer::testing {

inline std::filesystem::path data_path(const std::string& rel) { return std::filesystem::path(SIZER_DATA_DIR) / rel; }

inline circuit::CircuitTopology fixture(const std::string& name) {
    return circuit::load_netlist_document(data_path("netlists/" + name + ".net")).topology;
}

inline circuit::TechnologyNode tech_node(const std::string& name) {
    return circuit::load_technology(data_path("tech/" + name + ".json"));
}

/// Connected random graph: a random spanning tree plus extra edges with
/// probability `extra`. Each edge becomes a private net shared by its ends.
inline circuit::CircuitTopology random_topology(std::size_t n, Rng& rng, double extra = 0.3,
                                                bool mixed_kinds = true) {
    std::set<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t j = rng() % i;
        edges.insert({j, i});
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (uniform(rng, 0.0, 1.0) < extra) {
                edges.insert({i, j});
            }
        }
    }
    std::vector<circuit::Component> comps(n);
    for (std::size_t i = 0; i < n; ++i) {
        comps[i].id = i;
        comps[i].name = "X" + std::to_string(i);
        comps[i].kind = mixed_kinds ? circuit::kAllKinds[rng() % circuit::kKindCount] : circuit::ComponentKind::Nmos;
        comps[i].nets.push_back("own" + std::to_string(i));
    }
    for (const auto& [a, b] : edges) {
        const std::string net = "e" + std::to_string(a) + "_" + std::to_string(b);
        comps[a].nets.push_back(net);
        comps[b].nets.push_back(net);
    }
    return circuit::CircuitTopology("random", std::move(comps), {}, {});
}

/// Backend driven by a plain function; throwing EvaluationError from it
/// simulates a failed run.
class FunctionBackend final : public sim::SimulatorBackend {
public:
    using Fn = std::function<sim::Metrics(const params::DesignPoint&)>;
    FunctionBackend(std::vector<std::string> names, Fn fn) : names_(std::move(names)), fn_(std::move(fn)) {}

    [[nodiscard]] std::string name() const override { return "function"; }
    [[nodiscard]] std::vector<std::string> metric_names() const override { return names_; }
    sim::Metrics evaluate(const circuit::CircuitTopology&, const circuit::TechnologyNode&,
                          const params::DesignPoint& design) override {
        ++calls;
        return fn_(design);
    }

    std::size_t calls = 0;

private:
    std::vector<std::string> names_;
    Fn fn_;
};

/// Central-difference check of every entry of `params` against the gradients
/// accumulated by one call to `run` (which must zero, forward and backward).
/// Relative error is |analytic − fd| / (|analytic| + 1e-8).
struct GradCheck {
    std::size_t checked = 0;
    std::size_t passed = 0;
    double worst = 0.0;
    [[nodiscard]] double pass_rate() const { return checked ? double(passed) / double(checked) : 1.0; }
};

inline GradCheck check_gradients(const std::vector<nn::Parameter*>& params, const std::function<double()>& loss,
                                 const std::function<void()>& run_backward, double eps = 1e-5,
                                 double tol = 1e-4) {
    for (auto* p : params) {
        p->zero_grad();
    }
    run_backward();
    std::vector<nn::Matrix> analytic;
    for (auto* p : params) {
        analytic.push_back(p->grad);
    }
    GradCheck gc;
    for (std::size_t k = 0; k < params.size(); ++k) {
        nn::Parameter& p = *params[k];
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double orig = p.value.data()[i];
            p.value.data()[i] = orig + eps;
            const double up = loss();
            p.value.data()[i] = orig - eps;
            const double down = loss();
            p.value.data()[i] = orig;
            const double fd = (up - down) / (2 * eps);
            const double an = analytic[k].data()[i];
            const double rel = std::abs(an - fd) / (std::abs(an) + 1e-8);
            gc.worst = std::max(gc.worst, rel);
            ++gc.checked;
            if (rel < tol) {
                ++gc.passed;
            }
        }
    }
    return gc;
}

}  // namespace sizer::testing
