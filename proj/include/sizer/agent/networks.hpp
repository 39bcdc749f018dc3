#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "sizer/circuit/topology.hpp"
#include "sizer/nn/layers.hpp"
#include "sizer/nn/tape.hpp"
#include "sizer/util/rng.hpp"

namespace sizer::agent {

struct NetworkDims {
    std::size_t state_dim = 0;
    std::size_t hidden = 64;
    std::size_t action_hidden = 64;
    std::size_t gcn_layers = 7;

    bool operator==(const NetworkDims&) const = default;
};

/// Per-node component kinds and the normalized adjacency Â of one topology.
struct GraphContext {
    std::vector<circuit::ComponentKind> kinds;
    nn::Matrix adj_hat;

    [[nodiscard]] std::size_t nodes() const noexcept { return kinds.size(); }
    /// Row indices of each kind across `blocks` stacked copies of the graph.
    [[nodiscard]] std::array<std::vector<std::size_t>, circuit::kKindCount> rows_by_kind(std::size_t blocks) const;
};

GraphContext make_graph_context(const circuit::CircuitTopology& topology, bool identity_adjacency = false);

/// Shared input FC layer, a stack of GCN layers and one decoder per component
/// kind (hidden → arity, tanh). Output is (blocks·n) × kMaxArity with unused
/// columns zero.
class ActorNetwork {
public:
    ActorNetwork() = default;
    ActorNetwork(const NetworkDims& dims, Rng& rng);

    /// `states` holds one or more stacked n-row state blocks. With `aggregate`
    /// false the GCN layers skip neighbour aggregation.
    nn::Var forward(nn::Tape& tape, nn::Var states, const GraphContext& graph, bool aggregate,
                    bool trainable = true);

    /// Forward pass without gradient tracking for a single state block.
    nn::Matrix act(const nn::Matrix& state, const GraphContext& graph, bool aggregate);

    [[nodiscard]] const NetworkDims& dims() const noexcept { return dims_; }
    std::vector<nn::Parameter*> parameters();

private:
    NetworkDims dims_;
    nn::DenseLayer input_;
    std::vector<nn::GcnLayer> gcn_;
    std::array<nn::DenseLayer, circuit::kKindCount> decoders_;
};

/// One action encoder per kind (arity → action_hidden, ReLU), a shared input
/// FC layer over [state | encoded action], a stack of GCN layers and a shared
/// FC output giving one scalar per node, mean-pooled per block into Q(S, A).
class CriticNetwork {
public:
    CriticNetwork() = default;
    CriticNetwork(const NetworkDims& dims, Rng& rng);

    /// Returns blocks × 1.
    nn::Var forward(nn::Tape& tape, nn::Var states, nn::Var actions, const GraphContext& graph, bool aggregate,
                    bool trainable = true);

    [[nodiscard]] const NetworkDims& dims() const noexcept { return dims_; }
    std::vector<nn::Parameter*> parameters();

private:
    NetworkDims dims_;
    std::array<nn::DenseLayer, circuit::kKindCount> encoders_;
    nn::DenseLayer input_;
    std::vector<nn::GcnLayer> gcn_;
    nn::DenseLayer output_;
};

}  // namespace sizer::agent
