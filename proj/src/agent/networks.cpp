#include "sizer/agent/networks.hpp"

#include <string>

#include "sizer/util/error.hpp"

namespace sizer::agent {

using circuit::ComponentKind;
using circuit::kAllKinds;
using circuit::kind_index;
using circuit::kMaxArity;

std::array<std::vector<std::size_t>, circuit::kKindCount> GraphContext::rows_by_kind(std::size_t blocks) const {
    std::array<std::vector<std::size_t>, circuit::kKindCount> rows;
    const std::size_t n = kinds.size();
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            rows[kind_index(kinds[i])].push_back(b * n + i);
        }
    }
    return rows;
}

GraphContext make_graph_context(const circuit::CircuitTopology& topology, bool identity_adjacency) {
    GraphContext g;
    for (const auto& c : topology.components()) {
        g.kinds.push_back(c.kind);
    }
    g.adj_hat = identity_adjacency ? nn::Matrix::identity(topology.size())
                                   : nn::normalize_adjacency(circuit::adjacency_matrix(topology));
    return g;
}

namespace {

nn::Var dense(nn::Tape& tape, nn::DenseLayer& layer, nn::Var x, bool trainable) {
    nn::Var w = tape.parameter(layer.weight, trainable);
    nn::Var b = tape.parameter(layer.bias, trainable);
    return tape.add_row(tape.matmul(x, w), b);
}

nn::Var gcn_stack(nn::Tape& tape, std::vector<nn::GcnLayer>& layers, nn::Var h, const GraphContext& graph,
                  bool aggregate, bool trainable) {
    for (auto& layer : layers) {
        nn::Var hw = tape.matmul(h, tape.parameter(layer.weight, trainable));
        h = tape.relu(aggregate ? tape.aggregate(graph.adj_hat, hw) : hw);
    }
    return h;
}

std::size_t blocks_of(const nn::Tape& tape, nn::Var v, const GraphContext& graph) {
    const std::size_t n = graph.nodes();
    const std::size_t rows = tape.value(v).rows();
    if (n == 0 || rows % n != 0) {
        throw DimensionError("state rows (" + std::to_string(rows) + ") are not a multiple of the " +
                             std::to_string(n) + "-node graph");
    }
    return rows / n;
}

}  // namespace

ActorNetwork::ActorNetwork(const NetworkDims& dims, Rng& rng) : dims_(dims) {
    input_ = nn::DenseLayer("actor.input", dims.state_dim, dims.hidden, rng);
    for (std::size_t l = 0; l < dims.gcn_layers; ++l) {
        gcn_.emplace_back("actor.gcn" + std::to_string(l), dims.hidden, dims.hidden, rng);
    }
    for (ComponentKind k : kAllKinds) {
        decoders_[kind_index(k)] = nn::DenseLayer("actor.decoder." + std::string(circuit::kind_token(k)),
                                                  dims.hidden, circuit::action_arity(k), rng);
    }
}

nn::Var ActorNetwork::forward(nn::Tape& tape, nn::Var states, const GraphContext& graph, bool aggregate,
                              bool trainable) {
    const nn::Matrix& s = tape.value(states);
    if (s.cols() != dims_.state_dim) {
        throw DimensionError("actor expects state dim " + std::to_string(dims_.state_dim) + ", got " +
                             std::to_string(s.cols()));
    }
    const std::size_t blocks = blocks_of(tape, states, graph);
    const std::size_t total = s.rows();

    nn::Var h = tape.relu(dense(tape, input_, states, trainable));
    h = gcn_stack(tape, gcn_, h, graph, aggregate, trainable);

    const auto rows = graph.rows_by_kind(blocks);
    std::vector<nn::Var> parts;
    for (ComponentKind k : kAllKinds) {
        const auto& idx = rows[kind_index(k)];
        if (idx.empty()) {
            continue;
        }
        nn::Var hk = tape.gather_rows(h, idx, dims_.hidden);
        nn::Var yk = tape.tanh(dense(tape, decoders_[kind_index(k)], hk, trainable));
        parts.push_back(tape.scatter_rows(yk, idx, total, kMaxArity));
    }
    return tape.sum(parts);
}

nn::Matrix ActorNetwork::act(const nn::Matrix& state, const GraphContext& graph, bool aggregate) {
    nn::Tape tape;
    nn::Var out = forward(tape, tape.constant(state), graph, aggregate, false);
    return tape.value(out);
}

std::vector<nn::Parameter*> ActorNetwork::parameters() {
    std::vector<nn::Parameter*> p{&input_.weight, &input_.bias};
    for (auto& g : gcn_) {
        p.push_back(&g.weight);
    }
    for (auto& d : decoders_) {
        p.push_back(&d.weight);
        p.push_back(&d.bias);
    }
    return p;
}

CriticNetwork::CriticNetwork(const NetworkDims& dims, Rng& rng) : dims_(dims) {
    for (ComponentKind k : kAllKinds) {
        encoders_[kind_index(k)] = nn::DenseLayer("critic.encoder." + std::string(circuit::kind_token(k)),
                                                  circuit::action_arity(k), dims.action_hidden, rng);
    }
    input_ = nn::DenseLayer("critic.input", dims.state_dim + dims.action_hidden, dims.hidden, rng);
    for (std::size_t l = 0; l < dims.gcn_layers; ++l) {
        gcn_.emplace_back("critic.gcn" + std::to_string(l), dims.hidden, dims.hidden, rng);
    }
    output_ = nn::DenseLayer("critic.output", dims.hidden, 1, rng);
}

nn::Var CriticNetwork::forward(nn::Tape& tape, nn::Var states, nn::Var actions, const GraphContext& graph,
                               bool aggregate, bool trainable) {
    const nn::Matrix& s = tape.value(states);
    const nn::Matrix& a = tape.value(actions);
    if (s.cols() != dims_.state_dim) {
        throw DimensionError("critic expects state dim " + std::to_string(dims_.state_dim) + ", got " +
                             std::to_string(s.cols()));
    }
    if (a.rows() != s.rows() || a.cols() != kMaxArity) {
        throw DimensionError("critic action block does not match states");
    }
    const std::size_t blocks = blocks_of(tape, states, graph);
    const std::size_t total = s.rows();

    const auto rows = graph.rows_by_kind(blocks);
    std::vector<nn::Var> parts;
    for (ComponentKind k : kAllKinds) {
        const auto& idx = rows[kind_index(k)];
        if (idx.empty()) {
            continue;
        }
        nn::Var ak = tape.gather_rows(actions, idx, circuit::action_arity(k));
        nn::Var ek = tape.relu(dense(tape, encoders_[kind_index(k)], ak, trainable));
        parts.push_back(tape.scatter_rows(ek, idx, total, dims_.action_hidden));
    }
    nn::Var encoded = tape.sum(parts);

    nn::Var h = tape.relu(dense(tape, input_, tape.concat_cols(states, encoded), trainable));
    h = gcn_stack(tape, gcn_, h, graph, aggregate, trainable);
    nn::Var per_node = dense(tape, output_, h, trainable);
    return tape.block_mean(per_node, graph.nodes());
}

std::vector<nn::Parameter*> CriticNetwork::parameters() {
    std::vector<nn::Parameter*> p;
    for (auto& e : encoders_) {
        p.push_back(&e.weight);
        p.push_back(&e.bias);
    }
    p.push_back(&input_.weight);
    p.push_back(&input_.bias);
    for (auto& g : gcn_) {
        p.push_back(&g.weight);
    }
    p.push_back(&output_.weight);
    p.push_back(&output_.bias);
    return p;
}

}  // namespace sizer::agent
