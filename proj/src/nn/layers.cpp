#include "sizer/nn/layers.hpp"

#include <cmath>

#include "sizer/util/error.hpp"

namespace sizer::nn {

Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Matrix w(fan_in, fan_out);
    for (double& v : w.values()) {
        v = uniform(rng, -limit, limit);
    }
    return w;
}

DenseLayer::DenseLayer(const std::string& name, std::size_t d_in, std::size_t d_out, Rng& rng)
    : weight(name + ".weight", glorot_uniform(d_in, d_out, rng)),
      bias(name + ".bias", Matrix(1, d_out)) {}

Var DenseLayer::apply(Tape& tape, Var x) {
    return tape.add_row(tape.matmul(x, tape.parameter(weight)), tape.parameter(bias));
}

GcnLayer::GcnLayer(const std::string& name, std::size_t d_in, std::size_t d_out, Rng& rng)
    : weight(name + ".weight", glorot_uniform(d_in, d_out, rng)) {}

Var GcnLayer::apply(Tape& tape, Var h, const Matrix& adj_hat, bool aggregate) {
    Var hw = tape.matmul(h, tape.parameter(weight));
    return aggregate ? tape.aggregate(adj_hat, hw) : hw;
}

Var activate(Tape& tape, Var x, Activation act) {
    switch (act) {
        case Activation::Relu:
            return tape.relu(x);
        case Activation::Tanh:
            return tape.tanh(x);
        case Activation::Identity:
            break;
    }
    return x;
}

Matrix gcn_forward(const Matrix& h, const Matrix& adj_hat, const Matrix& weight, Activation act) {
    if (adj_hat.rows() != h.rows() || adj_hat.cols() != h.rows() || weight.rows() != h.cols()) {
        throw DimensionError("gcn_forward: incompatible shapes");
    }
    Tape tape;
    Var w = tape.constant(weight);
    Var out = activate(tape, tape.aggregate(adj_hat, tape.matmul(tape.constant(h), w)), act);
    return tape.value(out);
}

Matrix normalize_adjacency(const Matrix& adjacency) {
    const std::size_t n = adjacency.rows();
    if (adjacency.cols() != n) {
        throw DimensionError("adjacency matrix must be square");
    }
    std::vector<double> inv_sqrt_deg(n);
    for (std::size_t i = 0; i < n; ++i) {
        double deg = 1.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                deg += adjacency(i, j);
            }
        }
        inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
    }
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double a = (i == j) ? 1.0 : adjacency(i, j);
            out(i, j) = a * inv_sqrt_deg[i] * inv_sqrt_deg[j];
        }
    }
    return out;
}

}  // namespace sizer::nn
