#pragma once

#include <cstddef>
#include <string>

#include "sizer/nn/tape.hpp"
#include "sizer/util/rng.hpp"

namespace sizer::nn {

/// Uniform in ±sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(std::size_t fan_in, std::size_t fan_out, Rng& rng);

/// Fully connected layer y = x·W + b, shared across all rows it is applied to.
struct DenseLayer {
    Parameter weight;  // d_in × d_out
    Parameter bias;    // 1 × d_out

    DenseLayer() = default;
    DenseLayer(const std::string& name, std::size_t d_in, std::size_t d_out, Rng& rng);

    [[nodiscard]] std::size_t in_dim() const noexcept { return weight.value.rows(); }
    [[nodiscard]] std::size_t out_dim() const noexcept { return weight.value.cols(); }
    Var apply(Tape& tape, Var x);
};

/// Graph convolution σ(Â·H·W) without bias. With `aggregate` false the
/// neighbour aggregation is skipped (σ(H·W)).
struct GcnLayer {
    Parameter weight;  // d_in × d_out

    GcnLayer() = default;
    GcnLayer(const std::string& name, std::size_t d_in, std::size_t d_out, Rng& rng);

    Var apply(Tape& tape, Var h, const Matrix& adj_hat, bool aggregate);
};

enum class Activation { Identity, Relu, Tanh };

Var activate(Tape& tape, Var x, Activation act);

/// Â·H·W followed by `act`, recorded on a fresh tape.
Matrix gcn_forward(const Matrix& h, const Matrix& adj_hat, const Matrix& weight, Activation act);

/// D̃^{-1/2} (A + I) D̃^{-1/2} for a symmetric 0/1 adjacency with zero diagonal.
Matrix normalize_adjacency(const Matrix& adjacency);

}  // namespace sizer::nn
