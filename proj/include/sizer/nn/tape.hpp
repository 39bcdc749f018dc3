#pragma once

// Reverse-mode differentiation over a recorded sequence of matrix ops.
//
// A Tape is filled by a forward pass and consumed by backward(). Parameters
// live outside the tape; backward() accumulates into Parameter::grad so the
// caller decides when to zero gradients. Only the ops the actor and critic
// networks need are provided.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sizer/nn/matrix.hpp"

namespace sizer::nn {

/// A trainable tensor with its accumulated gradient.
struct Parameter {
    std::string name;
    Matrix value;
    Matrix grad;

    Parameter() = default;
    Parameter(std::string n, Matrix v)
        : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

    void zero_grad() { grad = Matrix(value.rows(), value.cols()); }
};

/// Handle to a value recorded on a Tape.
struct Var {
    std::size_t id = static_cast<std::size_t>(-1);
};

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;
    Tape(Tape&&) = default;
    Tape& operator=(Tape&&) = default;

    /// Value with no gradient.
    Var constant(Matrix value);
    /// Value whose gradient is tracked and readable via grad() after backward.
    Var input(Matrix value);
    /// Reference to an external parameter; gradient accumulates into p.grad.
    /// A non-trainable reference reads p.value but never touches p.grad.
    Var parameter(Parameter& p, bool trainable = true);

    /// x · w
    Var matmul(Var x, Var w);
    /// x + b with b (1×cols) broadcast over rows.
    Var add_row(Var x, Var b);
    Var relu(Var x);
    Var tanh(Var x);
    /// Row blocks of x (each adj.rows() tall) left-multiplied by the constant
    /// symmetric matrix adj. Node contributions are summed in a canonical order
    /// independent of node labelling, so relabelling nodes permutes output rows
    /// bit-exactly.
    Var aggregate(const Matrix& adj, Var x);
    /// [a | b]
    Var concat_cols(Var a, Var b);
    /// Rows `rows` of x, restricted to the first `cols` columns.
    Var gather_rows(Var x, std::span<const std::size_t> rows, std::size_t cols);
    /// Zero matrix (total_rows × total_cols) with x's rows written at `rows`,
    /// columns [0, x.cols).
    Var scatter_rows(Var x, std::span<const std::size_t> rows, std::size_t total_rows,
                     std::size_t total_cols);
    /// Sum of several equally shaped values.
    Var sum(std::span<const Var> parts);
    /// Mean over consecutive row blocks of `block_rows` rows: result is
    /// (x.rows / block_rows) × x.cols.
    Var block_mean(Var x, std::size_t block_rows);
    /// Mean of (x − target)² over all entries; target constant. Result 1×1.
    Var mse(Var x, const Matrix& target);
    /// Mean of all entries, 1×1.
    Var mean(Var x);
    /// Σ x ⊙ weights, 1×1.
    Var weighted_sum(Var x, const Matrix& weights);
    Var scale(Var x, double factor);

    [[nodiscard]] const Matrix& value(Var v) const;
    [[nodiscard]] const Matrix& grad(Var v) const;
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

    /// Backpropagates from a 1×1 value.
    void backward(Var loss);
    /// Backpropagates with an explicit seed gradient for `out`.
    void backward(Var out, const Matrix& seed);

private:
    struct Node {
        Matrix value;
        Matrix grad;
        Parameter* param = nullptr;
        bool needs_grad = false;
        std::function<void(Tape&, std::size_t)> pull;
    };

    Node& node(Var v);
    const Node& node(Var v) const;
    const Matrix& val(std::size_t id) const;
    Matrix& grad_buffer(std::size_t id);
    Var push(Matrix value, bool needs_grad, std::function<void(Tape&, std::size_t)> pull);

    std::vector<Node> nodes_;
    bool consumed_ = false;
};

}  // namespace sizer::nn
