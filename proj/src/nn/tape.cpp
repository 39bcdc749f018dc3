#include "sizer/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sizer/nn/kernels.hpp"
#include "sizer/util/error.hpp"

namespace sizer::nn {

namespace {

std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

// Order of nodes within one block that depends only on node content
// (self-loop weight, then the row values), never on the node's label.
std::vector<std::size_t> canonical_order(const Matrix& adj, const double* block, std::size_t cols) {
    const std::size_t n = adj.rows();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) {
        if (adj(p, p) != adj(q, q)) {
            return adj(p, p) < adj(q, q);
        }
        return std::lexicographical_compare(block + p * cols, block + (p + 1) * cols, block + q * cols,
                                            block + (q + 1) * cols);
    });
    return order;
}

}  // namespace

Tape::Node& Tape::node(Var v) {
    if (v.id >= nodes_.size()) {
        throw std::logic_error("tape variable does not belong to this tape");
    }
    return nodes_[v.id];
}

const Tape::Node& Tape::node(Var v) const {
    if (v.id >= nodes_.size()) {
        throw std::logic_error("tape variable does not belong to this tape");
    }
    return nodes_[v.id];
}

const Matrix& Tape::val(std::size_t id) const {
    const Node& n = nodes_[id];
    return n.param ? n.param->value : n.value;
}

Matrix& Tape::grad_buffer(std::size_t id) {
    Node& n = nodes_[id];
    if (n.param) {
        return n.param->grad;
    }
    if (n.grad.empty() && !n.value.empty()) {
        n.grad = Matrix(n.value.rows(), n.value.cols());
    }
    return n.grad;
}

Var Tape::push(Matrix value, bool needs_grad, std::function<void(Tape&, std::size_t)> pull) {
    if (consumed_) {
        throw std::logic_error("tape already consumed by backward(); record a new forward pass");
    }
    Node n;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    if (needs_grad) {
        n.pull = std::move(pull);
    }
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::input(Matrix value) { return push(std::move(value), true, nullptr); }

Var Tape::parameter(Parameter& p, bool trainable) {
    if (trainable && !p.grad.same_shape(p.value)) {
        p.zero_grad();
    }
    Var v = push(Matrix{}, trainable, nullptr);
    nodes_[v.id].param = &p;
    return v;
}

const Matrix& Tape::value(Var v) const {
    node(v);
    return val(v.id);
}

const Matrix& Tape::grad(Var v) const {
    const Node& n = node(v);
    return n.param ? n.param->grad : n.grad;
}

Var Tape::matmul(Var x, Var w) {
    const Matrix& xv = value(x);
    const Matrix& wv = value(w);
    if (xv.cols() != wv.rows()) {
        throw DimensionError("matmul " + shape(xv) + " * " + shape(wv));
    }
    const bool ng = node(x).needs_grad || node(w).needs_grad;
    return push(nn::matmul(xv, wv), ng, [x, w](Tape& t, std::size_t self) {
        const Matrix& dy = t.nodes_[self].grad;
        const Matrix& xv = t.val(x.id);
        const Matrix& wv = t.val(w.id);
        const auto& k = kernels::active();
        if (t.nodes_[w.id].needs_grad) {
            const Matrix xt = xv.transposed();
            k.gemm(xt.rows(), xt.cols(), dy.cols(), xt.data(), dy.data(), t.grad_buffer(w.id).data(),
                   true);
        }
        if (t.nodes_[x.id].needs_grad) {
            const Matrix wt = wv.transposed();
            k.gemm(dy.rows(), dy.cols(), wt.cols(), dy.data(), wt.data(), t.grad_buffer(x.id).data(),
                   true);
        }
    });
}

Var Tape::add_row(Var x, Var b) {
    const Matrix& xv = value(x);
    const Matrix& bv = value(b);
    if (bv.rows() != 1 || bv.cols() != xv.cols()) {
        throw DimensionError("add_row " + shape(xv) + " + " + shape(bv));
    }
    Matrix out = xv;
    for (std::size_t r = 0; r < out.rows(); ++r) {
        for (std::size_t c = 0; c < out.cols(); ++c) {
            out(r, c) += bv(0, c);
        }
    }
    const bool ng = node(x).needs_grad || node(b).needs_grad;
    return push(std::move(out), ng, [x, b](Tape& t, std::size_t self) {
        const Matrix& dy = t.nodes_[self].grad;
        if (t.nodes_[x.id].needs_grad) {
            add_scaled(t.grad_buffer(x.id), dy);
        }
        if (t.nodes_[b.id].needs_grad) {
            Matrix& gb = t.grad_buffer(b.id);
            for (std::size_t r = 0; r < dy.rows(); ++r) {
                for (std::size_t c = 0; c < dy.cols(); ++c) {
                    gb(0, c) += dy(r, c);
                }
            }
        }
    });
}

Var Tape::relu(Var x) {
    const Matrix& xv = value(x);
    Matrix out(xv.rows(), xv.cols());
    kernels::active().relu(xv.size(), xv.data(), out.data());
    return push(std::move(out), node(x).needs_grad, [x](Tape& t, std::size_t self) {
        const Node& me = t.nodes_[self];
        kernels::active().relu_backward(me.value.size(), me.value.data(), me.grad.data(),
                                        t.grad_buffer(x.id).data());
    });
}

Var Tape::tanh(Var x) {
    const Matrix& xv = value(x);
    Matrix out(xv.rows(), xv.cols());
    for (std::size_t i = 0; i < xv.size(); ++i) {
        out.data()[i] = std::tanh(xv.data()[i]);
    }
    return push(std::move(out), node(x).needs_grad, [x](Tape& t, std::size_t self) {
        const Node& me = t.nodes_[self];
        Matrix& gx = t.grad_buffer(x.id);
        for (std::size_t i = 0; i < me.value.size(); ++i) {
            const double y = me.value.data()[i];
            gx.data()[i] += me.grad.data()[i] * (1.0 - y * y);
        }
    });
}

Var Tape::aggregate(const Matrix& adj, Var x) {
    const Matrix& xv = value(x);
    const std::size_t n = adj.rows();
    if (adj.cols() != n || n == 0 || xv.rows() % n != 0) {
        throw DimensionError("aggregate " + shape(adj) + " over " + shape(xv));
    }
    const std::size_t d = xv.cols();
    const std::size_t blocks = xv.rows() / n;
    const auto& k = kernels::active();
    Matrix out(xv.rows(), d);
    Matrix adj_perm(n, n);
    Matrix x_perm(n, d);
    for (std::size_t b = 0; b < blocks; ++b) {
        const double* xb = xv.data() + b * n * d;
        const auto order = canonical_order(adj, xb, d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t q = 0; q < n; ++q) {
                adj_perm(i, q) = adj(i, order[q]);
            }
        }
        for (std::size_t q = 0; q < n; ++q) {
            std::copy_n(xb + order[q] * d, d, x_perm.data() + q * d);
        }
        k.gemm(n, n, d, adj_perm.data(), x_perm.data(), out.data() + b * n * d, false);
    }
    return push(std::move(out), node(x).needs_grad,
                [x, adj_t = adj.transposed(), n, d, blocks](Tape& t, std::size_t self) {
                    const Matrix& dy = t.nodes_[self].grad;
                    Matrix& gx = t.grad_buffer(x.id);
                    const auto& k = kernels::active();
                    for (std::size_t b = 0; b < blocks; ++b) {
                        k.gemm(n, n, d, adj_t.data(), dy.data() + b * n * d, gx.data() + b * n * d,
                               true);
                    }
                });
}

Var Tape::concat_cols(Var a, Var b) {
    const Matrix& av = value(a);
    const Matrix& bv = value(b);
    if (av.rows() != bv.rows()) {
        throw DimensionError("concat_cols " + shape(av) + " | " + shape(bv));
    }
    Matrix out(av.rows(), av.cols() + bv.cols());
    for (std::size_t r = 0; r < av.rows(); ++r) {
        std::copy(av.row(r).begin(), av.row(r).end(), out.row(r).begin());
        std::copy(bv.row(r).begin(), bv.row(r).end(), out.row(r).begin() + av.cols());
    }
    const bool ng = node(a).needs_grad || node(b).needs_grad;
    const std::size_t ac = av.cols();
    return push(std::move(out), ng, [a, b, ac](Tape& t, std::size_t self) {
        const Matrix& dy = t.nodes_[self].grad;
        if (t.nodes_[a.id].needs_grad) {
            Matrix& ga = t.grad_buffer(a.id);
            for (std::size_t r = 0; r < dy.rows(); ++r) {
                for (std::size_t c = 0; c < ac; ++c) {
                    ga(r, c) += dy(r, c);
                }
            }
        }
        if (t.nodes_[b.id].needs_grad) {
            Matrix& gb = t.grad_buffer(b.id);
            for (std::size_t r = 0; r < dy.rows(); ++r) {
                for (std::size_t c = ac; c < dy.cols(); ++c) {
                    gb(r, c - ac) += dy(r, c);
                }
            }
        }
    });
}

Var Tape::gather_rows(Var x, std::span<const std::size_t> rows, std::size_t cols) {
    const Matrix& xv = value(x);
    if (cols > xv.cols()) {
        throw DimensionError("gather_rows: " + std::to_string(cols) + " columns from " + shape(xv));
    }
    Matrix out(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= xv.rows()) {
            throw DimensionError("gather_rows: row index out of range");
        }
        std::copy_n(xv.data() + rows[i] * xv.cols(), cols, out.data() + i * cols);
    }
    std::vector<std::size_t> idx(rows.begin(), rows.end());
    return push(std::move(out), node(x).needs_grad, [x, idx = std::move(idx)](Tape& t, std::size_t self) {
        const Matrix& dy = t.nodes_[self].grad;
        Matrix& gx = t.grad_buffer(x.id);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t c = 0; c < dy.cols(); ++c) {
                gx(idx[i], c) += dy(i, c);
            }
        }
    });
}

Var Tape::scatter_rows(Var x, std::span<const std::size_t> rows, std::size_t total_rows,
                       std::size_t total_cols) {
    const Matrix& xv = value(x);
    if (rows.size() != xv.rows() || xv.cols() > total_cols) {
        throw DimensionError("scatter_rows: " + shape(xv) + " into " + std::to_string(total_rows) +
                             "x" + std::to_string(total_cols));
    }
    Matrix out(total_rows, total_cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= total_rows) {
            throw DimensionError("scatter_rows: row index out of range");
        }
        std::copy_n(xv.data() + i * xv.cols(), xv.cols(), out.data() + rows[i] * total_cols);
    }
    std::vector<std::size_t> idx(rows.begin(), rows.end());
    return push(std::move(out), node(x).needs_grad, [x, idx = std::move(idx)](Tape& t, std::size_t self) {
        const Matrix& dy = t.nodes_[self].grad;
        Matrix& gx = t.grad_buffer(x.id);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            for (std::size_t c = 0; c < gx.cols(); ++c) {
                gx(i, c) += dy(idx[i], c);
            }
        }
    });
}

Var Tape::sum(std::span<const Var> parts) {
    if (parts.empty()) {
        throw DimensionError("sum of no values");
    }
    Matrix out = value(parts[0]);
    bool ng = node(parts[0]).needs_grad;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        const Matrix& p = value(parts[i]);
        if (!p.same_shape(out)) {
            throw DimensionError("sum " + shape(out) + " + " + shape(p));
        }
        for (std::size_t j = 0; j < p.size(); ++j) {
            out.data()[j] += p.data()[j];
        }
        ng = ng || node(parts[i]).needs_grad;
    }
    std::vector<Var> ids(parts.begin(), parts.end());
    return push(std::move(out), ng, [ids = std::move(ids)](Tape& t, std::size_t self) {
        const Matrix& dy = t.nodes_[self].grad;
        for (Var v : ids) {
            if (t.nodes_[v.id].needs_grad) {
                add_scaled(t.grad_buffer(v.id), dy);
            }
        }
    });
}

Var Tape::block_mean(Var x, std::size_t block_rows) {
    const Matrix& xv = value(x);
    if (block_rows == 0 || xv.rows() % block_rows != 0) {
        throw DimensionError("block_mean: " + shape(xv) + " not divisible into blocks of " +
                             std::to_string(block_rows));
    }
    const std::size_t blocks = xv.rows() / block_rows;
    Matrix out(blocks, xv.cols());
    const double inv = 1.0 / static_cast<double>(block_rows);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t r = 0; r < block_rows; ++r) {
            for (std::size_t c = 0; c < xv.cols(); ++c) {
                out(b, c) += xv(b * block_rows + r, c);
            }
        }
        for (std::size_t c = 0; c < xv.cols(); ++c) {
            out(b, c) *= inv;
        }
    }
    return push(std::move(out), node(x).needs_grad, [x, block_rows, inv](Tape& t, std::size_t self) {
        const Matrix& dy = t.nodes_[self].grad;
        Matrix& gx = t.grad_buffer(x.id);
        for (std::size_t r = 0; r < gx.rows(); ++r) {
            for (std::size_t c = 0; c < gx.cols(); ++c) {
                gx(r, c) += dy(r / block_rows, c) * inv;
            }
        }
    });
}

Var Tape::mse(Var x, const Matrix& target) {
    const Matrix& xv = value(x);
    if (!xv.same_shape(target) || xv.empty()) {
        throw DimensionError("mse " + shape(xv) + " vs " + shape(target));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
        const double e = xv.data()[i] - target.data()[i];
        acc += e * e;
    }
    const double inv = 1.0 / static_cast<double>(xv.size());
    return push(Matrix(1, 1, acc * inv), node(x).needs_grad, [x, target, inv](Tape& t, std::size_t self) {
        const double g = t.nodes_[self].grad(0, 0);
        const Matrix& xv = t.val(x.id);
        Matrix& gx = t.grad_buffer(x.id);
        for (std::size_t i = 0; i < xv.size(); ++i) {
            gx.data()[i] += g * 2.0 * (xv.data()[i] - target.data()[i]) * inv;
        }
    });
}

Var Tape::mean(Var x) {
    const Matrix& xv = value(x);
    if (xv.empty()) {
        throw DimensionError("mean of empty matrix");
    }
    double acc = 0.0;
    for (double v : xv.values()) {
        acc += v;
    }
    const double inv = 1.0 / static_cast<double>(xv.size());
    return push(Matrix(1, 1, acc * inv), node(x).needs_grad, [x, inv](Tape& t, std::size_t self) {
        const double g = t.nodes_[self].grad(0, 0) * inv;
        for (double& v : t.grad_buffer(x.id).values()) {
            v += g;
        }
    });
}

Var Tape::weighted_sum(Var x, const Matrix& weights) {
    const Matrix& xv = value(x);
    if (!xv.same_shape(weights)) {
        throw DimensionError("weighted_sum " + shape(xv) + " vs " + shape(weights));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < xv.size(); ++i) {
        acc += xv.data()[i] * weights.data()[i];
    }
    return push(Matrix(1, 1, acc), node(x).needs_grad, [x, weights](Tape& t, std::size_t self) {
        add_scaled(t.grad_buffer(x.id), weights, t.nodes_[self].grad(0, 0));
    });
}

Var Tape::scale(Var x, double factor) {
    Matrix out = value(x);
    for (double& v : out.values()) {
        v *= factor;
    }
    return push(std::move(out), node(x).needs_grad, [x, factor](Tape& t, std::size_t self) {
        add_scaled(t.grad_buffer(x.id), t.nodes_[self].grad, factor);
    });
}

void Tape::backward(Var loss) {
    const Matrix& v = value(loss);
    if (v.rows() != 1 || v.cols() != 1) {
        throw DimensionError("backward(loss) needs a 1x1 value, got " + shape(v));
    }
    backward(loss, Matrix(1, 1, 1.0));
}

void Tape::backward(Var out, const Matrix& seed) {
    if (nodes_.empty()) {
        throw std::logic_error("backward() called before any forward computation was recorded");
    }
    if (consumed_) {
        throw std::logic_error("backward() already ran on this tape");
    }
    const Matrix& ov = value(out);
    if (!ov.same_shape(seed)) {
        throw DimensionError("backward seed " + shape(seed) + " does not match output " + shape(ov));
    }
    consumed_ = true;
    if (!nodes_[out.id].needs_grad) {
        return;
    }
    add_scaled(grad_buffer(out.id), seed);
    for (std::size_t id = out.id + 1; id-- > 0;) {
        Node& n = nodes_[id];
        if (n.needs_grad && n.pull && !n.grad.empty()) {
            n.pull(*this, id);
        }
    }
}

}  // namespace sizer::nn
