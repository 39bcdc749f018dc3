#include <cmath>

#include "sizer/nn/kernels.hpp"

namespace sizer::nn::kernels {

namespace {

void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* c,
          bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        double* crow = c + i * n;
        if (!accumulate) {
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] = 0.0;
            }
        }
        for (std::size_t p = 0; p < k; ++p) {
            const double aip = a[i * k + p];
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) {
                crow[j] += aip * brow[j];
            }
        }
    }
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void relu(std::size_t n, const double* x, double* y) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = x[i] > 0.0 ? x[i] : 0.0;
    }
}

void relu_backward(std::size_t n, const double* y, const double* dy, double* dx) {
    for (std::size_t i = 0; i < n; ++i) {
        if (y[i] > 0.0) {
            dx[i] += dy[i];
        }
    }
}

void adam(std::size_t n, double* param, const double* grad, double* m, double* v,
          const AdamCoefficients& coef) {
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = coef.beta1 * m[i] + (1.0 - coef.beta1) * g;
        v[i] = coef.beta2 * v[i] + (1.0 - coef.beta2) * g * g;
        param[i] -= coef.step_size * m[i] / (std::sqrt(v[i]) + coef.epsilon);
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", gemm, axpy, relu, relu_backward, adam};
    return table;
}

}  // namespace sizer::nn::kernels
