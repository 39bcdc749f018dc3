#pragma once

// Inner-loop arithmetic used by the tensor stack. Each kernel has a scalar
// reference implementation and, where the CPU supports it, an AVX2+FMA
// variant. The active table is picked once at startup (CPUID) and can be
// forced with GCN_SIZER_SIMD=scalar|avx2 or kernels::select().
//
// Results inside one variant are bit-reproducible. Across variants they agree
// to rounding (FMA contraction and lane order differ).

#include <cstddef>
#include <string_view>

namespace sizer::nn::kernels {

struct AdamCoefficients {
    double step_size;  // lr * sqrt(1 - beta2^t) / (1 - beta1^t)
    double beta1;
    double beta2;
    double epsilon;
};

struct KernelTable {
    const char* name;
    /// C(m×n) = A(m×k)·B(k×n), or C += A·B when accumulate is set.
    void (*gemm)(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                 double* c, bool accumulate);
    /// y += alpha·x
    void (*axpy)(std::size_t n, double alpha, const double* x, double* y);
    /// y = max(x, 0)
    void (*relu)(std::size_t n, const double* x, double* y);
    /// dx += dy where y > 0
    void (*relu_backward)(std::size_t n, const double* y, const double* dy, double* dx);
    /// One adaptive-moment step over a flat parameter block.
    void (*adam)(std::size_t n, double* param, const double* grad, double* m, double* v,
                 const AdamCoefficients& coef);
};

const KernelTable& scalar_table();
/// Null when the build target or the running CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

const KernelTable& active();
/// "scalar", "avx2" or "auto". Returns false (and leaves the table unchanged)
/// when the requested variant is unavailable.
bool select(std::string_view name);

}  // namespace sizer::nn::kernels
