#include <cmath>
#include <cstring>

#include "sizer/nn/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define SIZER_HAVE_AVX2_BUILD 1
#define SIZER_AVX2 __attribute__((target("avx2,fma")))
#else
#define SIZER_HAVE_AVX2_BUILD 0
#endif

namespace sizer::nn::kernels {

#if SIZER_HAVE_AVX2_BUILD

namespace {

// Every output element is an FMA chain over k in ascending order starting
// from its initial value, whichever block path computes it. Results therefore
// do not depend on the element's row or column position.

SIZER_AVX2 inline double fma_chain(const double* arow, const double* b, std::size_t k,
                                   std::size_t n, std::size_t j, double acc) {
    __m128d s = _mm_set_sd(acc);
    for (std::size_t p = 0; p < k; ++p) {
        s = _mm_fmadd_sd(_mm_set_sd(arow[p]), _mm_set_sd(b[p * n + j]), s);
    }
    return _mm_cvtsd_f64(s);
}

SIZER_AVX2 void gemm_rows1(std::size_t k, std::size_t n, const double* arow, const double* b,
                           double* crow) {
    std::size_t j = 0;
    for (; j + 8 <= n; j += 8) {
        __m256d c0 = _mm256_loadu_pd(crow + j);
        __m256d c1 = _mm256_loadu_pd(crow + j + 4);
        for (std::size_t p = 0; p < k; ++p) {
            const __m256d a = _mm256_broadcast_sd(arow + p);
            c0 = _mm256_fmadd_pd(a, _mm256_loadu_pd(b + p * n + j), c0);
            c1 = _mm256_fmadd_pd(a, _mm256_loadu_pd(b + p * n + j + 4), c1);
        }
        _mm256_storeu_pd(crow + j, c0);
        _mm256_storeu_pd(crow + j + 4, c1);
    }
    for (; j + 4 <= n; j += 4) {
        __m256d c0 = _mm256_loadu_pd(crow + j);
        for (std::size_t p = 0; p < k; ++p) {
            c0 = _mm256_fmadd_pd(_mm256_broadcast_sd(arow + p), _mm256_loadu_pd(b + p * n + j), c0);
        }
        _mm256_storeu_pd(crow + j, c0);
    }
    for (; j < n; ++j) {
        crow[j] = fma_chain(arow, b, k, n, j, crow[j]);
    }
}

SIZER_AVX2 void gemm(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                     double* c, bool accumulate) {
    if (!accumulate && m * n > 0) {
        std::memset(c, 0, m * n * sizeof(double));
    }
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        const double* a0 = a + (i + 0) * k;
        const double* a1 = a + (i + 1) * k;
        const double* a2 = a + (i + 2) * k;
        const double* a3 = a + (i + 3) * k;
        double* c0r = c + (i + 0) * n;
        double* c1r = c + (i + 1) * n;
        double* c2r = c + (i + 2) * n;
        double* c3r = c + (i + 3) * n;
        std::size_t j = 0;
        for (; j + 8 <= n; j += 8) {
            __m256d c00 = _mm256_loadu_pd(c0r + j), c01 = _mm256_loadu_pd(c0r + j + 4);
            __m256d c10 = _mm256_loadu_pd(c1r + j), c11 = _mm256_loadu_pd(c1r + j + 4);
            __m256d c20 = _mm256_loadu_pd(c2r + j), c21 = _mm256_loadu_pd(c2r + j + 4);
            __m256d c30 = _mm256_loadu_pd(c3r + j), c31 = _mm256_loadu_pd(c3r + j + 4);
            for (std::size_t p = 0; p < k; ++p) {
                const __m256d b0 = _mm256_loadu_pd(b + p * n + j);
                const __m256d b1 = _mm256_loadu_pd(b + p * n + j + 4);
                __m256d av = _mm256_broadcast_sd(a0 + p);
                c00 = _mm256_fmadd_pd(av, b0, c00);
                c01 = _mm256_fmadd_pd(av, b1, c01);
                av = _mm256_broadcast_sd(a1 + p);
                c10 = _mm256_fmadd_pd(av, b0, c10);
                c11 = _mm256_fmadd_pd(av, b1, c11);
                av = _mm256_broadcast_sd(a2 + p);
                c20 = _mm256_fmadd_pd(av, b0, c20);
                c21 = _mm256_fmadd_pd(av, b1, c21);
                av = _mm256_broadcast_sd(a3 + p);
                c30 = _mm256_fmadd_pd(av, b0, c30);
                c31 = _mm256_fmadd_pd(av, b1, c31);
            }
            _mm256_storeu_pd(c0r + j, c00);
            _mm256_storeu_pd(c0r + j + 4, c01);
            _mm256_storeu_pd(c1r + j, c10);
            _mm256_storeu_pd(c1r + j + 4, c11);
            _mm256_storeu_pd(c2r + j, c20);
            _mm256_storeu_pd(c2r + j + 4, c21);
            _mm256_storeu_pd(c3r + j, c30);
            _mm256_storeu_pd(c3r + j + 4, c31);
        }
        if (j < n) {
            // Column tail: finish each of the four rows with the single-row path.
            const std::size_t rest = n - j;
            for (std::size_t r = 0; r < 4; ++r) {
                const double* ar = a + (i + r) * k;
                double* cr = c + (i + r) * n + j;
                std::size_t jj = 0;
                for (; jj + 4 <= rest; jj += 4) {
                    __m256d acc = _mm256_loadu_pd(cr + jj);
                    for (std::size_t p = 0; p < k; ++p) {
                        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(ar + p),
                                              _mm256_loadu_pd(b + p * n + j + jj), acc);
                    }
                    _mm256_storeu_pd(cr + jj, acc);
                }
                for (; jj < rest; ++jj) {
                    cr[jj] = fma_chain(ar, b, k, n, j + jj, cr[jj]);
                }
            }
        }
    }
    for (; i < m; ++i) {
        gemm_rows1(k, n, a + i * k, b, c + i * n);
    }
}

SIZER_AVX2 void axpy(std::size_t n, double alpha, const double* x, double* y) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) {
        y[i] = _mm_cvtsd_f64(_mm_fmadd_sd(_mm_set_sd(alpha), _mm_set_sd(x[i]), _mm_set_sd(y[i])));
    }
}

SIZER_AVX2 void relu(std::size_t n, const double* x, double* y) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    }
    for (; i < n; ++i) {
        y[i] = x[i] > 0.0 ? x[i] : 0.0;
    }
}

SIZER_AVX2 void relu_backward(std::size_t n, const double* y, const double* dy, double* dx) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(y + i), zero, _CMP_GT_OQ);
        const __m256d g = _mm256_and_pd(mask, _mm256_loadu_pd(dy + i));
        _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), g));
    }
    for (; i < n; ++i) {
        if (y[i] > 0.0) {
            dx[i] += dy[i];
        }
    }
}

SIZER_AVX2 void adam(std::size_t n, double* param, const double* grad, double* m, double* v,
                     const AdamCoefficients& coef) {
    const __m256d b1 = _mm256_set1_pd(coef.beta1);
    const __m256d b2 = _mm256_set1_pd(coef.beta2);
    const __m256d one_b1 = _mm256_set1_pd(1.0 - coef.beta1);
    const __m256d one_b2 = _mm256_set1_pd(1.0 - coef.beta2);
    const __m256d step = _mm256_set1_pd(coef.step_size);
    const __m256d eps = _mm256_set1_pd(coef.epsilon);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        const __m256d mi = _mm256_fmadd_pd(b1, _mm256_loadu_pd(m + i), _mm256_mul_pd(one_b1, g));
        const __m256d vi =
            _mm256_fmadd_pd(b2, _mm256_loadu_pd(v + i), _mm256_mul_pd(one_b2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vi), eps);
        const __m256d upd = _mm256_div_pd(_mm256_mul_pd(step, mi), denom);
        _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), upd));
    }
    for (; i < n; ++i) {
        const double g = grad[i];
        m[i] = coef.beta1 * m[i] + (1.0 - coef.beta1) * g;
        v[i] = coef.beta2 * v[i] + (1.0 - coef.beta2) * g * g;
        param[i] -= coef.step_size * m[i] / (std::sqrt(v[i]) + coef.epsilon);
    }
}

}  // namespace

const KernelTable* avx2_table() {
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    static const KernelTable table{"avx2", gemm, axpy, relu, relu_backward, adam};
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace sizer::nn::kernels
