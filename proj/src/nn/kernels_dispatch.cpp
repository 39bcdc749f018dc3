#include <atomic>
#include <cstdlib>
#include <string>

#include "sizer/nn/kernels.hpp"

namespace sizer::nn::kernels {

namespace {

const KernelTable* initial_table() {
    const char* env = std::getenv("GCN_SIZER_SIMD");
    const std::string want = env ? env : "auto";
    if (want == "scalar") {
        return &scalar_table();
    }
    if (const KernelTable* t = avx2_table()) {
        return t;
    }
    return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
    if (name == "scalar") {
        current().store(&scalar_table());
        return true;
    }
    if (name == "avx2" || name == "auto") {
        if (const KernelTable* t = avx2_table()) {
            current().store(t);
            return true;
        }
        if (name == "auto") {
            current().store(&scalar_table());
            return true;
        }
    }
    return false;
}

}  // namespace sizer::nn::kernels
