#pragma once

#include <cstdint>
#include <vector>

#include "sizer/nn/tape.hpp"

namespace sizer::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Adaptive-moment gradient step over a fixed set of parameters. Moment
/// buffers mirror the parameter shapes and are created at construction.
class ParamUpdater {
public:
    ParamUpdater(std::vector<Parameter*> params, AdamConfig config);

    /// Applies one step using each parameter's accumulated grad. Throws
    /// NumericError (and leaves every parameter untouched) if any gradient
    /// entry is non-finite.
    void step();

    [[nodiscard]] std::uint64_t step_count() const noexcept { return steps_; }
    [[nodiscard]] const AdamConfig& config() const noexcept { return config_; }
    [[nodiscard]] const Matrix& first_moment(std::size_t i) const { return m_.at(i); }
    [[nodiscard]] const Matrix& second_moment(std::size_t i) const { return v_.at(i); }

private:
    std::vector<Parameter*> params_;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
    AdamConfig config_;
    std::uint64_t steps_ = 0;
};

}  // namespace sizer::nn
