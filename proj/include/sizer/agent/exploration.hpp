#pragma once

#include <cstddef>
#include <optional>

#include "sizer/util/rng.hpp"

namespace sizer::agent {

struct NoiseConfig {
    double initial_std = 0.5;
    double decay = 0.999;
    /// Half-width of the truncation window, in multiples of the current std.
    double truncation = 2.0;

    void validate() const;
};

/// Zero-mean truncated Gaussian exploration noise whose std shrinks
/// geometrically once per episode.
class NoiseProcess {
public:
    explicit NoiseProcess(NoiseConfig config = {});

    [[nodiscard]] double stddev() const noexcept { return std_; }
    [[nodiscard]] double half_width() const noexcept { return config_.truncation * std_; }
    [[nodiscard]] std::size_t decays() const noexcept { return decays_; }
    [[nodiscard]] const NoiseConfig& config() const noexcept { return config_; }

    /// One draw in [-half_width, half_width] (rejection sampling).
    double sample(Rng& rng) const;
    void decay();
    void reset();

private:
    NoiseConfig config_;
    double std_;
    std::size_t decays_ = 0;
};

/// Exponential moving average of rewards: B ← β·B + (1−β)·R, initialized to
/// the first reward observed.
class BaselineTracker {
public:
    explicit BaselineTracker(double beta = 0.95);

    void update(double reward);
    void reset() { value_.reset(); }

    [[nodiscard]] bool initialized() const noexcept { return value_.has_value(); }
    /// Current value, 0 before the first update.
    [[nodiscard]] double value() const noexcept { return value_.value_or(0.0); }
    [[nodiscard]] double beta() const noexcept { return beta_; }

private:
    double beta_;
    std::optional<double> value_;
};

}  // namespace sizer::agent
