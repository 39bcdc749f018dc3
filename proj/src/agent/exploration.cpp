#include "sizer/agent/exploration.hpp"

#include <cmath>

#include "sizer/util/error.hpp"

namespace sizer::agent {

void NoiseConfig::validate() const {
    if (!(initial_std >= 0.0) || !std::isfinite(initial_std)) {
        throw ConfigError("noise std must be a finite non-negative number");
    }
    if (!(decay > 0.0 && decay <= 1.0)) {
        throw ConfigError("noise decay must lie in (0, 1]");
    }
    if (!(truncation > 0.0)) {
        throw ConfigError("noise truncation must be positive");
    }
}

NoiseProcess::NoiseProcess(NoiseConfig config) : config_(config), std_(config.initial_std) {
    config_.validate();
}

double NoiseProcess::sample(Rng& rng) const {
    if (std_ == 0.0) {
        return 0.0;
    }
    const double limit = config_.truncation;
    for (;;) {
        const double z = standard_normal(rng);
        if (std::abs(z) <= limit) {
            return z * std_;
        }
    }
}

void NoiseProcess::decay() {
    std_ *= config_.decay;
    ++decays_;
}

void NoiseProcess::reset() {
    std_ = config_.initial_std;
    decays_ = 0;
}

BaselineTracker::BaselineTracker(double beta) : beta_(beta) {
    if (!(beta >= 0.0 && beta < 1.0)) {
        throw ConfigError("baseline decay must lie in [0, 1)");
    }
}

void BaselineTracker::update(double reward) {
    if (!value_) {
        value_ = reward;
        return;
    }
    value_ = beta_ * *value_ + (1.0 - beta_) * reward;
}

}  // namespace sizer::agent
