#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "sizer/nn/matrix.hpp"
#include "sizer/params/param_space.hpp"
#include "sizer/util/rng.hpp"

namespace sizer::agent {

struct ReplayRecord {
    /// States rarely change within a run, so records share them.
    std::shared_ptr<const nn::Matrix> state;
    params::ActionMatrix action;
    double reward = 0.0;
};

/// Fixed-capacity store; once full the oldest record is overwritten.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 5000);

    void push(ReplayRecord record);
    /// min(count, size) distinct records drawn uniformly without replacement.
    std::vector<const ReplayRecord*> sample(std::size_t count, Rng& rng) const;
    void clear();

    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] const ReplayRecord& at(std::size_t i) const { return records_.at(i); }

private:
    std::size_t capacity_;
    std::size_t next_ = 0;
    std::vector<ReplayRecord> records_;
};

}  // namespace sizer::agent
