#include "sizer/agent/replay.hpp"

#include <numeric>

#include "sizer/util/error.hpp"

namespace sizer::agent {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) {
        throw ConfigError("replay capacity must be positive");
    }
    records_.reserve(std::min<std::size_t>(capacity, 1024));
}

void ReplayBuffer::push(ReplayRecord record) {
    if (records_.size() < capacity_) {
        records_.push_back(std::move(record));
    } else {
        records_[next_] = std::move(record);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<const ReplayRecord*> ReplayBuffer::sample(std::size_t count, Rng& rng) const {
    const std::size_t n = records_.size();
    const std::size_t k = std::min(count, n);
    // Partial Fisher-Yates over indices.
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<const ReplayRecord*> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
        std::swap(idx[i], idx[j]);
        out.push_back(&records_[idx[i]]);
    }
    return out;
}

void ReplayBuffer::clear() {
    records_.clear();
    next_ = 0;
}

}  // namespace sizer::agent
