#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <vector>

#include "sizer/params/param_space.hpp"

namespace sizer::baselines {

struct TraceEntry {
    std::size_t step = 0;
    double fom = 0.0;
    double best_fom = 0.0;
    std::uint64_t design_hash = 0;
};

/// Per-evaluation FoM history with a running best. CSV columns:
/// step,fom,best_fom,design_hash.
class SearchTrace {
public:
    /// Appends the next step (1-based) and returns it.
    const TraceEntry& record(double fom, std::uint64_t design_hash);

    [[nodiscard]] const std::vector<TraceEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    /// Best FoM so far; -inf when empty.
    [[nodiscard]] double best_fom() const noexcept;
    [[nodiscard]] std::vector<double> best_so_far() const;

    void write_csv(const std::filesystem::path& path) const;
    static SearchTrace read_csv(const std::filesystem::path& path);

private:
    std::vector<TraceEntry> entries_;
};

struct SearchResult {
    SearchTrace trace;
    params::DesignPoint best_design;
    double best_fom = -std::numeric_limits<double>::infinity();

    /// Records one evaluation and keeps the first design reaching the best FoM.
    void observe(const params::DesignPoint& design, double fom);
};

}  // namespace sizer::baselines
