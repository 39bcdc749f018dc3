#pragma once

#include <string>
#include <vector>

#include "sizer/baselines/trace.hpp"

namespace sizer::baselines {

/// Best-so-far curves of several runs aligned by step. A run shorter than
/// the longest one carries its final value forward.
struct MergedCurves {
    std::vector<std::string> names;
    std::vector<std::vector<double>> curves;  // one per run, all the same length
    std::vector<double> max_curve;            // per-step max across runs

    [[nodiscard]] std::size_t steps() const noexcept { return max_curve.size(); }
    /// step,<name>...,max
    [[nodiscard]] std::string to_csv() const;
};

/// Throws ConfigError if `traces` is empty or any trace has no entries.
MergedCurves merge_traces(const std::vector<SearchTrace>& traces, const std::vector<std::string>& names);

/// Self-contained SVG line plot of one or more curves.
std::string render_svg(const std::vector<std::vector<double>>& curves, const std::vector<std::string>& labels,
                       const std::string& title);

}  // namespace sizer::baselines
