#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "sizer/circuit/technology.hpp"
#include "sizer/circuit/topology.hpp"
#include "sizer/nn/matrix.hpp"

namespace sizer::circuit {

/// OneHotIndex: row = [one-hot(k) (n) | one-hot(kind) (4) | features (5)].
/// ScalarIndex: row = [k/(n-1) | one-hot(kind) | features], the same width
/// for every topology.
enum class EncodingMode { OneHotIndex, ScalarIndex };

std::string_view encoding_name(EncodingMode m);
std::optional<EncodingMode> encoding_from_name(std::string_view name);

/// Per-row width for a topology with n components.
std::size_t state_dim(EncodingMode mode, std::size_t n);

struct StateMatrix {
    nn::Matrix values;  // n × dim
    EncodingMode mode = EncodingMode::OneHotIndex;

    [[nodiscard]] std::size_t rows() const noexcept { return values.rows(); }
    [[nodiscard]] std::size_t dim() const noexcept { return values.cols(); }
};

/// Rows before standardization.
nn::Matrix raw_state(const CircuitTopology& topology, const TechnologyNode& tech, EncodingMode mode);

/// Standardizes each column to mean 0 / std 1 across rows (population
/// statistics). Columns whose entries are all equal become zeros.
void standardize_columns(nn::Matrix& m);

StateMatrix encode_state(const CircuitTopology& topology, const TechnologyNode& tech, EncodingMode mode);

}  // namespace sizer::circuit
