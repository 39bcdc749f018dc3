#include "sizer/circuit/state.hpp"

#include <cmath>

#include "sizer/util/error.hpp"

namespace sizer::circuit {

std::string_view encoding_name(EncodingMode m) {
    return m == EncodingMode::OneHotIndex ? "onehot" : "scalar";
}

std::optional<EncodingMode> encoding_from_name(std::string_view name) {
    if (name == "onehot") {
        return EncodingMode::OneHotIndex;
    }
    if (name == "scalar") {
        return EncodingMode::ScalarIndex;
    }
    return std::nullopt;
}

std::size_t state_dim(EncodingMode mode, std::size_t n) {
    const std::size_t index_width = mode == EncodingMode::OneHotIndex ? n : 1;
    return index_width + kKindCount + kFeatureCount;
}

nn::Matrix raw_state(const CircuitTopology& topology, const TechnologyNode& tech, EncodingMode mode) {
    const std::size_t n = topology.size();
    if (n == 0) {
        throw ConfigError("cannot encode an empty topology");
    }
    const std::size_t dim = state_dim(mode, n);
    const std::size_t kind_off = mode == EncodingMode::OneHotIndex ? n : 1;
    const std::size_t feat_off = kind_off + kKindCount;
    nn::Matrix m(n, dim);
    for (const Component& c : topology.components()) {
        const std::size_t k = c.id;
        if (mode == EncodingMode::OneHotIndex) {
            m(k, k) = 1.0;
        } else {
            m(k, 0) = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        }
        m(k, kind_off + kind_index(c.kind)) = 1.0;
        const auto f = tech.features(c.kind).as_array();
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            m(k, feat_off + i) = f[i];
        }
    }
    return m;
}

void standardize_columns(nn::Matrix& m) {
    const std::size_t n = m.rows();
    for (std::size_t c = 0; c < m.cols(); ++c) {
        bool constant = true;
        for (std::size_t r = 1; r < n && constant; ++r) {
            constant = m(r, c) == m(0, c);
        }
        if (constant) {
            for (std::size_t r = 0; r < n; ++r) {
                m(r, c) = 0.0;
            }
            continue;
        }
        double mean = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            mean += m(r, c);
        }
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double d = m(r, c) - mean;
            var += d * d;
        }
        const double sd = std::sqrt(var / static_cast<double>(n));
        for (std::size_t r = 0; r < n; ++r) {
            m(r, c) = (m(r, c) - mean) / sd;
        }
    }
}

StateMatrix encode_state(const CircuitTopology& topology, const TechnologyNode& tech, EncodingMode mode) {
    StateMatrix s{raw_state(topology, tech, mode), mode};
    standardize_columns(s.values);
    return s;
}

}  // namespace sizer::circuit
