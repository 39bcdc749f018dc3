#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sizer/circuit/technology.hpp"
#include "sizer/circuit/topology.hpp"
#include "sizer/nn/matrix.hpp"
#include "sizer/params/param_spec.hpp"
#include "sizer/util/json_io.hpp"
#include "sizer/util/rng.hpp"

namespace sizer::params {

/// Raw agent output: n × kMaxArity, row k uses its first action_arity(kind)
/// columns (all in [-1, 1]); the remaining columns are zero.
using ActionMatrix = nn::Matrix;

/// Concrete device parameters per component, in action order.
struct DesignPoint {
    std::vector<std::vector<double>> values;

    bool operator==(const DesignPoint&) const = default;
    /// FNV-1a over the bit patterns of all values.
    [[nodiscard]] std::uint64_t hash() const;
};

/// Maps raw ∈ [-1, 1] onto [lower, upper] (linearly or geometrically). Raw
/// values outside the interval are clamped with a warning.
double denormalize(double raw, const ParamSpec& spec);

/// Position of a value inside its range: 0 at lower, 1 at upper, on the
/// spec's scale.
double normalized_coordinate(double value, const ParamSpec& spec);

/// Nearest grid point lower + k·precision, with k limited to grid points
/// inside [lower, upper].
double snap_to_grid(double value, const ParamSpec& spec);

/// Matching (group representative = lowest id), then grid rounding, then
/// bound clamping.
DesignPoint refine(const DesignPoint& design, const circuit::CircuitTopology& topology,
                   const circuit::TechnologyNode& tech);

/// Per-entry denormalize followed by refine.
DesignPoint action_to_design(const ActionMatrix& raw, const circuit::CircuitTopology& topology,
                             const circuit::TechnologyNode& tech);

/// True when every value lies on its grid inside bounds and matched
/// components carry identical values.
bool is_legal(const DesignPoint& design, const circuit::CircuitTopology& topology,
              const circuit::TechnologyNode& tech);

/// {"<component>": {"W": .., "L": .., "M": ..}, ...} in component order.
Json design_to_json(const DesignPoint& design, const circuit::CircuitTopology& topology);
DesignPoint design_from_json(const Json& doc, const circuit::CircuitTopology& topology);

/// Uniform raw action matrix with i.i.d. entries in [-1, 1].
ActionMatrix random_action(const circuit::CircuitTopology& topology, Rng& rng);

std::string hash_hex(std::uint64_t h);

}  // namespace sizer::params
