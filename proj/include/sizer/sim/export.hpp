#pragma once

#include <string>
#include <string_view>

#include "sizer/circuit/netlist.hpp"
#include "sizer/circuit/technology.hpp"
#include "sizer/params/param_space.hpp"

namespace sizer::sim {

/// Shortest round-trip decimal of `value` rewritten with an exponent that is
/// a multiple of three, e.g. 2.2e-6, 180e-9, 15e3. Parsing the text back
/// yields the identical double.
std::string engineering(double value);

/// Netlist text of `topology` followed by one `param` line per component
/// carrying its design values with units (lengths in m, r in ohm, c in F).
std::string export_netlist(const circuit::CircuitTopology& topology, const params::DesignPoint& design,
                           const circuit::TechnologyNode& tech);

/// Design values carried by the `param` lines of a parsed netlist document.
params::DesignPoint design_from_param_lines(const circuit::NetlistDocument& doc);

}  // namespace sizer::sim
