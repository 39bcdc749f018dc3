#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "sizer/circuit/topology.hpp"

namespace sizer::circuit {

/// Parameter values attached to components by `param` lines, keyed by
/// component name then parameter name (W, L, M, r, c).
using ParamLines = std::map<std::string, std::map<std::string, double>>;

struct NetlistDocument {
    CircuitTopology topology;
    ParamLines params;
};

/// Line-oriented netlist:
///
///     # comment
///     .title <name>
///     .global <net>...
///     .stage <name> driver=<comp>[,<comp>...] [load=<comp>[,<comp>...]]
///     <name> <nmos|pmos|res|cap> <net>+ [group=<label>]
///     param <name> <key>=<value>[unit]...
///
/// Throws ParseError carrying the 1-based line number.
NetlistDocument parse_netlist_document(std::string_view text, std::string default_name = "circuit");

/// Topology only; `param` lines are accepted and ignored.
CircuitTopology parse_netlist(std::string_view text, std::string default_name = "circuit");

/// Reads and parses a netlist file; the title defaults to the file stem.
NetlistDocument load_netlist_document(const std::filesystem::path& path);

/// Parses a number with an optional trailing unit token (m, ohm, F).
double parse_quantity(std::string_view token);

}  // namespace sizer::circuit
