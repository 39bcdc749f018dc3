#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sizer/agent/agent.hpp"
#include "sizer/agent/networks.hpp"
#include "sizer/circuit/state.hpp"
#include "sizer/circuit/topology.hpp"

namespace sizer::agent {

struct CheckpointInfo {
    circuit::EncodingMode encoding = circuit::EncodingMode::OneHotIndex;
    bool skip_aggregation = false;
    NetworkDims dims;
    /// Bit kind_index(k) is set for every kind present in the source topology.
    std::uint8_t kind_mask = 0;
    std::uint64_t source_nodes = 0;
    std::string source_name;
};

struct Checkpoint {
    CheckpointInfo info;
    ActorNetwork actor;
    CriticNetwork critic;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Binary, versioned, little-endian. Weights round-trip bit-exactly.
void save_checkpoint(const std::filesystem::path& path, Agent& agent, const circuit::CircuitTopology& source);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws DimensionError when the checkpoint cannot drive `target` under the
/// requested encoding.
void check_compatible(const CheckpointInfo& info, const circuit::CircuitTopology& target,
                      circuit::EncodingMode encoding);

}  // namespace sizer::agent
