#pragma once

#include <cstddef>
#include <functional>

#include "sizer/agent/agent.hpp"
#include "sizer/agent/checkpoint.hpp"
#include "sizer/baselines/trace.hpp"

namespace sizer::agent {

using EpisodeCallback = std::function<void(const EpisodeResult&, const baselines::TraceEntry&)>;

/// Runs the agent until it has completed `config().episodes` episodes.
baselines::SearchResult run_agent(Agent& agent, Environment& env, const EpisodeCallback& on_episode = {});

/// Agent for `env` that starts from checkpointed weights with fresh training
/// state. The encoding and aggregation mode come from the checkpoint. Throws
/// DimensionError when the checkpoint does not fit the environment.
Agent make_transfer_agent(Checkpoint checkpoint, const Environment& env, AgentConfig config);

/// Fresh agent on `env` that starts from checkpointed weights. Replay,
/// baseline, noise schedule and optimizer state start empty and warm-up runs
/// again. The encoding and aggregation mode come from the checkpoint.
baselines::SearchResult transfer_run(Checkpoint checkpoint, Environment& env, AgentConfig config,
                                     const EpisodeCallback& on_episode = {});

}  // namespace sizer::agent
